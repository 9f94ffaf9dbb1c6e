// darwinism.hpp: information-theoretic analysis of system/environment states.
//
// All quantities are in bits. Every function taking a state has a PureState
// overload that works on amplitudes directly; results agree with the
// DensityMatrix path to rounding.

#pragma once

#include "dlab/qstate.hpp"
#include "dlab/scm_model.hpp"
#include "dlab/simulator.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dlab {

class AnalysisError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using QubitSet = std::vector<int>;

enum class PartitionMode { PerQubit, PerPair, AncillaeOnly };

std::string to_string(PartitionMode m);
PartitionMode partition_mode_from_string(const std::string& s);

/// Disjoint groups of environment qubits that fractions are built from.
///
/// AncillaeOnly lists the ancillae as units; the emitters are never part of
/// a fraction, which is the same as tracing them out first.
struct PartitionScheme {
    PartitionMode mode = PartitionMode::PerQubit;
    std::vector<QubitSet> units;
    QubitSet traced;

    // Units of an experiment's register layout. AncillaeOnly requires the
    // full scenario; in the condensed one PerQubit and PerPair coincide.
    static PartitionScheme for_model(const ScmParams& p, PartitionMode mode);

    std::size_t num_units() const noexcept { return units.size(); }
    void validate(int num_qubits, const QubitSet& sys) const;
};

struct MiPoint {
    int f = 0;
    double value = 0.0;
    double std_error = 0.0;
};

struct MiCurve {
    std::vector<MiPoint> points;
};

struct BasisGrid {
    int phi_steps = 0;
    int xi_steps = 0;
    Eigen::MatrixXd values;  // rows follow phi, columns xi

    double phi(int i) const;
    double xi(int j) const;
    // First maximum in row-major order, ties within 1e-12 resolved to the
    // earlier cell.
    std::pair<int, int> argmax() const;
    double max() const;
};

struct PauliCmiRow {
    std::string sys_setting;
    std::string frac_setting;
    QubitSet fraction;  // empty on averaged rows
    double cmi = 0.0;
};

struct PauliCmiTable {
    int frac_size = 0;
    std::vector<PauliCmiRow> per_fraction;
    std::vector<PauliCmiRow> averaged;  // mean over all fractions of the size, per setting

    double max_per_fraction() const;
    double max_averaged() const;
};

double qmi(const DensityMatrix& rho, const QubitSet& sys, const QubitSet& frac);
double qmi(const PureState& psi, const QubitSet& sys, const QubitSet& frac);

// Mean and standard error over every subset of f units, f = 1..num_units.
MiCurve averaged_qmi(const DensityMatrix& rho, const QubitSet& sys, const PartitionScheme& scheme, int jobs = 1);
MiCurve averaged_qmi(const PureState& psi, const QubitSet& sys, const PartitionScheme& scheme, int jobs = 1);

// Joint outcome distribution of (sys, frac) measured in the given bases,
// indexed [sys outcome][frac outcome].
Eigen::MatrixXd joint_distribution(const DensityMatrix& rho, const QubitSet& sys, const QubitSet& frac,
                                   const MeasSetting& sys_basis, const MeasSetting& frac_basis);
Eigen::MatrixXd joint_distribution(const PureState& psi, const QubitSet& sys, const QubitSet& frac,
                                   const MeasSetting& sys_basis, const MeasSetting& frac_basis);

double mutual_information(const Eigen::MatrixXd& joint);

double cmi_joint(const DensityMatrix& rho, const QubitSet& sys, const QubitSet& frac, const MeasSetting& sys_basis,
                 const MeasSetting& frac_basis);
double cmi_joint(const PureState& psi, const QubitSet& sys, const QubitSet& frac, const MeasSetting& sys_basis,
                 const MeasSetting& frac_basis);

// Plug-in estimate from `shots` seeded samples of the exact joint distribution.
double cmi_sampled(const Eigen::MatrixXd& joint, std::int64_t shots, std::uint64_t seed);

// phi in [0, pi] inclusive, xi in [0, 2 pi) exclusive; every fraction qubit
// shares the basis and the system is measured in Z.
BasisGrid cmi_grid(const DensityMatrix& rho, const QubitSet& sys, const QubitSet& frac, int phi_steps = 61,
                   int xi_steps = 61, int jobs = 1);
BasisGrid cmi_grid(const PureState& psi, const QubitSet& sys, const QubitSet& frac, int phi_steps = 61,
                   int xi_steps = 61, int jobs = 1);

// Holevo quantity of the ensemble of fraction states conditioned on the
// system's computational-basis outcome.
double holevo_bound(const DensityMatrix& rho, const QubitSet& sys, const QubitSet& frac);
double holevo_bound(const PureState& psi, const QubitSet& sys, const QubitSet& frac);

// Fractions are unordered sets of frac_size units.
PauliCmiTable pauli_cmi_scan(const DensityMatrix& rho, const QubitSet& sys, int frac_size,
                             const PartitionScheme& scheme, int jobs = 1);
PauliCmiTable pauli_cmi_scan(const PureState& psi, const QubitSet& sys, int frac_size, const PartitionScheme& scheme,
                             int jobs = 1);

// Sum of increases of |c| between consecutive samples.
double blp_witness(std::span<const std::pair<double, double>> curve);

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> combinations(int n, int k);

}  // namespace dlab
