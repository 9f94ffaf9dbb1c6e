// simulator.hpp: statevector and density-matrix execution, Born sampling.

#pragma once

#include "dlab/circuit.hpp"
#include "dlab/qstate.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dlab {

class SimulationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Generic per-gate noise. Channels act after every gate on the gate's own
/// qubits; with `idle` set, the one-qubit depolarizing channel also hits
/// every qubit the gate leaves alone.
struct NoiseModel {
    double depol_1q = 0.0;
    double depol_2q = 0.0;
    double amp_damp_gamma = 0.0;
    double readout_flip = 0.0;
    bool idle = false;

    void validate() const;
    bool silent() const noexcept { return depol_1q == 0.0 && depol_2q == 0.0 && amp_damp_gamma == 0.0; }
    // Qualitative stand-in for a superconducting device; not calibrated.
    static NoiseModel placeholder() { return {0.001, 0.01, 0.0, 0.02, false}; }
};

/// Local projective measurement basis.
///
/// Angle bases follow |0'> = cos(phi/2)|0> + e^{i xi} sin(phi/2)|1> and
/// |1'> = sin(phi/2)|0> - e^{i xi} cos(phi/2)|1>. X, Y and Z are the special
/// cases (pi/2, 0), (pi/2, pi/2) and (0, 0).
struct Basis {
    enum class Kind { X, Y, Z, Angles };
    Kind kind = Kind::Z;
    double phi = 0.0;
    double xi = 0.0;

    static Basis x() { return {Kind::X, 0.0, 0.0}; }
    static Basis y() { return {Kind::Y, 0.0, 0.0}; }
    static Basis z() { return {Kind::Z, 0.0, 0.0}; }
    static Basis angles(double phi, double xi) { return {Kind::Angles, phi, xi}; }

    // Rows are <0'| and <1'|, so (V psi)_b is the amplitude of outcome b.
    Mat rotation() const;
    std::string label() const;
    bool operator==(const Basis&) const = default;
};

using MeasSetting = std::vector<Basis>;

std::string setting_label(const MeasSetting& s);

// Outcome bitstrings list qubit 0 first.
struct MeasRecord {
    MeasSetting setting;
    std::map<std::string, std::int64_t> counts;
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
};

inline constexpr int kStatevectorQubitLimit = 16;
inline constexpr int kDensityQubitLimit = 10;

PureState run_statevector(const Circuit& c);
DensityMatrix run_density(const Circuit& c, const NoiseModel& noise);

// Born distribution over 2^n outcomes in register order. The setting must
// carry exactly one basis per qubit.
std::vector<double> outcome_probabilities(const PureState& psi, const MeasSetting& setting);
std::vector<double> outcome_probabilities(const DensityMatrix& rho, const MeasSetting& setting);

MeasRecord sample(const PureState& psi, const MeasSetting& setting, std::int64_t shots, std::uint64_t seed,
                  double readout_flip = 0.0);
MeasRecord sample(const DensityMatrix& rho, const MeasSetting& setting, std::int64_t shots, std::uint64_t seed,
                  double readout_flip = 0.0);

// Independent, reproducible stream seed for a (base seed, stream key) pair.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace dlab
