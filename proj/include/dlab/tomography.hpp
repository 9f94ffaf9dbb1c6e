// tomography.hpp: Pauli-setting state tomography.
//
// Full-state reconstruction uses the diluted maximum-likelihood iteration
//   rho <- N[(I + eps R) rho (I + eps R)],  R = sum_j f_j / Tr(P_j rho) P_j
// over every setting/outcome projector P_j with empirical frequency f_j,
// starting from the maximally mixed state.

#pragma once

#include "dlab/qstate.hpp"
#include "dlab/simulator.hpp"

#include <span>
#include <vector>

namespace dlab {

class TomographyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct MleOptions {
    double dilution = 0.1;
    int max_iters = 5000;
    double tol = 1e-7;
};

struct TomographyJob {
    int num_qubits = 1;
    std::vector<MeasRecord> records;
    MleOptions options;

    // Throws unless all 3^N Pauli settings appear once with equal shots and
    // at least one count.
    void validate() const;
};

// Outcome distribution for one setting; probabilities follow register order
// and weight is the setting's share of the total shots.
struct SettingFrequencies {
    MeasSetting setting;
    std::vector<double> probabilities;
    double weight = 1.0;
};

struct MleResult {
    DensityMatrix state;
    std::vector<double> log_likelihood;  // one entry per accepted iterate, starting at I/2^N
    int iterations = 0;
    bool converged = false;
};

// All 3^N tensor products of {X, Y, Z}, qubit 0 varying slowest.
std::vector<MeasSetting> pauli_settings(int num_qubits);

MleResult mle_reconstruct(const TomographyJob& job);
// Same iteration on already-normalised frequencies (e.g. exact Born
// probabilities). Weights are renormalised to sum to one.
MleResult mle_reconstruct(int num_qubits, std::span<const SettingFrequencies> data, const MleOptions& opts = {});

std::vector<SettingFrequencies> frequencies_from_records(int num_qubits, std::span<const MeasRecord> records);

// Linear inversion from X, Y and Z records of one qubit, clipped into the
// physical cone when shot noise pushes the Bloch vector outside the ball.
DensityMatrix qubit_tomography(std::span<const MeasRecord> records);

// c = 2 Re <0|rho|1>; signed, so |+> gives 1.
double coherence_from_tomo(const DensityMatrix& rho_s);

}  // namespace dlab
