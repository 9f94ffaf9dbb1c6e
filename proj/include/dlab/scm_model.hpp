// scm_model.hpp: closed-form analytics of the stochastic collision model.
//
// The system qubit dephases through collisions with n ancillae, each emitted at
// an exponentially distributed time with rate lam. These functions are the
// reference every simulated and reconstructed quantity is checked against.

#pragma once

#include "dlab/qstate.hpp"

#include <array>
#include <numbers>
#include <vector>

namespace dlab {

enum class Scenario { Full, Condensed };

// PerAncilla: p(t) = 1 - exp(-lam t) for every ancilla (reproduces t_max = ln 2).
// Scaled:     p(t) = 1 - exp(-lam t / n), the rate divided among the n ancillae.
enum class RateConvention { PerAncilla, Scaled };

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parameters of one collision-model experiment.
///
/// theta is the collision strength (the short-collision limit of duration times
/// coupling); the pre-limit quantities never appear on their own.
struct ScmParams {
    double theta = std::numbers::pi;
    double lam = 1.0;
    int n = 1;
    Scenario scenario = Scenario::Full;

    // Throws ModelError on lam <= 0, n < 1, theta outside [0, 2pi) or a
    // condensed scenario with entangling collisions.
    void validate() const;
    bool non_entangling() const noexcept;
};

class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> times);
    static TimeGrid uniform(double start, double stop, int count);
    const std::vector<double>& times() const noexcept { return times_; }

private:
    std::vector<double> times_;
};

struct CanonicalTimes {
    double t_max;
    double t_close;
    double t_rec;
};

double collision_probability(double t, const ScmParams& p, RateConvention conv = RateConvention::PerAncilla);
// alpha = arccos(exp(-lam t / 2)); sin^2(alpha) equals the collision probability.
double prep_angle(double t, const ScmParams& p);
double coherence_markovian(double t, const ScmParams& p);
double coherence_finite(double t, const ScmParams& p, RateConvention conv = RateConvention::PerAncilla);

/// Exact global state of system and environment at time t.
///
/// Full: 1 + 2n qubits ordered system, E_1, A_1, E_2, A_2, ... . Each pair is
/// sqrt(1-p)|1>_E|0>_A (not yet emitted) plus i sqrt(p)|0>_E U|0>_A (emitted and
/// collided), with U = exp(-i theta/2 sigma_x^A sigma_z^S) and the system
/// starting in |+>.
/// Condensed (theta = pi only): 1 + n qubits ordered system, C_1, ..., C_n with
/// |1>_E|0>_A -> |0>_C and |0>_E|1>_A -> |1>_C.
PureState ideal_global_state(double t, const ScmParams& p);

CanonicalTimes canonical_times();

// Register layout shared by the circuit builders, the ideal states and the
// partition schemes.
namespace layout {
inline constexpr int kSystem = 0;
int num_qubits(const ScmParams& p);
int emitter(int pair);   // Full scenario, pair in [0, n)
int ancilla(int pair);   // Full scenario
int condensed(int pair); // Condensed scenario
}  // namespace layout

}  // namespace dlab
