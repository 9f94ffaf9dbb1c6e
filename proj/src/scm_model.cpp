#include "dlab/scm_model.hpp"

#include <cmath>
#include <string>

namespace dlab {

namespace {

constexpr double kThetaTol = 1e-12;

void require_nonnegative(double t) {
    if (!(t >= 0.0)) throw ModelError("time must be non-negative, got " + std::to_string(t));
}

}  // namespace

void ScmParams::validate() const {
    if (!(lam > 0.0)) throw ModelError("rate lam must be positive");
    if (n < 1) throw ModelError("number of ancillae n must be at least 1");
    if (!(theta >= 0.0 && theta < 2.0 * std::numbers::pi)) throw ModelError("theta must lie in [0, 2pi)");
    if (scenario == Scenario::Condensed && !non_entangling())
        throw ModelError("the condensed scenario requires theta = pi");
}

bool ScmParams::non_entangling() const noexcept { return std::abs(theta - std::numbers::pi) <= kThetaTol; }

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    for (std::size_t i = 0; i < times_.size(); ++i) {
        require_nonnegative(times_[i]);
        if (i > 0 && !(times_[i] > times_[i - 1])) throw ModelError("time grid must be strictly increasing");
    }
}

TimeGrid TimeGrid::uniform(double start, double stop, int count) {
    if (count < 1) throw ModelError("time grid needs at least one point");
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        t[static_cast<std::size_t>(i)] = count == 1 ? start : start + (stop - start) * i / (count - 1);
    return TimeGrid(std::move(t));
}

double collision_probability(double t, const ScmParams& p, RateConvention conv) {
    require_nonnegative(t);
    const double rate = conv == RateConvention::PerAncilla ? p.lam : p.lam / p.n;
    return -std::expm1(-rate * t);
}

double prep_angle(double t, const ScmParams& p) {
    require_nonnegative(t);
    return std::acos(std::exp(-p.lam * t / 2.0));
}

double coherence_markovian(double t, const ScmParams& p) {
    return std::exp(-p.lam * (1.0 - std::cos(p.theta)) * t);
}

double coherence_finite(double t, const ScmParams& p, RateConvention conv) {
    const double prob = collision_probability(t, p, conv);
    return std::pow(1.0 + (std::cos(p.theta) - 1.0) * prob, p.n);
}

PureState ideal_global_state(double t, const ScmParams& p) {
    p.validate();
    const double prob = collision_probability(t, p);
    const double stay = std::sqrt(1.0 - prob);
    const double go = std::sqrt(prob);

    // Environment factor conditioned on the system pointer state s, z = (-1)^s.
    auto branch = [&](double z) {
        Vec env = Vec::Ones(1);
        for (int k = 0; k < p.n; ++k) {
            Vec unit;
            if (p.scenario == Scenario::Condensed) {
                unit.resize(2);
                unit << stay, z * go;
            } else {
                // |E A> amplitudes in order 00, 01, 10, 11
                unit = Vec::Zero(4);
                unit(0) = cplx(0.0, 1.0) * go * std::cos(p.theta / 2.0);
                unit(1) = z * go * std::sin(p.theta / 2.0);
                unit(2) = stay;
            }
            env = kron(env, unit);
        }
        return env;
    };

    const Vec e0 = branch(1.0);
    const Vec e1 = branch(-1.0);
    Vec psi(2 * e0.size());
    psi << e0, e1;
    psi /= std::sqrt(2.0);
    return PureState(std::move(psi));
}

CanonicalTimes canonical_times() { return {std::log(2.0), std::log(2.0 / 1.3), std::log(6.0)}; }

namespace layout {

int num_qubits(const ScmParams& p) { return p.scenario == Scenario::Full ? 1 + 2 * p.n : 1 + p.n; }
int emitter(int pair) { return 1 + 2 * pair; }
int ancilla(int pair) { return 2 + 2 * pair; }
int condensed(int pair) { return 1 + pair; }

}  // namespace layout

}  // namespace dlab
