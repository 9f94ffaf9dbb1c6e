#include "dlab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <random>

namespace dlab {

namespace {

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw SimulationError(std::string(name) + " must lie in [0, 1]");
}

void check_setting(const MeasSetting& setting, int num_qubits) {
    if (static_cast<int>(setting.size()) != num_qubits)
        throw SimulationError("measurement setting has " + std::to_string(setting.size()) + " bases for " +
                              std::to_string(num_qubits) + " qubits");
}

std::vector<double> clean(std::vector<double> p) {
    for (double& x : p) x = std::max(x, 0.0);
    return p;
}

std::string bitstring(std::size_t index, int num_qubits) {
    std::string s(static_cast<std::size_t>(num_qubits), '0');
    for (int q = 0; q < num_qubits; ++q)
        if ((index >> bit_of(q, num_qubits)) & 1U) s[static_cast<std::size_t>(q)] = '1';
    return s;
}

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

MeasRecord sample_distribution(const std::vector<double>& probs, int num_qubits, const MeasSetting& setting,
                               std::int64_t shots, std::uint64_t seed, double readout_flip) {
    if (shots < 1) throw SimulationError("shots must be at least 1");
    check_probability(readout_flip, "readout_flip");
    std::vector<double> cdf(probs.size());
    std::partial_sum(probs.begin(), probs.end(), cdf.begin());
    const double total = cdf.back();

    std::mt19937_64 gen(seed);
    std::vector<std::int64_t> hist(probs.size(), 0);
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = uniform01(gen) * total;
        auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        idx = std::min(idx, probs.size() - 1);
        while (probs[idx] == 0.0 && idx > 0) --idx;  // u landed on a flat tail
        if (readout_flip > 0.0)
            for (int q = 0; q < num_qubits; ++q)
                if (uniform01(gen) < readout_flip) idx ^= std::size_t{1} << bit_of(q, num_qubits);
        ++hist[idx];
    }
    MeasRecord rec{setting, {}, shots, seed};
    for (std::size_t i = 0; i < hist.size(); ++i)
        if (hist[i] > 0) rec.counts.emplace(bitstring(i, num_qubits), hist[i]);
    return rec;
}

}  // namespace

void NoiseModel::validate() const {
    check_probability(depol_1q, "depol_1q");
    check_probability(depol_2q, "depol_2q");
    check_probability(amp_damp_gamma, "amp_damp_gamma");
    check_probability(readout_flip, "readout_flip");
}

Mat Basis::rotation() const {
    double p = phi;
    double x = xi;
    switch (kind) {
        case Kind::X: p = std::numbers::pi / 2.0; x = 0.0; break;
        case Kind::Y: p = std::numbers::pi / 2.0; x = std::numbers::pi / 2.0; break;
        case Kind::Z: p = 0.0; x = 0.0; break;
        case Kind::Angles: break;
    }
    const double c = std::cos(p / 2.0);
    const double s = std::sin(p / 2.0);
    const cplx phase = std::polar(1.0, -x);
    Mat v(2, 2);
    v << c, phase * s,
         s, -phase * c;
    return v;
}

std::string Basis::label() const {
    switch (kind) {
        case Kind::X: return "X";
        case Kind::Y: return "Y";
        case Kind::Z: return "Z";
        case Kind::Angles: break;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%.6g,%.6g)", phi, xi);
    return buf;
}

std::string setting_label(const MeasSetting& s) {
    std::string out;
    for (const Basis& b : s) out += b.label();
    return out;
}

PureState run_statevector(const Circuit& c) {
    if (c.num_qubits() > kStatevectorQubitLimit)
        throw SimulationError("statevector simulation is limited to " + std::to_string(kStatevectorQubitLimit) + " qubits");
    Vec psi = PureState::basis(c.num_qubits(), 0).amplitudes();
    for (const Gate& g : c.gates()) apply_to_vector(psi, gate_matrix(g), g.operands(), c.num_qubits());
    return PureState(std::move(psi));
}

DensityMatrix run_density(const Circuit& c, const NoiseModel& noise) {
    noise.validate();
    const int n = c.num_qubits();
    if (n > kDensityQubitLimit)
        throw SimulationError("density simulation is limited to " + std::to_string(kDensityQubitLimit) + " qubits");
    const KrausChannel dep1 = depolarizing_channel(noise.depol_1q, 1);
    const KrausChannel dep2 = depolarizing_channel(noise.depol_2q, 2);
    const KrausChannel damp = amplitude_damping_channel(noise.amp_damp_gamma);

    DensityMatrix rho(PureState::basis(n, 0));
    for (const Gate& g : c.gates()) {
        const auto ops = g.operands();
        rho = apply_unitary(rho, gate_matrix(g), ops);
        if (g.arity() == 1 && noise.depol_1q > 0.0) rho = apply_channel(rho, dep1, ops);
        if (g.arity() == 2 && noise.depol_2q > 0.0) rho = apply_channel(rho, dep2, ops);
        if (noise.amp_damp_gamma > 0.0)
            for (int q : ops) rho = apply_channel(rho, damp, std::span<const int>(&q, 1));
        if (noise.idle && noise.depol_1q > 0.0)
            for (int q = 0; q < n; ++q)
                if (std::find(ops.begin(), ops.end(), q) == ops.end())
                    rho = apply_channel(rho, dep1, std::span<const int>(&q, 1));
    }
    const double tr = rho.matrix().trace().real();
    if (std::abs(tr - 1.0) > 1e-9) throw SimulationError("density simulation lost trace");
    return rho;
}

std::vector<double> outcome_probabilities(const PureState& psi, const MeasSetting& setting) {
    check_setting(setting, psi.num_qubits());
    Vec v = psi.amplitudes();
    for (int q = 0; q < psi.num_qubits(); ++q) {
        const Basis& b = setting[static_cast<std::size_t>(q)];
        if (b.kind == Basis::Kind::Z) continue;
        apply_to_vector(v, b.rotation(), std::span<const int>(&q, 1), psi.num_qubits());
    }
    std::vector<double> p(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) p[static_cast<std::size_t>(i)] = std::norm(v(i));
    return p;
}

std::vector<double> outcome_probabilities(const DensityMatrix& rho, const MeasSetting& setting) {
    check_setting(setting, rho.num_qubits());
    Mat m = rho.matrix();
    for (int pass = 0; pass < 2; ++pass) {
        for (int q = 0; q < rho.num_qubits(); ++q) {
            const Basis& b = setting[static_cast<std::size_t>(q)];
            if (b.kind == Basis::Kind::Z) continue;
            apply_left(m, b.rotation(), std::span<const int>(&q, 1), rho.num_qubits());
        }
        m.adjointInPlace();
    }
    std::vector<double> p(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) p[static_cast<std::size_t>(i)] = m(i, i).real();
    return clean(std::move(p));
}

MeasRecord sample(const PureState& psi, const MeasSetting& setting, std::int64_t shots, std::uint64_t seed,
                  double readout_flip) {
    return sample_distribution(outcome_probabilities(psi, setting), psi.num_qubits(), setting, shots, seed,
                               readout_flip);
}

MeasRecord sample(const DensityMatrix& rho, const MeasSetting& setting, std::int64_t shots, std::uint64_t seed,
                  double readout_flip) {
    return sample_distribution(outcome_probabilities(rho, setting), rho.num_qubits(), setting, shots, seed,
                               readout_flip);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    // splitmix64 finaliser over the combined key
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace dlab
