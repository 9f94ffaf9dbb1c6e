#include "dlab/simulator.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace dlab;

namespace {

constexpr double kPi = std::numbers::pi;

MeasSetting random_setting(int n, std::mt19937_64& gen) {
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_real_distribution<double> ang(0.0, 2 * kPi);
    MeasSetting s;
    for (int q = 0; q < n; ++q) {
        switch (kind(gen)) {
            case 0: s.push_back(Basis::x()); break;
            case 1: s.push_back(Basis::y()); break;
            case 2: s.push_back(Basis::z()); break;
            default: s.push_back(Basis::angles(ang(gen) / 2, ang(gen))); break;
        }
    }
    return s;
}

std::size_t outcome_index(const std::string& bits) {
    std::size_t i = 0;
    for (char c : bits) i = (i << 1) | static_cast<std::size_t>(c == '1');
    return i;
}

double condensed_coherence(const NoiseModel& noise) {
    Circuit c(3);
    c.add(Gate::ry(1, 1.1));
    c.add(Gate::ry(2, 0.7));
    c.add(Gate::h(0));
    c.add(Gate::cz(0, 1));
    c.add(Gate::cz(0, 2));
    const int sys = 0;
    return 2.0 * partial_trace(run_density(c, noise), std::span<const int>(&sys, 1))(0, 1).real();
}

}  // namespace

TEST_CASE("basis labels and named bases") {
    CHECK(Basis::x().label() == "X");
    CHECK(setting_label({Basis::z(), Basis::y()}) == "ZY");
    CHECK(Basis::angles(0.5, 1.25).label() == "(0.5,1.25)");
    const PureState plus = PureState::normalized((Vec(2) << 1, 1).finished());
    const PureState plus_i = PureState::normalized((Vec(2) << 1, cplx(0, 1)).finished());
    CHECK(outcome_probabilities(plus, {Basis::x()})[0] == doctest::Approx(1.0));
    CHECK(outcome_probabilities(plus_i, {Basis::y()})[0] == doctest::Approx(1.0));
    CHECK(outcome_probabilities(plus, {Basis::angles(kPi / 2, 0)})[0] == doctest::Approx(1.0));
    CHECK(outcome_probabilities(plus, {Basis::angles(kPi / 2, kPi)})[1] == doctest::Approx(1.0));
}

TEST_CASE("Born probabilities match the projector oracle") {
    std::mt19937_64 gen(41);
    for (int n = 1; n <= 4; ++n) {
        for (int trial = 0; trial < 5; ++trial) {
            const MeasSetting s = random_setting(n, gen);
            const PureState psi{oracle::random_state(n, gen)};
            const DensityMatrix rho{oracle::random_density(n, 3, gen)};
            const auto pp = outcome_probabilities(psi, s);
            const auto pr = outcome_probabilities(rho, s);
            const auto op = oracle::probabilities(DensityMatrix(psi).matrix(), s);
            const auto orr = oracle::probabilities(rho.matrix(), s);
            for (std::size_t k = 0; k < pp.size(); ++k) {
                CHECK(pp[k] == doctest::Approx(op[k]).epsilon(1e-12));
                CHECK(pr[k] == doctest::Approx(orr[k]).epsilon(1e-12));
            }
            const auto via_rho = outcome_probabilities(DensityMatrix(psi), s);
            for (std::size_t k = 0; k < pp.size(); ++k) CHECK(via_rho[k] == doctest::Approx(pp[k]).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(outcome_probabilities(PureState::basis(2, 0), {Basis::z()}), SimulationError);
}

TEST_CASE("sampling follows the Born distribution") {
    std::mt19937_64 gen(43);
    const PureState psi{oracle::random_state(3, gen)};
    const MeasSetting s{Basis::x(), Basis::z(), Basis::angles(1.0, 2.0)};
    const auto p = outcome_probabilities(psi, s);
    const std::int64_t shots = 40000;
    const MeasRecord rec = sample(psi, s, shots, 99);
    CHECK(rec.shots == shots);
    CHECK(rec.setting == s);
    std::vector<double> observed(8, 0.0);
    std::int64_t total = 0;
    for (const auto& [bits, count] : rec.counts) {
        REQUIRE(bits.size() == 3);
        observed[outcome_index(bits)] += static_cast<double>(count);
        total += count;
    }
    CHECK(total == shots);
    double chi2 = 0.0;
    for (std::size_t k = 0; k < 8; ++k) {
        const double e = p[k] * static_cast<double>(shots);
        if (e > 0) chi2 += (observed[k] - e) * (observed[k] - e) / e;
    }
    CHECK(chi2 < 24.32);  // 7 degrees of freedom, p = 0.001

    CHECK(sample(psi, s, shots, 99).counts == rec.counts);
    CHECK(sample(psi, s, shots, 100).counts != rec.counts);
    CHECK_THROWS_AS(sample(psi, s, 0, 1), SimulationError);
}

TEST_CASE("zero-probability outcomes are never drawn") {
    const MeasRecord rec = sample(PureState::basis(2, 2), {Basis::z(), Basis::z()}, 5000, 3);
    REQUIRE(rec.counts.size() == 1);
    CHECK(rec.counts.begin()->first == "10");
}

TEST_CASE("readout flips") {
    const std::int64_t shots = 50000;
    const MeasRecord rec = sample(PureState::basis(1, 0), {Basis::z()}, shots, 5, 0.1);
    const double f = static_cast<double>(rec.counts.at("1")) / static_cast<double>(shots);
    CHECK(std::abs(f - 0.1) < 4 * std::sqrt(0.09 / static_cast<double>(shots)));
    CHECK_THROWS_AS(sample(PureState::basis(1, 0), {Basis::z()}, 10, 5, 1.5), SimulationError);
}

TEST_CASE("silent density simulation equals the statevector") {
    std::mt19937_64 gen(47);
    Circuit c(3);
    c.add(Gate::h(0));
    c.add(Gate::ry(1, 0.4));
    c.add(Gate::cnot(0, 2));
    c.add(Gate::cz(1, 2));
    c.add(Gate::swap(0, 1));
    const DensityMatrix rho = run_density(c, {});
    CHECK(fidelity(rho, DensityMatrix(run_statevector(c))) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("noise strength decreases coherence monotonically") {
    const double clean = condensed_coherence({});
    CHECK(clean == doctest::Approx(std::cos(1.1) * std::cos(0.7)).epsilon(1e-12));
    double prev = std::abs(clean);
    for (double d : {0.01, 0.05, 0.1, 0.3}) {
        NoiseModel m;
        m.depol_2q = d;
        m.depol_1q = d / 10;
        const double c = std::abs(condensed_coherence(m));
        CHECK(c < prev);
        prev = c;
    }
    NoiseModel idle;
    idle.depol_1q = 0.05;
    NoiseModel busy = idle;
    busy.idle = true;
    CHECK(std::abs(condensed_coherence(busy)) < std::abs(condensed_coherence(idle)));
    NoiseModel damp;
    damp.amp_damp_gamma = 0.2;
    CHECK_NOTHROW(condensed_coherence(damp));
    NoiseModel bad;
    bad.depol_1q = -0.1;
    CHECK_THROWS_AS(bad.validate(), SimulationError);
    CHECK(NoiseModel{}.silent());
    CHECK_FALSE(NoiseModel::placeholder().silent());
}

TEST_CASE("derived seeds") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(derive_seed(7, k));
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
    CHECK(derive_seed(7, 3) != derive_seed(8, 3));
}
