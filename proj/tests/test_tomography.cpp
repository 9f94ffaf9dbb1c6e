#include "dlab/measurement_io.hpp"
#include "dlab/tomography.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <filesystem>
#include <random>

using namespace dlab;

namespace {

std::vector<SettingFrequencies> exact_frequencies(const DensityMatrix& rho) {
    std::vector<SettingFrequencies> out;
    for (const MeasSetting& s : pauli_settings(rho.num_qubits())) out.push_back({s, outcome_probabilities(rho, s), 1.0});
    return out;
}

TomographyJob sampled_job(const DensityMatrix& rho, std::int64_t shots, std::uint64_t seed) {
    TomographyJob job;
    job.num_qubits = rho.num_qubits();
    std::uint64_t k = 0;
    for (const MeasSetting& s : pauli_settings(rho.num_qubits())) job.records.push_back(sample(rho, s, shots, derive_seed(seed, k++)));
    return job;
}

// Budget that lets the iteration approach pure states to 1e-6.
MleOptions long_run() { return {1.0, 30000, 0.0}; }

}  // namespace

TEST_CASE("Pauli settings enumerate with qubit 0 slowest") {
    const auto s = pauli_settings(2);
    REQUIRE(s.size() == 9);
    CHECK(setting_label(s[0]) == "XX");
    CHECK(setting_label(s[1]) == "XY");
    CHECK(setting_label(s[3]) == "YX");
    CHECK(setting_label(s[8]) == "ZZ");
    CHECK(pauli_settings(4).size() == 81);
    CHECK_THROWS_AS(pauli_settings(0), TomographyError);
}

TEST_CASE("exact frequencies of |+> reconstruct |+>") {
    const PureState plus = PureState::normalized((Vec(2) << 1, 1).finished());
    const auto data = exact_frequencies(DensityMatrix(plus));
    const MleResult r = mle_reconstruct(1, data, long_run());
    CHECK(fidelity(r.state, DensityMatrix(plus)) >= 1 - 1e-6);
    CHECK(coherence_from_tomo(r.state) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("the maximally mixed state is a fixed point") {
    for (int n = 1; n <= 3; ++n) {
        const DensityMatrix mixed = DensityMatrix::maximally_mixed(n);
        const MleResult r = mle_reconstruct(n, exact_frequencies(mixed));
        CHECK(r.converged);
        CHECK(trace_distance(r.state, mixed) < 1e-9);
    }
}

TEST_CASE("full-rank states converge under the default options") {
    std::mt19937_64 gen(53);
    const DensityMatrix rho{oracle::random_density(2, 4, gen)};
    const MleResult r = mle_reconstruct(2, exact_frequencies(rho));
    CHECK(r.converged);
    CHECK(fidelity(r.state, rho) >= 1 - 1e-6);
}

TEST_CASE("log-likelihood never decreases") {
    std::mt19937_64 gen(59);
    const DensityMatrix rho{PureState(oracle::random_state(2, gen))};
    const TomographyJob job = sampled_job(rho, 2048, 4);
    const MleResult r = mle_reconstruct(job);
    REQUIRE(r.log_likelihood.size() >= 2);
    CHECK(static_cast<int>(r.log_likelihood.size()) == r.iterations + 1);
    for (std::size_t i = 1; i < r.log_likelihood.size(); ++i) CHECK(r.log_likelihood[i] >= r.log_likelihood[i - 1] - 1e-12);
    CHECK(fidelity(r.state, rho) > 0.98);
    CHECK(r.state.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("frequencies from records") {
    const TomographyJob job = sampled_job(DensityMatrix(PureState::basis(2, 1)), 100, 1);
    const auto f = frequencies_from_records(2, job.records);
    REQUIRE(f.size() == 9);
    for (const auto& sf : f) {
        double sum = 0;
        for (double p : sf.probabilities) sum += p;
        CHECK(sum == doctest::Approx(1.0));
    }
    CHECK(f[8].probabilities[1] == doctest::Approx(1.0));  // ZZ on |01>
}

TEST_CASE("job validation") {
    TomographyJob job = sampled_job(DensityMatrix::maximally_mixed(2), 64, 1);
    CHECK_NOTHROW(job.validate());

    TomographyJob missing = job;
    missing.records.pop_back();
    CHECK_THROWS_AS(missing.validate(), TomographyError);

    TomographyJob dup = job;
    dup.records.back() = dup.records.front();
    CHECK_THROWS_AS(dup.validate(), TomographyError);

    TomographyJob uneven = job;
    uneven.records[2] = sample(DensityMatrix::maximally_mixed(2), uneven.records[2].setting, 65, 3);
    CHECK_THROWS_AS(uneven.validate(), TomographyError);

    TomographyJob angled = job;
    angled.records[0].setting[0] = Basis::angles(0.1, 0.2);
    CHECK_THROWS_AS(angled.validate(), TomographyError);

    TomographyJob bad_opts = job;
    bad_opts.options.dilution = 0.0;
    CHECK_THROWS_AS(bad_opts.validate(), TomographyError);
    CHECK_THROWS_AS(mle_reconstruct(missing), TomographyError);
}

TEST_CASE("single-qubit linear inversion") {
    std::mt19937_64 gen(61);
    const DensityMatrix rho{oracle::random_density(1, 2, gen)};
    std::vector<MeasRecord> recs;
    for (const Basis& b : {Basis::x(), Basis::y(), Basis::z()}) recs.push_back(sample(rho, {b}, 200000, 7 + recs.size()));
    const DensityMatrix est = qubit_tomography(recs);
    CHECK(trace_distance(est, rho) < 0.01);

    // all-zero outcomes put the Bloch vector at (1, 1, 1)
    std::vector<MeasRecord> corner;
    for (const Basis& b : {Basis::x(), Basis::y(), Basis::z()}) corner.push_back({{b}, {{"0", 10}}, 10, 0});
    const DensityMatrix clipped = qubit_tomography(corner);
    CHECK(clipped.eigenvalues().minCoeff() >= -1e-12);
    CHECK(clipped.matrix().trace().real() == doctest::Approx(1.0));

    corner.pop_back();
    CHECK_THROWS_AS(qubit_tomography(corner), TomographyError);
    CHECK_THROWS_AS(coherence_from_tomo(DensityMatrix::maximally_mixed(2)), TomographyError);
}

TEST_CASE("basis and record JSON round trip") {
    for (const Basis& b : {Basis::x(), Basis::y(), Basis::z(), Basis::angles(0.123456789012345678, 5.5)})
        CHECK(basis_from_json(basis_to_json(b)) == b);
    const MeasRecord r{{Basis::z(), Basis::angles(1.0, 2.0)}, {{"00", 3}, {"11", 5}}, 8, 42};
    const MeasRecord back = record_from_json(record_to_json(r));
    CHECK(back.setting == r.setting);
    CHECK(back.counts == r.counts);
    CHECK(back.shots == 8);
    CHECK(back.seed == 42);
    CHECK_THROWS_AS(basis_from_json(nlohmann::json("W")), FormatError);
    CHECK_THROWS_AS(record_from_json(nlohmann::json::parse(R"({"setting": ["Z"]})")), FormatError);
}

TEST_CASE("job directories round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "dlab_test_job";
    std::filesystem::remove_all(dir);
    TomographyJob job = sampled_job(DensityMatrix::maximally_mixed(2), 50, 9);
    job.options = {0.25, 123, 1e-5};
    save_tomography_job(job, dir);
    const TomographyJob back = load_tomography_job(dir);
    CHECK(back.num_qubits == 2);
    CHECK(back.options.dilution == 0.25);
    CHECK(back.options.max_iters == 123);
    CHECK(back.options.tol == 1e-5);
    REQUIRE(back.records.size() == job.records.size());
    for (std::size_t i = 0; i < job.records.size(); ++i) {
        CHECK(back.records[i].setting == job.records[i].setting);
        CHECK(back.records[i].counts == job.records[i].counts);
    }
    std::filesystem::remove(dir / "manifest.json");
    CHECK_THROWS(load_tomography_job(dir));
    std::filesystem::remove_all(dir);
}

TEST_CASE("matrix text round trip is bit exact") {
    std::mt19937_64 gen(67);
    const Mat m = oracle::random_density(2, 2, gen);
    const Mat back = matrix_from_text("# header\n" + matrix_to_text(m));
    CHECK(back == m);
    CHECK_THROWS_AS(matrix_from_text("1 0 2\n"), FormatError);
    CHECK_THROWS_AS(matrix_from_text("1 0\n1 0 0 0\n"), FormatError);
}
