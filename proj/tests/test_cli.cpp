#include "config.hpp"

#include "dlab/measurement_io.hpp"

#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

using namespace dlab;
using namespace dlab::cli;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "exp.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(DLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "dlab_test_cli";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("defaults") {
    const ExperimentConfig cfg = parse_config("{}");
    CHECK(cfg.model.scenario == Scenario::Condensed);
    CHECK(cfg.model.n == 1);
    CHECK(cfg.times.size() == 31);
    CHECK(cfg.times.front() == 0.0);
    CHECK(cfg.times.back() == doctest::Approx(std::log(6.0)));
    CHECK(cfg.partitions == std::vector<PartitionMode>{PartitionMode::PerPair});
    CHECK(cfg.shots == 8192);
    CHECK(cfg.coupling_map == "casablanca");
}

TEST_CASE("time specifications") {
    const CanonicalTimes ct = canonical_times();
    const ExperimentConfig a = parse_config(R"({"times": "t_max, t_close,t_rec"})");
    CHECK(a.times == std::vector<double>{ct.t_max, ct.t_close, ct.t_rec});
    CHECK(a.time_labels == std::vector<std::string>{"t_max", "t_close", "t_rec"});
    const ExperimentConfig b = parse_config(R"({"times": [0.5, "t_rec", 2]})");
    CHECK(b.times == std::vector<double>{0.5, ct.t_rec, 2.0});
    const ExperimentConfig c = parse_config(R"({"times": {"start": 0, "stop": 1.8, "count": 4}})");
    REQUIRE(c.times.size() == 4);
    CHECK(c.times[1] == doctest::Approx(0.6));
    CHECK(c.times[3] == 1.8);
    CHECK(parse_config(R"({"times": 0.25})").times == std::vector<double>{0.25});
}

TEST_CASE("canonical JSON re-parses to the same experiment") {
    const ExperimentConfig cfg = parse_config(
        R"({"scenario": "full", "n": 2, "times": {"start": 0, "stop": 1, "count": 3}, "noise": {"depol_2q": 0.02},
            "partition": ["PerQubit", "AncillaeOnly"], "mle": {"tol": 1e-6}, "outputs": "elsewhere"})");
    const nlohmann::json j = cfg.to_json();
    CHECK_FALSE(j.contains("outputs"));
    const ExperimentConfig back = parse_config(j.dump());
    CHECK(back.to_json() == j);
    CHECK(back.times == cfg.times);
    CHECK(back.noise.depol_2q == 0.02);
}

TEST_CASE("errors name the key and its line") {
    CHECK(error_of("{\n  \"n\": 2,\n  \"shots\": 0\n}") == "exp.json:3: key 'shots': must be at least 1");
    CHECK(error_of("{\"colour\": 1}").find("key 'colour': unknown key") != std::string::npos);
    CHECK(error_of("{\n\"lam\": -1}").find("exp.json:2: key 'lam'") == 0);
    CHECK(error_of(R"({"scenario": "condensed", "theta": 1.0})").find("key 'theta'") != std::string::npos);
    CHECK(error_of(R"({"times": "t_maximum"})").find("unknown preset") != std::string::npos);
    CHECK(error_of(R"({"times": {"start": 1, "stop": 0, "count": 3}})").find("key 'times'") != std::string::npos);
    CHECK(error_of(R"({"noise": {"depol_1q": 2}})").find("key 'noise.depol_1q'") != std::string::npos);
    CHECK(error_of(R"({"noise": {"loud": 1}})").find("unknown noise field") != std::string::npos);
    CHECK(error_of(R"({"coupling_map": "nowhere"})").find("key 'coupling_map'") != std::string::npos);
    CHECK(error_of(R"({"partition": "AncillaeOnly"})").find("needs the full scenario") != std::string::npos);
    CHECK(error_of(R"({"n": 2, "fraction": 3})").find("key 'fraction'") != std::string::npos);
    CHECK(error_of(R"({"mle": {"dilution": 0}})").find("key 'mle.dilution'") != std::string::npos);
    CHECK(error_of(R"({"n": 20})").find("simulator limit") != std::string::npos);
    CHECK(error_of("{\n  \"n\": 2,\n  \"shots\": }") == "exp.json:3:12: invalid JSON");
    CHECK(error_of("[1, 2]").find("JSON object") != std::string::npos);
}

TEST_CASE("coupling maps load from files") {
    const auto path = scratch("ring.txt");
    write_file(path, "4\n0 1\n1 2\n2 3\n3 0\n");
    ExperimentConfig cfg = parse_config(R"({"coupling_map": ")" + path.string() + "\"}");
    CHECK(resolve_coupling_map(cfg).num_physical() == 4);
}

TEST_CASE("exit codes") {
    const auto good = scratch("good.json");
    write_file(good, R"({"n": 1, "times": "t_max", "shots": 64, "phi_steps": 3, "xi_steps": 2})");
    const auto out = scratch("out").string();
    CHECK(run_cli("coherence --config " + good.string() + " --out " + out) == 0);
    CHECK(std::filesystem::exists(std::filesystem::path(out) / "coherence.csv"));
    CHECK(std::filesystem::exists(std::filesystem::path(out) / "manifest.json"));

    const auto bad = scratch("bad.json");
    write_file(bad, R"({"n": 0})");
    CHECK(run_cli("coherence --config " + bad.string()) == 2);
    CHECK(run_cli("coherence --config " + scratch("missing.json").string()) == 2);
    CHECK(run_cli("coherence") == 2);
    CHECK(run_cli("teleport --config " + good.string()) == 2);

    const auto big = scratch("big.json");
    write_file(big, R"({"scenario": "full", "n": 4, "times": "t_max"})");
    CHECK(run_cli("route --config " + big.string() + " --out " + out) == 3);
    std::filesystem::remove_all(scratch(""));
}
