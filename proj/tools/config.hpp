// config.hpp: experiment configuration for the dlab runner.

#pragma once

#include "dlab/circuit.hpp"
#include "dlab/darwinism.hpp"
#include "dlab/scm_model.hpp"
#include "dlab/simulator.hpp"
#include "dlab/tomography.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlab::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fully resolved experiment: every default filled in, every preset expanded.
struct ExperimentConfig {
    ScmParams model;
    std::vector<double> times;
    std::vector<std::string> time_labels;  // preset name or empty
    std::int64_t shots = 8192;
    std::uint64_t seed = 1;
    NoiseModel noise;
    std::string coupling_map = "casablanca";
    std::vector<PartitionMode> partitions;
    int phi_steps = 61;
    int xi_steps = 61;
    int fraction = 1;  // units in the CMI fraction
    bool tomography = false;
    std::string job_dir;  // tomo: reconstruct this job instead of simulating
    MleOptions mle;
    std::string outputs = "dlab_out";

    // Canonical JSON form embedded in every output. The output directory is
    // left out so reruns into different directories stay byte-identical.
    nlohmann::json to_json() const;
};

// Parses and validates a config document. Messages name the offending key
// and, when it can be located, its line in `text`.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");

CouplingMap resolve_coupling_map(const ExperimentConfig& cfg);

}  // namespace dlab::cli
