// commands.hpp: dlab subcommands.

#pragma once

#include "config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dlab::cli {

inline constexpr const char* kVersion = "1.0.0";

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Run {
    std::string command;
    ExperimentConfig cfg;
    std::filesystem::path out;
    int jobs = 1;
    std::vector<std::string> files;  // written so far, relative to out

    // Writes a file under out and records it for the manifest.
    void emit(const std::string& name, const std::string& contents);
    // "# ..." provenance lines every text output starts with.
    std::string header() const;
    void write_manifest() const;
};

void cmd_coherence(Run& run);
void cmd_darwinism(Run& run);
void cmd_cmi(Run& run);
void cmd_compare(Run& run);
void cmd_route(Run& run);
void cmd_tomo(Run& run);

}  // namespace dlab::cli
