// dlab: collision-model experiment runner.

#include "commands.hpp"

#include "dlab/measurement_io.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <functional>
#include <map>

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

}  // namespace

int main(int argc, char** argv) {
    using namespace dlab::cli;
    CLI::App app{"Stochastic collision model workbench"};
    app.require_subcommand(1, 1);
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int jobs = 1;

    const std::map<std::string, std::pair<std::string, std::function<void(Run&)>>> commands{
        {"coherence", {"coherence factor versus time", cmd_coherence}},
        {"darwinism", {"averaged mutual information versus fraction size", cmd_darwinism}},
        {"cmi", {"classical mutual information over measurement bases", cmd_cmi}},
        {"compare", {"QMI, Holevo bound and best-basis CMI per fraction size", cmd_compare}},
        {"route", {"place and route the circuit on the coupling map", cmd_route}},
        {"tomo", {"maximum-likelihood tomography", cmd_tomo}},
    };
    std::map<std::string, CLI::App*> subs;
    CLI::Option* seed_opt = nullptr;
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        auto* s = sub->add_option("--seed", seed, "base seed (overrides the config)");
        if (!seed_opt) seed_opt = s;
        sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
        subs[name] = sub;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    Run run;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) run.command = name;
    run.jobs = jobs;
    try {
        run.cfg = parse_config(dlab::read_file(config_path), config_path);
        if (subs[run.command]->count("--seed") > 0) run.cfg.seed = seed;
        run.out = out_dir.empty() ? std::filesystem::path(run.cfg.outputs) : std::filesystem::path(out_dir);
        std::filesystem::create_directories(run.out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    }
    try {
        commands.at(run.command).second(run);
        run.write_manifest();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumericalError;
    }
    std::printf("%s: wrote %zu files to %s\n", run.command.c_str(), run.files.size() + 1, run.out.string().c_str());
    return 0;
}
