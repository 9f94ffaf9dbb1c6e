#include "commands.hpp"

#include "dlab/measurement_io.hpp"
#include "dlab/parallel.hpp"
#include "dlab/routing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <variant>

namespace dlab::cli {

using nlohmann::json;

namespace {

using AnyState = std::variant<PureState, DensityMatrix>;

struct Variant {
    std::string name;
    AnyState state;
};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v == 0.0 ? 0.0 : v);  // no "-0"
    return buf;
}

std::string csv_row(std::initializer_list<std::string> cells) {
    std::string s;
    for (const auto& c : cells) {
        if (!s.empty()) s += ',';
        s += c;
    }
    return s + '\n';
}

std::string label_of(const ExperimentConfig& cfg, std::size_t i) { return cfg.time_labels[i]; }

bool circuits_available(const ExperimentConfig& cfg) { return cfg.model.non_entangling(); }

// Noisy execution of the experiment circuit, or nullopt for a silent model.
std::optional<DensityMatrix> noisy_state(double t, const ExperimentConfig& cfg) {
    if (cfg.noise.silent()) return std::nullopt;
    if (!circuits_available(cfg)) throw NumericalError("noisy runs need non-entangling collisions (theta = pi)");
    return run_density(build_circuit(t, cfg.model), cfg.noise);
}

// Sampled records of every Pauli setting, reconstructed by MLE.
DensityMatrix reconstruct(const AnyState& truth, const ExperimentConfig& cfg, std::uint64_t stream, int jobs) {
    const int n = std::visit([](const auto& s) { return s.num_qubits(); }, truth);
    TomographyJob job;
    job.num_qubits = n;
    job.options = cfg.mle;
    const auto settings = pauli_settings(n);
    job.records.resize(settings.size());
    parallel_for(settings.size(), jobs, [&](std::size_t k) {
        const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, stream), k);
        job.records[k] = std::visit(
            [&](const auto& s) { return sample(s, settings[k], cfg.shots, seed, cfg.noise.readout_flip); }, truth);
    });
    return mle_reconstruct(job).state;
}

std::vector<Variant> variants(double t, std::size_t time_index, const ExperimentConfig& cfg, int jobs) {
    std::vector<Variant> out;
    out.push_back({"ideal", ideal_global_state(t, cfg.model)});
    if (auto noisy = noisy_state(t, cfg)) out.push_back({"noisy", std::move(*noisy)});
    if (cfg.tomography) {
        const AnyState& source = out.back().state;
        out.push_back({"tomography", reconstruct(source, cfg, 1000 + time_index, jobs)});
    }
    return out;
}

QubitSet first_units(const PartitionScheme& scheme, int count) {
    QubitSet frac;
    for (int u = 0; u < count; ++u) {
        const QubitSet& unit = scheme.units[static_cast<std::size_t>(u)];
        frac.insert(frac.end(), unit.begin(), unit.end());
    }
    return frac;
}

}  // namespace

void Run::emit(const std::string& name, const std::string& contents) {
    const auto path = out / name;
    std::filesystem::create_directories(path.parent_path());
    write_file(path, contents);
    files.push_back(name);
}

std::string Run::header() const {
    return "# dlab " + std::string(kVersion) + " " + command + "\n# seed: " + std::to_string(cfg.seed) +
           "\n# config: " + cfg.to_json().dump() + "\n";
}

void Run::write_manifest() const {
    std::vector<std::string> sorted = files;
    std::sort(sorted.begin(), sorted.end());
    const json m{{"tool", "dlab"},     {"version", kVersion}, {"command", command},
                 {"seed", cfg.seed},   {"config", cfg.to_json()}, {"files", sorted}};
    write_file(out / "manifest.json", m.dump(2) + "\n");
}

void cmd_coherence(Run& run) {
    const ExperimentConfig& cfg = run.cfg;
    const std::size_t count = cfg.times.size();
    std::vector<std::string> rows(count);
    parallel_for(count, run.jobs, [&](std::size_t i) {
        const double t = cfg.times[i];
        const int sys[] = {layout::kSystem};
        const double simulated =
            circuits_available(cfg)
                ? coherence_from_tomo(partial_trace(run_statevector(build_circuit(t, cfg.model)), sys))
                : coherence_from_tomo(partial_trace(ideal_global_state(t, cfg.model), sys));
        const auto noisy = noisy_state(t, cfg);
        const DensityMatrix rho_s = noisy ? partial_trace(*noisy, sys)
                                          : partial_trace(ideal_global_state(t, cfg.model), sys);
        std::vector<MeasRecord> records;
        for (std::uint64_t axis = 0; axis < 3; ++axis) {
            const MeasSetting setting{axis == 0 ? Basis::x() : axis == 1 ? Basis::y() : Basis::z()};
            records.push_back(sample(rho_s, setting, cfg.shots, derive_seed(derive_seed(cfg.seed, i), axis),
                                     cfg.noise.readout_flip));
        }
        const double c_tomo = coherence_from_tomo(qubit_tomography(records));
        const double stderr_c = std::sqrt(std::max(0.0, 1.0 - c_tomo * c_tomo) / static_cast<double>(cfg.shots));
        rows[i] = csv_row({num(t), label_of(cfg, i), num(collision_probability(t, cfg.model)),
                           num(coherence_finite(t, cfg.model)), num(coherence_markovian(t, cfg.model)),
                           num(simulated), num(coherence_from_tomo(rho_s)), num(c_tomo), num(stderr_c)});
    });
    std::string csv = run.header() + "t,label,p,c_analytic,c_markovian,c_simulated,c_noisy,c_tomography,c_tomography_stderr\n";
    for (const auto& r : rows) csv += r;
    std::vector<std::pair<double, double>> curve;
    for (double t : cfg.times) curve.emplace_back(t, coherence_finite(t, cfg.model));
    std::string blp = run.header() + "curve,blp_witness\n";
    const bool ascending = std::is_sorted(cfg.times.begin(), cfg.times.end(), std::less_equal<>());
    if (curve.size() >= 2 && ascending) {
        blp += csv_row({"analytic", num(blp_witness(curve))});
        for (auto& [t, c] : curve) c = coherence_markovian(t, cfg.model);
        blp += csv_row({"markovian", num(blp_witness(curve))});
    }
    run.emit("coherence.csv", csv);
    run.emit("blp.csv", blp);
}

void cmd_darwinism(Run& run) {
    const ExperimentConfig& cfg = run.cfg;
    std::vector<std::string> blocks(cfg.times.size());
    for (std::size_t i = 0; i < cfg.times.size(); ++i) {
        const double t = cfg.times[i];
        for (const Variant& v : variants(t, i, cfg, run.jobs))
            for (PartitionMode mode : cfg.partitions) {
                const PartitionScheme scheme = PartitionScheme::for_model(cfg.model, mode);
                const MiCurve curve = std::visit(
                    [&](const auto& s) { return averaged_qmi(s, {layout::kSystem}, scheme, run.jobs); }, v.state);
                for (const MiPoint& pt : curve.points)
                    blocks[i] += csv_row({num(t), label_of(cfg, i), v.name, to_string(mode), std::to_string(pt.f),
                                          num(pt.value), num(pt.std_error)});
            }
    }
    std::string csv = run.header() + "t,label,variant,partition,f,value,stderr\n";
    for (const auto& b : blocks) csv += b;
    run.emit("darwinism.csv", csv);
}

void cmd_cmi(Run& run) {
    const ExperimentConfig& cfg = run.cfg;
    const PartitionScheme scheme = PartitionScheme::for_model(cfg.model, cfg.partitions.front());
    if (cfg.fraction > static_cast<int>(scheme.num_units())) throw NumericalError("fraction exceeds the partition units");
    const QubitSet frac = first_units(scheme, cfg.fraction);
    std::string csv = run.header() + "kind,t,label,variant,phi,xi,value\n";
    for (std::size_t i = 0; i < cfg.times.size(); ++i) {
        const double t = cfg.times[i];
        for (const Variant& v : variants(t, i, cfg, run.jobs)) {
            const BasisGrid g = std::visit(
                [&](const auto& s) {
                    return cmi_grid(s, {layout::kSystem}, frac, cfg.phi_steps, cfg.xi_steps, run.jobs);
                },
                v.state);
            for (int a = 0; a < g.phi_steps; ++a)
                for (int b = 0; b < g.xi_steps; ++b)
                    csv += csv_row({"grid", num(t), label_of(cfg, i), v.name, num(g.phi(a)), num(g.xi(b)),
                                    num(g.values(a, b))});
            const auto [a, b] = g.argmax();
            csv += csv_row({"argmax", num(t), label_of(cfg, i), v.name, num(g.phi(a)), num(g.xi(b)),
                            num(g.values(a, b))});
        }
    }
    run.emit("cmi.csv", csv);
}

void cmd_compare(Run& run) {
    ExperimentConfig cfg = run.cfg;
    const CanonicalTimes ct = canonical_times();
    const std::vector<std::pair<std::string, double>> times{
        {"t_max", ct.t_max}, {"t_close", ct.t_close}, {"t_rec", ct.t_rec}};
    const PartitionScheme scheme = PartitionScheme::for_model(cfg.model, cfg.partitions.front());
    // Holevo and CMI are evaluated on the first f units; qmi_avg averages
    // over every fraction of that size.
    std::string csv = run.header() + "label,t,variant,f,fraction,qmi,qmi_avg,holevo,cmi_max,cmi_phi,cmi_xi\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto& [label, t] = times[i];
        for (const Variant& v : variants(t, 2000 + i, cfg, run.jobs)) {
            const int units = static_cast<int>(scheme.num_units());
            const QubitSet sys{layout::kSystem};
            const MiCurve avg = std::visit([&](const auto& s) { return averaged_qmi(s, sys, scheme, run.jobs); }, v.state);
            std::vector<std::string> rows(static_cast<std::size_t>(units));
            for (int f = 1; f <= units; ++f) {
                const QubitSet frac = first_units(scheme, f);
                std::string frac_text;
                for (int q : frac) frac_text += (frac_text.empty() ? "" : " ") + std::to_string(q);
                std::visit(
                    [&](const auto& s) {
                        const BasisGrid g = cmi_grid(s, sys, frac, cfg.phi_steps, cfg.xi_steps, run.jobs);
                        const auto [a, b] = g.argmax();
                        rows[static_cast<std::size_t>(f - 1)] = csv_row(
                            {label, num(t), v.name, std::to_string(f), frac_text, num(qmi(s, sys, frac)),
                             num(avg.points[static_cast<std::size_t>(f - 1)].value), num(holevo_bound(s, sys, frac)),
                             num(g.values(a, b)), num(g.phi(a)), num(g.xi(b))});
                    },
                    v.state);
            }
            for (const auto& r : rows) csv += r;
        }
    }
    run.emit("compare.csv", csv);
}

void cmd_route(Run& run) {
    const ExperimentConfig& cfg = run.cfg;
    if (!circuits_available(cfg)) throw NumericalError("routing needs non-entangling collisions (theta = pi)");
    const CouplingMap map = resolve_coupling_map(cfg);
    const double t = cfg.times.front();
    const Circuit c = build_circuit(t, cfg.model);
    const RouteSearch search = route_search(c, map);
    const RoutedCircuit& rc = search.best;
    const RoutedCircuit opt = peephole_zero_swap(rc);

    auto layout_text = [](const std::vector<int>& l) {
        std::string s;
        for (int p : l) s += (s.empty() ? "" : " ") + std::to_string(p);
        return s;
    };
    std::string placements = run.header() + "system_physical,cnot_count,optimized_cnot_count,layout\n";
    for (const PlacementScore& s : search.per_system)
        placements += csv_row({std::to_string(s.system_physical), std::to_string(s.cnot_count),
                               std::to_string(s.optimized_cnot_count), layout_text(s.layout)});

    const bool fits = conforms(rc.circuit, map) && conforms(opt.circuit, map);
    json report{{"tool", "dlab"},
                {"version", kVersion},
                {"seed", cfg.seed},
                {"config", cfg.to_json()},
                {"t", t},
                {"logical_qubits", c.num_qubits()},
                {"physical_qubits", map.num_physical()},
                {"initial_layout", rc.initial_layout},
                {"final_layout", rc.final_layout},
                {"swap_count", rc.swap_count},
                {"cnot_count", rc.cnot_count},
                {"optimized_cnot_count", opt.cnot_count},
                {"conforms", fits}};
    bool equivalent = fits;
    if (rc.circuit.num_qubits() <= kUnitaryQubitLimit) {
        const double du = routing_unitary_deviation(c, rc);
        report["unitary_deviation"] = du;
        equivalent = equivalent && du < 1e-10;
    }
    const double ds = std::max(routing_state_deviation(c, rc), routing_state_deviation(c, opt));
    report["state_deviation"] = ds;
    equivalent = equivalent && ds < 1e-10;
    report["verdict"] = equivalent ? "equivalent" : "MISMATCH";

    run.emit("route_placements.csv", placements);
    run.emit("route_report.json", report.dump(2) + "\n");
    run.emit("routed.txt", run.header() + to_text(rc.circuit));
    run.emit("routed_optimized.txt", run.header() + to_text(opt.circuit));
    if (!equivalent) throw NumericalError("routed circuit failed the equivalence check");
}

void cmd_tomo(Run& run) {
    const ExperimentConfig& cfg = run.cfg;
    if (!cfg.job_dir.empty()) {
        TomographyJob job = load_tomography_job(cfg.job_dir);
        const MleResult r = mle_reconstruct(job);
        std::string trace = run.header() + "iteration,log_likelihood\n";
        for (std::size_t k = 0; k < r.log_likelihood.size(); ++k)
            trace += csv_row({std::to_string(k), num(r.log_likelihood[k])});
        const int sys[] = {0};
        const double purity = (r.state.matrix() * r.state.matrix()).trace().real();
        std::string summary = run.header() + "num_qubits,iterations,converged,purity,c_qubit0\n";
        summary += csv_row({std::to_string(job.num_qubits), std::to_string(r.iterations), r.converged ? "1" : "0",
                            num(purity), num(coherence_from_tomo(partial_trace(r.state, sys)))});
        run.emit("tomo_summary.csv", summary);
        run.emit("tomo_trace.csv", trace);
        run.emit("tomo_state.txt", run.header() + matrix_to_text(r.state.matrix()));
        return;
    }
    const std::size_t count = cfg.times.size();
    std::vector<std::string> rows(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = cfg.times[i];
        const PureState ideal = ideal_global_state(t, cfg.model);
        const auto noisy = noisy_state(t, cfg);
        const AnyState truth = noisy ? AnyState(*noisy) : AnyState(ideal);
        TomographyJob job;
        job.num_qubits = ideal.num_qubits();
        job.options = cfg.mle;
        const auto settings = pauli_settings(job.num_qubits);
        job.records.resize(settings.size());
        parallel_for(settings.size(), run.jobs, [&](std::size_t k) {
            const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, 3000 + i), k);
            job.records[k] = std::visit(
                [&](const auto& s) { return sample(s, settings[k], cfg.shots, seed, cfg.noise.readout_flip); },
                truth);
        });
        const std::string dir = "job_" + std::to_string(i);
        save_tomography_job(job, run.out / dir);
        run.files.push_back(dir + "/manifest.json");
        for (std::size_t k = 0; k < job.records.size(); ++k)
            run.files.push_back(dir + "/record_" + std::to_string(k) + ".json");

        const MleResult r = mle_reconstruct(job);
        const int sys[] = {layout::kSystem};
        rows[i] = csv_row({num(t), label_of(cfg, i), num(fidelity(r.state, DensityMatrix(ideal))),
                           num(coherence_from_tomo(partial_trace(r.state, sys))), num(coherence_finite(t, cfg.model)),
                           std::to_string(r.iterations), r.converged ? "1" : "0", num(r.log_likelihood.back())});
        run.emit("state_" + std::to_string(i) + ".txt", run.header() + matrix_to_text(r.state.matrix()));
    }
    std::string csv = run.header() + "t,label,fidelity_to_ideal,c_tomography,c_analytic,iterations,converged,log_likelihood\n";
    for (const auto& r : rows) csv += r;
    run.emit("tomo.csv", csv);
}

}  // namespace dlab::cli
