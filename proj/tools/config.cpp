#include "config.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <set>
#include <sstream>

namespace dlab::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kKeys{"scenario", "n",         "theta",     "lam",        "times",    "shots",
                                  "seed",     "noise",     "coupling_map", "partition", "outputs", "phi_steps",
                                  "xi_steps", "fraction",  "tomography", "job_dir",   "mle"};

class Locator {
public:
    Locator(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        std::ostringstream os;
        os << source_;
        if (const int line = line_of(key); line > 0) os << ":" << line;
        os << ": key '" << key << "': " << what;
        throw ConfigError(os.str());
    }

    [[noreturn]] void parse_failure(std::size_t byte, const std::string& what) const {
        int line = 1;
        int col = 1;
        for (std::size_t i = 0; i < std::min(byte, text_.size()); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(source_ + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
    }

private:
    int line_of(const std::string& key) const {
        const std::string quoted = "\"" + key.substr(key.rfind('.') + 1) + "\"";
        const auto pos = text_.find(quoted);
        if (pos == std::string::npos) return 0;
        return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
    }

    const std::string& text_;
    std::string source_;
};

double number(const json& j, const std::string& key, const Locator& loc) {
    if (!j.is_number()) loc.fail(key, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) loc.fail(key, "must be finite");
    return v;
}

std::int64_t integer(const json& j, const std::string& key, const Locator& loc, std::int64_t min) {
    if (!j.is_number_integer()) loc.fail(key, "expected an integer");
    const auto v = j.get<std::int64_t>();
    if (v < min) loc.fail(key, "must be at least " + std::to_string(min));
    return v;
}

std::pair<double, std::string> time_value(const json& j, const Locator& loc) {
    const CanonicalTimes c = canonical_times();
    if (j.is_number()) {
        const double t = number(j, "times", loc);
        if (t < 0.0) loc.fail("times", "times must be non-negative");
        return {t, ""};
    }
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        s.erase(0, s.find_first_not_of(' '));
        s.erase(s.find_last_not_of(' ') + 1);
        if (s == "t_max") return {c.t_max, s};
        if (s == "t_close") return {c.t_close, s};
        if (s == "t_rec") return {c.t_rec, s};
        loc.fail("times", "unknown preset '" + s + "' (expected t_max, t_close or t_rec)");
    }
    loc.fail("times", "entries must be numbers or preset names");
}

void resolve_times(const json& j, ExperimentConfig& cfg, const Locator& loc) {
    auto push = [&](const json& e) {
        const auto [t, label] = time_value(e, loc);
        cfg.times.push_back(t);
        cfg.time_labels.push_back(label);
    };
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            if (k != "start" && k != "stop" && k != "count") loc.fail("times." + k, "unknown grid field");
        if (!j.contains("start") || !j.contains("stop") || !j.contains("count"))
            loc.fail("times", "grid needs start, stop and count");
        const double start = number(j["start"], "times.start", loc);
        const double stop = number(j["stop"], "times.stop", loc);
        const auto count = integer(j["count"], "times.count", loc, 1);
        if (start < 0.0 || stop < start) loc.fail("times", "grid needs 0 <= start <= stop");
        const TimeGrid grid = TimeGrid::uniform(start, stop, static_cast<int>(count));
        for (double t : grid.times()) {
            cfg.times.push_back(t);
            cfg.time_labels.emplace_back();
        }
    } else if (j.is_array()) {
        if (j.empty()) loc.fail("times", "list is empty");
        for (const json& e : j) push(e);
    } else if (j.is_string()) {
        std::stringstream ss(j.get<std::string>());
        std::string item;
        while (std::getline(ss, item, ',')) push(json(item));
    } else {
        push(j);
    }
}

}  // namespace

json ExperimentConfig::to_json() const {
    json t = json::array();
    for (std::size_t i = 0; i < times.size(); ++i)
        t.push_back(time_labels[i].empty() ? json(times[i]) : json(time_labels[i]));
    json parts = json::array();
    for (PartitionMode m : partitions) parts.push_back(to_string(m));
    return json{{"scenario", model.scenario == Scenario::Full ? "full" : "condensed"},
                {"n", model.n},
                {"theta", model.theta},
                {"lam", model.lam},
                {"times", t},
                {"shots", shots},
                {"seed", seed},
                {"noise",
                 {{"depol_1q", noise.depol_1q},
                  {"depol_2q", noise.depol_2q},
                  {"amp_damp_gamma", noise.amp_damp_gamma},
                  {"readout_flip", noise.readout_flip},
                  {"idle", noise.idle}}},
                {"coupling_map", coupling_map},
                {"partition", parts},
                {"phi_steps", phi_steps},
                {"xi_steps", xi_steps},
                {"fraction", fraction},
                {"tomography", tomography},
                {"job_dir", job_dir},
                {"mle", {{"dilution", mle.dilution}, {"max_iters", mle.max_iters}, {"tol", mle.tol}}}};
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    const Locator loc(text, source);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        loc.parse_failure(e.byte == 0 ? 0 : e.byte - 1, "invalid JSON");
    }
    if (!doc.is_object()) throw ConfigError(source + ": config must be a JSON object");
    for (const auto& [k, v] : doc.items())
        if (!kKeys.contains(k)) loc.fail(k, "unknown key");

    ExperimentConfig cfg;
    if (doc.contains("scenario")) {
        const json& s = doc["scenario"];
        if (s == "full") cfg.model.scenario = Scenario::Full;
        else if (s == "condensed") cfg.model.scenario = Scenario::Condensed;
        else loc.fail("scenario", "expected \"full\" or \"condensed\"");
    } else {
        cfg.model.scenario = Scenario::Condensed;
    }
    if (doc.contains("n")) cfg.model.n = static_cast<int>(integer(doc["n"], "n", loc, 1));
    if (doc.contains("theta")) cfg.model.theta = number(doc["theta"], "theta", loc);
    if (doc.contains("lam")) cfg.model.lam = number(doc["lam"], "lam", loc);
    if (!(cfg.model.lam > 0.0)) loc.fail("lam", "rate must be positive");
    try {
        cfg.model.validate();
    } catch (const ModelError& e) {
        loc.fail("theta", e.what());
    }
    if (layout::num_qubits(cfg.model) > kStatevectorQubitLimit) loc.fail("n", "register exceeds the simulator limit");

    if (doc.contains("times")) {
        resolve_times(doc["times"], cfg, loc);
    } else {
        const TimeGrid grid = TimeGrid::uniform(0.0, std::log(6.0), 31);
        for (double t : grid.times()) {
            cfg.times.push_back(t);
            cfg.time_labels.emplace_back();
        }
    }
    if (doc.contains("shots")) cfg.shots = integer(doc["shots"], "shots", loc, 1);
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) loc.fail("seed", "expected a non-negative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("noise")) {
        const json& nz = doc["noise"];
        if (!nz.is_object()) loc.fail("noise", "expected an object");
        for (const auto& [k, v] : nz.items()) {
            const std::string key = "noise." + k;
            if (k == "depol_1q") cfg.noise.depol_1q = number(v, key, loc);
            else if (k == "depol_2q") cfg.noise.depol_2q = number(v, key, loc);
            else if (k == "amp_damp_gamma") cfg.noise.amp_damp_gamma = number(v, key, loc);
            else if (k == "readout_flip") cfg.noise.readout_flip = number(v, key, loc);
            else if (k == "idle") {
                if (!v.is_boolean()) loc.fail(key, "expected true or false");
                cfg.noise.idle = v.get<bool>();
            } else loc.fail(key, "unknown noise field");
            try {
                cfg.noise.validate();
            } catch (const SimulationError& e) {
                loc.fail(key, e.what());
            }
        }
    }
    if (doc.contains("coupling_map")) {
        if (!doc["coupling_map"].is_string()) loc.fail("coupling_map", "expected a name or a file path");
        cfg.coupling_map = doc["coupling_map"].get<std::string>();
    }
    try {
        resolve_coupling_map(cfg);
    } catch (const std::exception& e) {
        loc.fail("coupling_map", e.what());
    }
    if (doc.contains("partition")) {
        const json& p = doc["partition"];
        const json list = p.is_array() ? p : json::array({p});
        if (list.empty()) loc.fail("partition", "list is empty");
        for (const json& e : list) {
            if (!e.is_string()) loc.fail("partition", "expected scheme labels");
            try {
                cfg.partitions.push_back(partition_mode_from_string(e.get<std::string>()));
            } catch (const AnalysisError& err) {
                loc.fail("partition", err.what());
            }
        }
    } else {
        cfg.partitions.push_back(PartitionMode::PerPair);
    }
    for (PartitionMode m : cfg.partitions)
        if (m == PartitionMode::AncillaeOnly && cfg.model.scenario != Scenario::Full)
            loc.fail("partition", "AncillaeOnly needs the full scenario");
    if (doc.contains("phi_steps")) cfg.phi_steps = static_cast<int>(integer(doc["phi_steps"], "phi_steps", loc, 2));
    if (doc.contains("xi_steps")) cfg.xi_steps = static_cast<int>(integer(doc["xi_steps"], "xi_steps", loc, 2));
    if (doc.contains("fraction")) {
        cfg.fraction = static_cast<int>(integer(doc["fraction"], "fraction", loc, 1));
        if (cfg.fraction > cfg.model.n) loc.fail("fraction", "exceeds the number of pairs");
    }
    if (doc.contains("tomography")) {
        if (!doc["tomography"].is_boolean()) loc.fail("tomography", "expected true or false");
        cfg.tomography = doc["tomography"].get<bool>();
    }
    if (doc.contains("job_dir")) {
        if (!doc["job_dir"].is_string()) loc.fail("job_dir", "expected a directory path");
        cfg.job_dir = doc["job_dir"].get<std::string>();
    }
    if (doc.contains("mle")) {
        const json& m = doc["mle"];
        if (!m.is_object()) loc.fail("mle", "expected an object");
        for (const auto& [k, v] : m.items()) {
            const std::string key = "mle." + k;
            if (k == "dilution") cfg.mle.dilution = number(v, key, loc);
            else if (k == "max_iters") cfg.mle.max_iters = static_cast<int>(integer(v, key, loc, 1));
            else if (k == "tol") cfg.mle.tol = number(v, key, loc);
            else loc.fail(key, "unknown mle field");
        }
        if (!(cfg.mle.dilution > 0.0 && cfg.mle.dilution <= 1.0)) loc.fail("mle.dilution", "must lie in (0, 1]");
        if (cfg.mle.tol < 0.0) loc.fail("mle.tol", "must be non-negative");
    }
    if (doc.contains("outputs")) {
        if (!doc["outputs"].is_string() || doc["outputs"].get<std::string>().empty())
            loc.fail("outputs", "expected a directory path");
        cfg.outputs = doc["outputs"].get<std::string>();
    }
    return cfg;
}

CouplingMap resolve_coupling_map(const ExperimentConfig& cfg) {
    if (std::filesystem::exists(cfg.coupling_map)) return CouplingMap::load(cfg.coupling_map);
    return CouplingMap::builtin(cfg.coupling_map);
}

}  // namespace dlab::cli
