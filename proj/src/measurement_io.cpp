#include "dlab/measurement_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dlab {

using nlohmann::json;

json basis_to_json(const Basis& b) {
    switch (b.kind) {
        case Basis::Kind::X: return "X";
        case Basis::Kind::Y: return "Y";
        case Basis::Kind::Z: return "Z";
        case Basis::Kind::Angles: break;
    }
    return json{{"phi", b.phi}, {"xi", b.xi}};
}

Basis basis_from_json(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "X") return Basis::x();
        if (s == "Y") return Basis::y();
        if (s == "Z") return Basis::z();
        throw FormatError("unknown basis '" + s + "'");
    }
    if (j.is_object() && j.contains("phi") && j.contains("xi") && j["phi"].is_number() && j["xi"].is_number())
        return Basis::angles(j["phi"].get<double>(), j["xi"].get<double>());
    throw FormatError("basis must be X, Y, Z or {phi, xi}");
}

json record_to_json(const MeasRecord& r) {
    json setting = json::array();
    for (const Basis& b : r.setting) setting.push_back(basis_to_json(b));
    json counts = json::object();
    for (const auto& [bits, n] : r.counts) counts[bits] = n;
    return json{{"setting", setting}, {"shots", r.shots}, {"seed", r.seed}, {"counts", counts}};
}

MeasRecord record_from_json(const json& j) {
    if (!j.is_object()) throw FormatError("record must be a JSON object");
    for (const char* key : {"setting", "shots", "counts"})
        if (!j.contains(key)) throw FormatError(std::string("record is missing '") + key + "'");
    MeasRecord r;
    if (!j["setting"].is_array()) throw FormatError("record setting must be an array");
    for (const json& b : j["setting"]) r.setting.push_back(basis_from_json(b));
    if (!j["shots"].is_number_integer()) throw FormatError("record shots must be an integer");
    r.shots = j["shots"].get<std::int64_t>();
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            throw FormatError("record seed must be an integer");
        r.seed = j["seed"].get<std::uint64_t>();
    }
    if (!j["counts"].is_object()) throw FormatError("record counts must be an object");
    for (const auto& [bits, n] : j["counts"].items()) {
        if (!n.is_number_integer()) throw FormatError("count for '" + bits + "' must be an integer");
        r.counts.emplace(bits, n.get<std::int64_t>());
    }
    return r;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw FormatError("write failed for " + path.string());
}

void save_tomography_job(const TomographyJob& job, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json files = json::array();
    for (std::size_t i = 0; i < job.records.size(); ++i) {
        const std::string name = "record_" + std::to_string(i) + ".json";
        write_file(dir / name, record_to_json(job.records[i]).dump(2) + "\n");
        files.push_back(name);
    }
    const json manifest{{"num_qubits", job.num_qubits},
                        {"dilution", job.options.dilution},
                        {"max_iters", job.options.max_iters},
                        {"tol", job.options.tol},
                        {"records", files}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

TomographyJob load_tomography_job(const std::filesystem::path& dir) {
    json manifest;
    try {
        manifest = json::parse(read_file(dir / "manifest.json"));
    } catch (const json::parse_error& e) {
        throw FormatError("manifest.json: " + std::string(e.what()));
    }
    if (!manifest.is_object() || !manifest.contains("num_qubits") || !manifest["num_qubits"].is_number_integer())
        throw FormatError("manifest.json needs an integer num_qubits");
    if (!manifest.contains("records") || !manifest["records"].is_array())
        throw FormatError("manifest.json needs a records array");
    TomographyJob job;
    job.num_qubits = manifest["num_qubits"].get<int>();
    if (manifest.contains("dilution")) job.options.dilution = manifest["dilution"].get<double>();
    if (manifest.contains("max_iters")) job.options.max_iters = manifest["max_iters"].get<int>();
    if (manifest.contains("tol")) job.options.tol = manifest["tol"].get<double>();
    for (const json& f : manifest["records"]) {
        if (!f.is_string()) throw FormatError("manifest records must be file names");
        const auto name = f.get<std::string>();
        try {
            job.records.push_back(record_from_json(json::parse(read_file(dir / name))));
        } catch (const json::parse_error& e) {
            throw FormatError(name + ": " + e.what());
        }
    }
    return job;
}

std::string matrix_to_text(const Mat& m) {
    std::string out;
    char buf[64];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%s%.17g %.17g", c == 0 ? "" : "  ", m(r, c).real(), m(r, c).imag());
            out += buf;
        }
        out += '\n';
    }
    return out;
}

Mat matrix_from_text(std::string_view text) {
    std::vector<std::vector<cplx>> rows;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.starts_with('#')) continue;
        std::istringstream ls(line);
        std::vector<cplx> row;
        double re = 0.0;
        double im = 0.0;
        while (ls >> re) {
            if (!(ls >> im)) throw FormatError("line " + std::to_string(lineno) + ": odd number of values");
            row.emplace_back(re, im);
        }
        if (!ls.eof()) throw FormatError("line " + std::to_string(lineno) + ": not a number");
        if (row.empty()) continue;
        if (!rows.empty() && row.size() != rows.front().size())
            throw FormatError("line " + std::to_string(lineno) + ": ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError("empty matrix");
    Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
}

}  // namespace dlab
