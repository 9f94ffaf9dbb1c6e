// measurement_io.hpp: JSON records, tomography job directories, matrix dumps.

#pragma once

#include "dlab/simulator.hpp"
#include "dlab/tomography.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace dlab {

class FormatError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Bases are written as "X", "Y", "Z" or {"phi": .., "xi": ..}.
nlohmann::json basis_to_json(const Basis& b);
Basis basis_from_json(const nlohmann::json& j);

nlohmann::json record_to_json(const MeasRecord& r);
MeasRecord record_from_json(const nlohmann::json& j);

// A job directory holds manifest.json plus one JSON file per record; the
// manifest lists num_qubits, dilution, max_iters, tol and the record files.
void save_tomography_job(const TomographyJob& job, const std::filesystem::path& dir);
TomographyJob load_tomography_job(const std::filesystem::path& dir);

// One matrix row per line as whitespace separated "re im" pairs, %.17g.
// The reader skips lines starting with '#'.
std::string matrix_to_text(const Mat& m);
Mat matrix_from_text(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace dlab
