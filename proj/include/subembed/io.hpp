#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "subembed/distortion.hpp"
#include "subembed/ensembles.hpp"
#include "subembed/geometry.hpp"
#include "subembed/harness.hpp"

namespace subembed::io {

// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// Shortest decimal form that reads back to the same double ("%.17g" grade).
std::string format_double(double value);

// Matrix CSV: first line "m,n", then m lines of n comma-separated reals.
std::string matrix_to_csv(const RandomMatrix& matrix);
RandomMatrix matrix_from_csv(std::string_view text);
void store_matrix_csv(const RandomMatrix& matrix, const std::filesystem::path& path);
RandomMatrix load_matrix_csv(const std::filesystem::path& path);

// Family JSON: {"n": int, "members": [{"base": [...], "basis_columns": [[...], ...]}]}.
// Bases are re-orthonormalized on load; "base" may be omitted.
nlohmann::json family_to_json(const SubspaceFamily& family);
SubspaceFamily family_from_json(const nlohmann::json& doc);
SubspaceFamily load_family_json(const std::filesystem::path& path);

nlohmann::json ensemble_to_json(const EnsembleSpec& spec);
EnsembleSpec ensemble_from_json(const nlohmann::json& doc);

// Parses JSON text; syntax errors become IoError with line and column.
nlohmann::json parse_json(std::string_view text, std::string_view origin);

// Schema-checked config; unknown keys are rejected with ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);

std::string report_to_csv(const DistortionReport& report);
nlohmann::json report_summary(const DistortionReport& report, const ScaleChoice& scale);

nlohmann::json trial_to_json(const TrialResult& trial, bool with_timing);
std::string sweep_to_csv(const SweepResult& sweep);

// Points file: one point per line, comma-separated coordinates.
std::vector<Eigen::VectorXd> points_from_csv(std::string_view text);

}  // namespace subembed::io
