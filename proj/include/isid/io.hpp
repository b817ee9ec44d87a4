#pragma once

#include "isid/arma.hpp"
#include "isid/control.hpp"
#include "isid/noise_id.hpp"
#include "isid/okid.hpp"
#include "isid/plants.hpp"
#include "isid/realization.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace isid::io {

using Json = nlohmann::ordered_json;

// 17 significant digits, enough for an exact round trip.
std::string format_double(double v);

Json matrix_to_json(const Matrix& m);  // row-major nested arrays
Matrix matrix_from_json(const Json& j, const std::string& what);

// Header rollout,t,u_1..u_r,z_1..z_m; one row per (rollout, t) with t = 0..H,
// the input columns left empty on the t = H row.
void write_batch_csv(const std::filesystem::path& path, const RolloutBatch& batch);
// Metadata sidecar: plant, dimensions, seed, noise, initial-condition flag.
void write_batch_metadata(const std::filesystem::path& path, const RolloutBatch& batch);
// Reads a batch CSV and, when present, the sidecar with the same stem and a
// .json extension.
RolloutBatch read_batch(const std::filesystem::path& csv_path);

Json arma_model_to_json(const TvArmaModel& model);
TvArmaModel arma_model_from_json(const Json& j);
Json info_state_model_to_json(const InfoStateModel& model);

// Columns k, Y_1_1, Y_1_2, ... (row-major entries of each block).
void write_markov_csv(const std::filesystem::path& path, const std::vector<Matrix>& markov);

struct NoiseReportRow {
    int t = 0;
    int samples = 0;
    double corrected = 0.0;
    double uncorrected = 0.0;
};
void write_noise_report(const std::filesystem::path& path, const std::vector<NoiseReportRow>& rows);

void write_equivalence_csv(const std::filesystem::path& path, const EquivalenceReport& rep);
Json equivalence_summary(const EquivalenceReport& rep);

void write_mismatch_csv(const std::filesystem::path& path, const MismatchReport& rep);

// {"name": ..., "A": M or [M...], "B": ..., "C": ..., "horizon": H} where M is
// a row-major nested array. Single matrices need "horizon".
LtvSystem load_plant_json(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace isid::io
