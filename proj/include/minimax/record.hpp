#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "minimax/config.hpp"
#include "minimax/convergence.hpp"

namespace minimax {

struct RunRecord {
  ExperimentConfig config;  // resolved snapshot
  std::vector<TrajectoryRow> rows;
  Verdict verdict = Verdict::IterCap;
  std::vector<double> final_point;
  Index split = 0;
  std::vector<std::string> warnings;
  std::optional<SpectralReport> spectral;
};

// Runs run_solver (game configs) or train_toy_gan (gan configs). `cfg` should be resolved.
RunRecord execute_run(const ExperimentConfig& cfg);

struct AnalyzeResult {
  ExperimentConfig config;
  std::vector<double> point;
  SpectralReport report;
  std::optional<ContractionResult> contraction;
};

AnalyzeResult execute_analyze(const ExperimentConfig& cfg);

// Shortest round-trip decimal form (std::to_chars).
std::string format_double(double x);

nlohmann::json to_json(const SpectralReport& report);
nlohmann::json to_json(const AnalyzeResult& result);
// mask_timing replaces every wall_time by null for byte comparisons.
nlohmann::json to_json(const RunRecord& record, bool mask_timing = false);

// Header iter,wall_time,field_norm,distance,value,metric; absent optionals are empty cells.
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

std::filesystem::path csv_path_for(const std::filesystem::path& json_path);

// Writes the JSON record and its sibling CSV. Throws std::runtime_error on I/O failure.
void write_record(const RunRecord& record, const std::filesystem::path& json_path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Raw little-endian float64 parameters behind an 8-byte magic, a u64 little-endian header
// length and a UTF-8 JSON header.
struct Snapshot {
  nlohmann::json header;
  std::vector<double> values;
};

void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot);
Snapshot read_snapshot(const std::filesystem::path& path);
Snapshot gan_snapshot(const RunRecord& record);

}  // namespace minimax
