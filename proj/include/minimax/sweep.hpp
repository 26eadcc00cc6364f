#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "minimax/record.hpp"

namespace minimax {

// One grid axis: a dotted config path (e.g. "solver.lambda") or the special key "sigma", which
// sets solver.step = sigma / (1/lambda - 1) after all other axes are applied.
struct GridAxis {
  std::string key;
  std::vector<nlohmann::json> values;
};

struct SweepSpec {
  nlohmann::json base;  // config document
  std::vector<GridAxis> axes;
  std::int64_t repeats = 1;
  std::uint64_t seed_stride = 1;  // repeat r runs with seed base.seed + r * seed_stride
  std::size_t max_runs = 10000;
};

// Axis values are either an explicit array or {"start", "stop", "step"} (stop inclusive).
SweepSpec parse_sweep(std::string_view text);
SweepSpec load_sweep(const std::string& path);

struct SweepPoint {
  std::vector<nlohmann::json> values;  // one per axis
  std::int64_t repeat = 0;
  ExperimentConfig config;             // resolved
};

// Cartesian order: first axis outermost, repeats innermost.
std::size_t sweep_size(const SweepSpec& spec);
std::vector<SweepPoint> expand_sweep(const SweepSpec& spec, FieldConvention fallback,
                                     std::optional<std::uint64_t> seed_override = std::nullopt);

struct SweepRun {
  std::optional<RunRecord> record;
  std::string error;
};

struct SweepSummary {
  std::size_t runs = 0;
  std::size_t failures = 0;
};

// Runs every point on `workers` threads, writes run_NNNNN.json/.csv per point and index.csv.
SweepSummary run_sweep(const std::vector<SweepPoint>& points, const std::vector<GridAxis>& axes,
                       const std::filesystem::path& out_dir, unsigned workers);

}  // namespace minimax
