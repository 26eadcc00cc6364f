#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "minimax/games.hpp"
#include "minimax/solvers.hpp"
#include "minimax/toy_gan.hpp"

namespace minimax {

enum class GameKind { Quadratic, Bilinear, DiracGan };
std::string_view to_string(GameKind kind);
std::string_view to_string(DiracLoss loss);

struct GameConfig {
  GameKind kind = GameKind::Quadratic;
  double a = 1.0;  // quadratic only
  double c = 1.0;  // quadratic only
  std::vector<std::vector<double>> B{{0.0}};  // quadratic and bilinear, row-major
  DiracLoss loss = DiracLoss::Logistic;       // dirac_gan only
  // Compares only the fields the kind uses.
  bool operator==(const GameConfig& other) const;
};

OraclePtr make_game(const GameConfig& cfg);

struct AnalyzeOptions {
  std::optional<std::vector<double>> point;  // default: the game's first known equilibrium
  bool measure = false;                      // also run the contraction experiment
  std::int64_t iters = 2000;
  std::optional<std::vector<double>> start;  // default: equilibrium + 0.1 in every coordinate
  bool attach = false;                       // put a spectral report into `run` records
  bool operator==(const AnalyzeOptions&) const = default;
};

// Exactly one of `game` / `gan` is set. `solver.convention` (and gan->solver, gan->seed) mirror
// the top-level fields.
struct ExperimentConfig {
  std::optional<GameConfig> game;
  std::optional<ToyGanConfig> gan;
  SolverConfig solver;
  std::optional<FieldConvention> convention;
  std::optional<std::vector<double>> init;  // default: 0.1 in every coordinate
  std::int64_t iters = 1000;
  StoppingRule stop;
  std::uint64_t seed = 0;
  AnalyzeOptions analyze;
  bool operator==(const ExperimentConfig&) const = default;
};

// Strict: unknown keys, type mismatches and invalid values throw ConfigError with a
// "$.a.b"-style path.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig config_from_json(const nlohmann::json& j);

// Every field written explicitly, so parse_config(serialize_config(c)) == c.
nlohmann::json config_to_json(const ExperimentConfig& cfg);
std::string serialize_config(const ExperimentConfig& cfg);

// Fills the convention (if unset) and propagates convention and seed to the nested configs.
ExperimentConfig resolve(ExperimentConfig cfg, FieldConvention fallback);
void set_seed(ExperimentConfig& cfg, std::uint64_t seed);

ExperimentConfig load_config(const std::string& path);

}  // namespace minimax
