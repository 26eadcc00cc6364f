#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "minimax/gn_precond.hpp"
#include "minimax/vecfield.hpp"

namespace minimax {

enum class SolverKind { GDA, SGA, ConOpt, OGDA, CGD, GN, GNAdaptive };

std::string_view to_string(SolverKind kind);
SolverKind parse_solver_kind(std::string_view name);
bool needs_hessian(SolverKind kind);

// gamma: SGA/ConOpt gradient correction. eta: OGDA/CGD coupling.
struct BaselineParams {
  double gamma = 0.1;
  double eta = 0.1;
  bool operator==(const BaselineParams&) const = default;
};

struct AdaptiveParams {
  double beta2 = 0.99;
  double epsilon = 1e-8;
  bool operator==(const AdaptiveParams&) const = default;
};

struct SolverConfig {
  SolverKind kind = SolverKind::GN;
  GNConfig gn;  // gn.step is the step size h for every kind
  BaselineParams baseline;
  AdaptiveParams adaptive;
  FieldConvention convention = FieldConvention::PaperOriented;
  // Std of additive Gaussian noise on both gradients (0 disables).
  double noise_std = 0.0;
  bool operator==(const SolverConfig&) const = default;
};

// Throws std::invalid_argument on bad values, returns warnings otherwise.
std::vector<std::string> validate(const SolverConfig& cfg);

// Second-moment state of the adaptive solver.
struct AdaptiveState {
  Vector theta;       // EMA of squared field entries, >= 0
  Vector last_field;  // v_{t-1}
  double beta2 = 0.99;
  double epsilon = 1e-8;
  std::uint64_t t = 0;

  bool initialized() const { return theta.size() > 0 && theta.size() == last_field.size(); }
};

// theta_0 = v_0^2, last_field = v_0.
AdaptiveState init_adaptive_state(const JointVector& v0, const AdaptiveParams& params);

// Delta = -(g - z) for the field v_t at the current point; advances state in place.
//   theta_t = beta2 theta_{t-1} + (1 - beta2) v_{t-1}^2
//   g_t = v_t / (sqrt(theta_t) + eps)
//   z = (lambda I + h g g^T)^-1 v_t
Vector adaptive_delta(const JointVector& v, AdaptiveState& state, const GNConfig& gn);

// Plain descent-ascent direction [-grad_x f; grad_y f] given a field in either convention.
inline Vector gda_delta(const JointVector& v, FieldConvention conv) {
  return conv == FieldConvention::PaperOriented ? Vector(-v) : v;
}

struct GameDerivatives {
  Vector gx;
  Vector gy;
  HessianBlocks hess;  // empty for GDA
};

GameDerivatives derivatives_at(const GameOracle& oracle, const ParamPoint& p, bool with_hessian);

inline constexpr Index kCgdMaxDim = 512;

// Delta of one of the Table-style baseline rules. The x block is the printed first-player
// rule; the y block applies the same rule to the max player's loss -f with roles swapped.
Vector baseline_delta(SolverKind kind, const GameDerivatives& d, const BaselineParams& params);

ParamPoint step_gn(const ParamPoint& p, const GameOracle& oracle, const SolverConfig& cfg);
std::pair<ParamPoint, AdaptiveState> step_gn_adaptive(const ParamPoint& p,
                                                      const AdaptiveState& state,
                                                      const GameOracle& oracle,
                                                      const SolverConfig& cfg);
ParamPoint step_baseline(const ParamPoint& p, const GameOracle& oracle, const SolverConfig& cfg);

// Holds whatever per-run state the configured rule needs.
class Stepper {
 public:
  Stepper(const GameOracle& oracle, SolverConfig cfg);
  ParamPoint step(const ParamPoint& p);
  const std::optional<AdaptiveState>& adaptive_state() const { return adaptive_; }

 private:
  const GameOracle& oracle_;
  SolverConfig cfg_;
  std::optional<AdaptiveState> adaptive_;
};

struct StoppingRule {
  double tol = 1e-8;     // |v| <= tol  -> Converged
  double blowup = 1e6;   // |p| >= blowup or non-finite -> Diverged
  // At the iteration cap, a run that ends with a larger |v| than it started with is Diverged
  // rather than IterCap (it moved away from every stationary point it could approach).
  bool growth_guard = true;
  bool operator==(const StoppingRule&) const = default;
};

enum class Verdict { Converged, Diverged, IterCap };
std::string_view to_string(Verdict verdict);
Verdict parse_verdict(std::string_view name);

struct TrajectoryRow {
  std::int64_t iter = 0;
  double wall_time = 0.0;  // seconds since the run started
  double field_norm = 0.0;
  std::optional<double> distance;  // to the nearest known equilibrium
  double value = 0.0;
  std::optional<double> metric;  // e.g. energy distance of a GAN run
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  Verdict verdict = Verdict::IterCap;
  ParamPoint final_point = ParamPoint(Vector(), 0);
};

// Noise (cfg.noise_std > 0) is drawn from a generator seeded with `seed`.
Trajectory run_solver(const ParamPoint& p0, const GameOracle& oracle, const SolverConfig& cfg,
                      std::int64_t iters, const StoppingRule& stop, std::uint64_t seed = 0);

}  // namespace minimax
