#include "minimax/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "minimax/errors.hpp"

namespace minimax {

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::GDA: return "gda";
    case SolverKind::SGA: return "sga";
    case SolverKind::ConOpt: return "conopt";
    case SolverKind::OGDA: return "ogda";
    case SolverKind::CGD: return "cgd";
    case SolverKind::GN: return "gn";
    case SolverKind::GNAdaptive: return "gn-adaptive";
  }
  return "?";
}

SolverKind parse_solver_kind(std::string_view name) {
  for (SolverKind k : {SolverKind::GDA, SolverKind::SGA, SolverKind::ConOpt, SolverKind::OGDA,
                       SolverKind::CGD, SolverKind::GN, SolverKind::GNAdaptive}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown solver kind '" + std::string(name) + "'");
}

bool needs_hessian(SolverKind kind) {
  return kind == SolverKind::SGA || kind == SolverKind::ConOpt || kind == SolverKind::OGDA ||
         kind == SolverKind::CGD;
}

std::vector<std::string> validate(const SolverConfig& cfg) {
  std::vector<std::string> warnings;
  if (cfg.kind == SolverKind::GN || cfg.kind == SolverKind::GNAdaptive) {
    warnings = validate(cfg.gn);
  } else if (!(cfg.gn.step > 0.0) || !std::isfinite(cfg.gn.step)) {
    throw std::invalid_argument("step size h must be finite and > 0");
  }
  if (!(cfg.baseline.gamma >= 0.0) || !std::isfinite(cfg.baseline.gamma)) {
    throw std::invalid_argument("gamma must be finite and >= 0");
  }
  if (!(cfg.baseline.eta >= 0.0) || !std::isfinite(cfg.baseline.eta)) {
    throw std::invalid_argument("eta must be finite and >= 0");
  }
  if (!(cfg.adaptive.beta2 >= 0.0 && cfg.adaptive.beta2 < 1.0)) {
    throw std::invalid_argument("beta2 must lie in [0, 1)");
  }
  if (!(cfg.adaptive.epsilon >= 0.0) || !std::isfinite(cfg.adaptive.epsilon)) {
    throw std::invalid_argument("epsilon must be finite and >= 0");
  }
  if (!(cfg.noise_std >= 0.0) || !std::isfinite(cfg.noise_std)) {
    throw std::invalid_argument("noise_std must be finite and >= 0");
  }
  return warnings;
}

AdaptiveState init_adaptive_state(const JointVector& v0, const AdaptiveParams& params) {
  require_finite(v0, "initial field");
  AdaptiveState s;
  s.theta = v0.array().square().matrix();
  s.last_field = v0;
  s.beta2 = params.beta2;
  s.epsilon = params.epsilon;
  s.t = 0;
  return s;
}

Vector adaptive_delta(const JointVector& v, AdaptiveState& state, const GNConfig& gn) {
  if (!state.initialized()) {
    throw std::logic_error("adaptive solver state used before initialisation");
  }
  if (v.size() != state.theta.size()) {
    throw DimensionError("adaptive state has length " + std::to_string(state.theta.size()) +
                         " but the field has length " + std::to_string(v.size()));
  }
  state.theta = state.beta2 * state.theta +
                (1.0 - state.beta2) * state.last_field.array().square().matrix();
  const Eigen::ArrayXd denom = state.theta.array().sqrt() + state.epsilon;
  if ((denom == 0.0).any()) {
    throw std::domain_error("adaptive scaling undefined: theta and epsilon are both zero");
  }
  const Vector g = (v.array() / denom).matrix();
  const Vector z = sm_solve_scaled(v, g, gn.step, gn.lambda);
  state.last_field = v;
  ++state.t;
  return z - g;
}

GameDerivatives derivatives_at(const GameOracle& oracle, const ParamPoint& p, bool with_hessian) {
  require_dims(oracle, p);
  const Vector x = p.x();
  const Vector y = p.y();
  GameDerivatives d{oracle.grad_x(x, y), oracle.grad_y(x, y), {}};
  require_finite(d.gx, "grad_x");
  require_finite(d.gy, "grad_y");
  if (with_hessian) {
    if (!oracle.has_hessian()) {
      throw CapabilityError("second-order update rule needs Hessian blocks from the oracle");
    }
    d.hess = oracle.hessian(x, y);
  }
  return d;
}

namespace {

Vector cgd_block(const Matrix& coupling, const Vector& rhs, double eta) {
  // (I + eta^2 M M^T) delta = rhs
  const Index k = coupling.rows();
  const Matrix system = Matrix::Identity(k, k) + eta * eta * coupling * coupling.transpose();
  Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("CGD linear system is singular");
  }
  Vector delta = llt.solve(rhs);
  const double residual = (system * delta - rhs).norm();
  if (!std::isfinite(residual) || residual > 1e-10 * std::max(1.0, rhs.norm())) {
    throw std::runtime_error("CGD linear system is numerically singular (residual " +
                             std::to_string(residual) + ")");
  }
  return delta;
}

}  // namespace

Vector baseline_delta(SolverKind kind, const GameDerivatives& d, const BaselineParams& params) {
  const Vector& gx = d.gx;
  const Vector& gy = d.gy;
  const Index m = gx.size();
  const Index n = gy.size();
  Vector dx;
  Vector dy;
  switch (kind) {
    case SolverKind::GDA:
      dx = -gx;
      dy = gy;
      break;
    case SolverKind::SGA: {
      const Matrix& fxy = d.hess.xy;
      dx = -gx - params.gamma * (fxy * gy);
      dy = gy - params.gamma * (fxy.transpose() * gx);
      break;
    }
    case SolverKind::ConOpt: {
      const HessianBlocks& h = d.hess;
      dx = -gx - params.gamma * (h.xy * gy) - params.gamma * (h.xx * gx);
      dy = gy - params.gamma * (h.xy.transpose() * gx) - params.gamma * (h.yy * gy);
      break;
    }
    case SolverKind::OGDA: {
      const HessianBlocks& h = d.hess;
      dx = -gx - params.eta * (h.xy * gy) + params.eta * (h.xx * gx);
      dy = gy - params.eta * (h.xy.transpose() * gx) + params.eta * (h.yy * gy);
      break;
    }
    case SolverKind::CGD: {
      if (m + n > kCgdMaxDim) {
        throw DimensionError("CGD dense solve is limited to m + n <= " +
                             std::to_string(kCgdMaxDim));
      }
      const Matrix& fxy = d.hess.xy;
      const Matrix fyx = fxy.transpose();
      dx = cgd_block(fxy, -gx - params.eta * (fxy * gy), params.eta);
      dy = cgd_block(fyx, gy - params.eta * (fyx * gx), params.eta);
      break;
    }
    case SolverKind::GN:
    case SolverKind::GNAdaptive:
      throw std::invalid_argument("baseline_delta called with a Gauss-Newton kind");
  }
  Vector delta(m + n);
  delta << dx, dy;
  return delta;
}

ParamPoint step_gn(const ParamPoint& p, const GameOracle& oracle, const SolverConfig& cfg) {
  const JointVector v = joint_field(oracle, p, cfg.convention);
  const Vector delta = gn_delta(v, cfg.gn.lambda);
  return p.with_values(p.values() + cfg.gn.step * delta);
}

std::pair<ParamPoint, AdaptiveState> step_gn_adaptive(const ParamPoint& p,
                                                      const AdaptiveState& state,
                                                      const GameOracle& oracle,
                                                      const SolverConfig& cfg) {
  const JointVector v = joint_field(oracle, p, cfg.convention);
  AdaptiveState next = state;
  const Vector delta = adaptive_delta(v, next, cfg.gn);
  return {p.with_values(p.values() + cfg.gn.step * delta), std::move(next)};
}

ParamPoint step_baseline(const ParamPoint& p, const GameOracle& oracle, const SolverConfig& cfg) {
  const GameDerivatives d = derivatives_at(oracle, p, needs_hessian(cfg.kind));
  return p.with_values(p.values() + cfg.gn.step * baseline_delta(cfg.kind, d, cfg.baseline));
}

Stepper::Stepper(const GameOracle& oracle, SolverConfig cfg) : oracle_(oracle), cfg_(cfg) {}

ParamPoint Stepper::step(const ParamPoint& p) {
  switch (cfg_.kind) {
    case SolverKind::GN:
      return step_gn(p, oracle_, cfg_);
    case SolverKind::GNAdaptive: {
      if (!adaptive_) {
        adaptive_ = init_adaptive_state(joint_field(oracle_, p, cfg_.convention), cfg_.adaptive);
      }
      auto [next, state] = step_gn_adaptive(p, *adaptive_, oracle_, cfg_);
      adaptive_ = std::move(state);
      return next;
    }
    default:
      return step_baseline(p, oracle_, cfg_);
  }
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Converged: return "converged";
    case Verdict::Diverged: return "diverged";
    case Verdict::IterCap: return "iter-cap";
  }
  return "?";
}

Verdict parse_verdict(std::string_view name) {
  for (Verdict v : {Verdict::Converged, Verdict::Diverged, Verdict::IterCap}) {
    if (to_string(v) == name) return v;
  }
  throw std::invalid_argument("unknown verdict '" + std::string(name) + "'");
}

namespace {

// Adds N(0, std^2) to both gradients. Owns its generator, so one instance per run.
class NoisyOracle final : public GameOracle {
 public:
  NoisyOracle(const GameOracle& inner, double noise_std, std::uint64_t seed)
      : inner_(inner), noise_(0.0, noise_std), rng_(seed) {}

  GameDims dims() const override { return inner_.dims(); }
  double value(const Vector& x, const Vector& y) const override { return inner_.value(x, y); }
  Vector grad_x(const Vector& x, const Vector& y) const override {
    return perturb(inner_.grad_x(x, y));
  }
  Vector grad_y(const Vector& x, const Vector& y) const override {
    return perturb(inner_.grad_y(x, y));
  }
  bool has_hessian() const override { return inner_.has_hessian(); }
  HessianBlocks hessian(const Vector& x, const Vector& y) const override {
    return inner_.hessian(x, y);
  }
  std::vector<ParamPoint> nash_points() const override { return inner_.nash_points(); }

 private:
  Vector perturb(Vector g) const {
    for (Index i = 0; i < g.size(); ++i) g[i] += noise_(rng_);
    return g;
  }

  const GameOracle& inner_;
  mutable std::normal_distribution<double> noise_;
  mutable std::mt19937_64 rng_;
};

std::optional<double> nearest_distance(const std::vector<ParamPoint>& nash, const Vector& p) {
  std::optional<double> best;
  for (const ParamPoint& q : nash) {
    if (q.dim() != p.size()) continue;
    const double d = stable_norm(p - q.values());
    if (!best || d < *best) best = d;
  }
  return best;
}

bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace

Trajectory run_solver(const ParamPoint& p0, const GameOracle& oracle, const SolverConfig& cfg,
                      std::int64_t iters, const StoppingRule& stop, std::uint64_t seed) {
  if (iters < 1) throw std::invalid_argument("run_solver needs iters >= 1");
  validate(cfg);
  require_dims(oracle, p0);

  std::optional<NoisyOracle> noisy;
  if (cfg.noise_std > 0.0) noisy.emplace(oracle, cfg.noise_std, seed);
  const GameOracle& stepping_oracle = noisy ? static_cast<const GameOracle&>(*noisy) : oracle;

  const std::vector<ParamPoint> nash = oracle.nash_points();
  const auto start = std::chrono::steady_clock::now();
  const auto make_row = [&](std::int64_t iter, const ParamPoint& p) {
    TrajectoryRow row;
    row.iter = iter;
    row.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    row.field_norm = stable_norm(joint_field(oracle, p, cfg.convention));
    row.distance = nearest_distance(nash, p.values());
    row.value = oracle.value(p.x(), p.y());
    return row;
  };

  Trajectory traj;
  traj.rows.push_back(make_row(0, p0));
  Stepper stepper(stepping_oracle, cfg);
  ParamPoint p = p0;
  traj.verdict = Verdict::IterCap;
  for (std::int64_t t = 1; t <= iters; ++t) {
    std::optional<ParamPoint> next;
    try {
      next = stepper.step(p);
    } catch (const NonFiniteError&) {
      traj.verdict = Verdict::Diverged;
      break;
    }
    if (!all_finite(next->values())) {
      traj.verdict = Verdict::Diverged;
      break;
    }
    p = std::move(*next);
    TrajectoryRow row;
    try {
      row = make_row(t, p);
    } catch (const NonFiniteError&) {
      traj.verdict = Verdict::Diverged;
      break;
    }
    const bool finite = std::isfinite(row.field_norm) && std::isfinite(row.value);
    if (!finite) {
      traj.verdict = Verdict::Diverged;
      break;
    }
    traj.rows.push_back(row);
    if (row.field_norm <= stop.tol) {
      traj.verdict = Verdict::Converged;
      break;
    }
    if (stable_norm(p.values()) >= stop.blowup) {
      traj.verdict = Verdict::Diverged;
      break;
    }
  }
  if (traj.verdict == Verdict::IterCap && stop.growth_guard && traj.rows.size() >= 2 &&
      traj.rows.back().field_norm > traj.rows.front().field_norm) {
    traj.verdict = Verdict::Diverged;
  }
  traj.final_point = p;
  return traj;
}

}  // namespace minimax
