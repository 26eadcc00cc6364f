#include "minimax/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "minimax/errors.hpp"

namespace minimax {

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::NashCandidate: return "nash-candidate";
    case Classification::NotNash: return "not-nash";
    case Classification::Indeterminate: return "indeterminate";
  }
  return "?";
}

std::string_view to_string(Definiteness d) {
  switch (d) {
    case Definiteness::Positive: return "positive";
    case Definiteness::PositiveSemi: return "positive-semidefinite";
    case Definiteness::Negative: return "negative";
    case Definiteness::NegativeSemi: return "negative-semidefinite";
    case Definiteness::Indefinite: return "indefinite";
    case Definiteness::Zero: return "zero";
  }
  return "?";
}

double step_for_sigma(double sigma, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw std::invalid_argument("step_for_sigma needs 0 < lambda < 1");
  }
  return sigma / (1.0 / lambda - 1.0);
}

namespace {

void require_stationary(const GameOracle& oracle, const ParamPoint& p, std::string_view who) {
  const double vn = stable_norm(joint_field(oracle, p, FieldConvention::PaperOriented));
  if (!(vn <= kStationaryTolerance)) {
    throw std::invalid_argument(std::string(who) + ": point is not stationary (|v| = " +
                                std::to_string(vn) + ")");
  }
}

}  // namespace

Matrix fixed_point_jacobian(const GameOracle& oracle, const ParamPoint& p, const GNConfig& cfg,
                            FieldConvention conv, JacobianMode mode) {
  validate(cfg);
  if (mode == JacobianMode::AtEquilibrium) {
    require_stationary(oracle, p, "fixed_point_jacobian");
    const Matrix jac = joint_jacobian(oracle, p, conv, /*allow_numerical=*/true);
    return Matrix::Identity(p.dim(), p.dim()) + sigma_of(cfg) * jac;
  }
  const auto update = [&](const Vector& q) -> Vector {
    const JointVector v = joint_field(oracle, p.with_values(q), conv);
    return q + cfg.step * gn_delta(v, cfg.lambda);
  };
  return central_difference_jacobian(update, p.values(), kJacobianFdStep);
}

std::optional<double> try_sigma_bound(const std::vector<Complex>& eigs) {
  if (eigs.empty()) return std::nullopt;
  double bound = std::numeric_limits<double>::infinity();
  for (const Complex& xi : eigs) {
    const double re = xi.real();
    const double im = xi.imag();
    if (!(re < 0.0)) return std::nullopt;
    const double ratio = im / re;
    bound = std::min(bound, (1.0 / std::abs(re)) * 2.0 / (1.0 + ratio * ratio));
  }
  return bound;
}

double sigma_bound(const std::vector<Complex>& eigs) {
  const std::optional<double> b = try_sigma_bound(eigs);
  if (!b) {
    throw std::domain_error("sigma bound needs every eigenvalue to have a negative real part");
  }
  return *b;
}

Definiteness definiteness_of_symmetric(const Matrix& m) {
  if (m.size() == 0) return Definiteness::Zero;
  const Matrix sym = 0.5 * (m + m.transpose());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Complex& e : eigenvalues(sym)) {
    lo = std::min(lo, e.real());
    hi = std::max(hi, e.real());
  }
  const bool any_pos = hi > kSignMargin;
  const bool any_neg = lo < -kSignMargin;
  if (any_pos && any_neg) return Definiteness::Indefinite;
  if (any_pos) return lo > kSignMargin ? Definiteness::Positive : Definiteness::PositiveSemi;
  if (any_neg) return hi < -kSignMargin ? Definiteness::Negative : Definiteness::NegativeSemi;
  return Definiteness::Zero;
}

StationaryClassification classify_stationary(const GameOracle& oracle, const ParamPoint& p,
                                             FieldConvention conv) {
  require_stationary(oracle, p, "classify_stationary");
  StationaryClassification out;
  const Matrix da = joint_jacobian(oracle, p, FieldConvention::DescentAscent, true);
  const std::vector<Complex> da_eigs = eigenvalues(da);
  out.jacobian_eigenvalues =
      conv == FieldConvention::DescentAscent ? da_eigs : eigenvalues(Matrix(-da));

  double max_re = -std::numeric_limits<double>::infinity();
  for (const Complex& e : da_eigs) max_re = std::max(max_re, e.real());
  if (max_re < -kSignMargin) {
    out.classification = Classification::NashCandidate;
  } else if (max_re > kSignMargin) {
    out.classification = Classification::NotNash;
  } else {
    out.classification = Classification::Indeterminate;
  }

  // Under descent-ascent the diagonal blocks are -f_xx and f_yy.
  const Index m = p.m();
  const Index n = p.n();
  const Matrix fxx = -da.topLeftCorner(m, m);
  const Matrix fyy = da.bottomRightCorner(n, n);
  out.hess_xx = definiteness_of_symmetric(fxx);
  out.hess_yy = definiteness_of_symmetric(fyy);
  const auto psd = [](Definiteness d) {
    return d == Definiteness::Positive || d == Definiteness::PositiveSemi ||
           d == Definiteness::Zero;
  };
  const auto nsd = [](Definiteness d) {
    return d == Definiteness::Negative || d == Definiteness::NegativeSemi ||
           d == Definiteness::Zero;
  };
  out.blocks_semidefinite = psd(out.hess_xx) && nsd(out.hess_yy);
  out.eigen_semidefinite = max_re <= kSignMargin;
  out.verdicts_agree = out.blocks_semidefinite == out.eigen_semidefinite;
  return out;
}

SpectralReport spectral_report(const GameOracle& oracle, const ParamPoint& equilibrium,
                               const GNConfig& cfg, FieldConvention conv) {
  SpectralReport report;
  report.classification = classify_stationary(oracle, equilibrium, conv);
  const Matrix jac = joint_jacobian(oracle, equilibrium, conv, true);
  report.field_eigenvalues = eigenvalues(jac);
  report.sigma = sigma_of(cfg);
  report.sigma_bound = try_sigma_bound(report.field_eigenvalues);
  const Matrix update =
      fixed_point_jacobian(oracle, equilibrium, cfg, conv, JacobianMode::AtEquilibrium);
  report.update_eigenvalues = eigenvalues(update);
  report.spectral_radius = spectral_radius(report.update_eigenvalues);
  report.contraction = report.spectral_radius < 1.0;
  return report;
}

ContractionResult contraction_experiment(const GameOracle& oracle, const GNConfig& cfg,
                                         FieldConvention conv, const ParamPoint& p0,
                                         std::int64_t iters) {
  if (iters <= kContractionWindow) {
    throw std::invalid_argument("contraction_experiment needs more than " +
                                std::to_string(kContractionWindow) + " iterations");
  }
  const std::vector<ParamPoint> nash = oracle.nash_points();
  if (nash.empty()) {
    throw std::invalid_argument("contraction_experiment: game has no known stationary point");
  }
  const ParamPoint* p_bar = &nash.front();
  double best = stable_norm(p0.values() - p_bar->values());
  for (const ParamPoint& q : nash) {
    const double d = stable_norm(p0.values() - q.values());
    if (d < best) {
      best = d;
      p_bar = &q;
    }
  }

  ContractionResult result;
  const Matrix jac = fixed_point_jacobian(oracle, *p_bar, cfg, conv, JacobianMode::AtEquilibrium);
  result.predicted = spectral_radius(eigenvalues(jac));

  SolverConfig solver;
  solver.kind = SolverKind::GN;
  solver.gn = cfg;
  solver.convention = conv;
  StoppingRule stop;
  stop.tol = 0.0;
  const Trajectory traj = run_solver(p0, oracle, solver, iters, stop);
  result.verdict = traj.verdict;
  if (traj.verdict == Verdict::Diverged) return result;
  if (traj.rows.size() <= static_cast<std::size_t>(kContractionWindow)) {
    throw std::runtime_error("contraction_experiment: trajectory ended early");
  }
  const auto& last = traj.rows.back();
  const auto& first = traj.rows[traj.rows.size() - 1 - kContractionWindow];
  const double d_end = *last.distance;
  const double d_start = *first.distance;
  if (!(d_start > 0.0) || !(d_end > 0.0)) {
    throw std::runtime_error("contraction_experiment: iterate reached the equilibrium exactly; "
                             "use fewer iterations");
  }
  result.measured = std::exp((std::log(d_end) - std::log(d_start)) / kContractionWindow);
  return result;
}

}  // namespace minimax
