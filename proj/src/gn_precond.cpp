#include "minimax/gn_precond.hpp"

#include <cmath>

#include "minimax/errors.hpp"

namespace minimax {

namespace {

void require_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be finite and > 0 (B(p) = lambda I + v v^T must "
                                "stay invertible), got " + std::to_string(lambda));
  }
}

}  // namespace

std::vector<std::string> validate(const GNConfig& cfg) {
  require_lambda(cfg.lambda);
  if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) {
    throw std::invalid_argument("step size h must be finite and > 0");
  }
  std::vector<std::string> warnings;
  if (cfg.lambda >= 1.0) {
    warnings.push_back("lambda = " + std::to_string(cfg.lambda) +
                       " is outside the recommended range (0, 1); near an equilibrium the "
                       "update then moves against the field");
  }
  return warnings;
}

Vector sm_solve(const Vector& v, double lambda) {
  require_lambda(lambda);
  require_finite(v, "sm_solve input");
  const Vector u = v / std::sqrt(lambda);
  const double utv = u.dot(v);
  const double utu = u.squaredNorm();
  return (v - u * (utv / (1.0 + utu))) / lambda;
}

Vector gn_delta(const Vector& v, double lambda) {
  Vector z = sm_solve(v, lambda);
  z -= v;
  return z;
}

Vector sm_solve_scaled(const Vector& v, const Vector& g, double h, double lambda) {
  require_lambda(lambda);
  if (!(h > 0.0)) throw std::invalid_argument("sm_solve_scaled: h must be > 0");
  if (v.size() != g.size()) {
    throw DimensionError("sm_solve_scaled: v has length " + std::to_string(v.size()) +
                         " but g has length " + std::to_string(g.size()));
  }
  require_finite(v, "sm_solve_scaled v");
  require_finite(g, "sm_solve_scaled g");
  const Vector u = std::sqrt(h / lambda) * g;
  const double utv = u.dot(v);
  const double utu = u.squaredNorm();
  return (v - u * (utv / (1.0 + utu))) / lambda;
}

}  // namespace minimax
