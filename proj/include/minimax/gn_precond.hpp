#pragma once

#include <string>
#include <vector>

#include "minimax/vecfield.hpp"

namespace minimax {

// Regularization lambda of B(p) = lambda I + v v^T and the step size h.
// The step size is shared by every update rule in SolverConfig.
struct GNConfig {
  double lambda = 0.1;
  double step = 1e-5;
  bool operator==(const GNConfig&) const = default;
};

// Throws on lambda <= 0 or step <= 0; returns advisory warnings (lambda outside (0, 1)).
std::vector<std::string> validate(const GNConfig& cfg);

// (lambda I + v v^T)^-1 v via the rank-one inverse with u = v / sqrt(lambda):
//   z = (v - u (u^T v) / (1 + u^T u)) / lambda.
// O(dim); does not allocate beyond the result.
Vector sm_solve(const Vector& v, double lambda);

// z - v, i.e. A(p) v with A(p) = B(p)^-1 - I. Collinear with v.
Vector gn_delta(const Vector& v, double lambda);

// (lambda I + h g g^T)^-1 v with u = sqrt(h / lambda) g.
Vector sm_solve_scaled(const Vector& v, const Vector& g, double h, double lambda);

// Signed coefficient c of gn_delta(v, lambda) = c v, in closed form.
inline double gn_delta_coefficient(double squared_norm, double lambda) {
  return -(1.0 - 1.0 / (lambda + squared_norm));
}

}  // namespace minimax
