#include "minimax/vecfield.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "minimax/errors.hpp"

namespace minimax {

ParamPoint::ParamPoint(Vector values, Index split) : values_(std::move(values)), split_(split) {
  if (split_ < 0 || split_ > values_.size()) {
    throw DimensionError("ParamPoint split " + std::to_string(split_) + " outside [0, " +
                         std::to_string(values_.size()) + "]");
  }
  require_finite(values_, "ParamPoint values");
}

ParamPoint ParamPoint::from_blocks(const Vector& x, const Vector& y) {
  Vector joint(x.size() + y.size());
  joint << x, y;
  return ParamPoint(std::move(joint), x.size());
}

ParamPoint ParamPoint::with_values(Vector values) const {
  if (values.size() != values_.size()) {
    throw DimensionError("ParamPoint::with_values length mismatch");
  }
  return ParamPoint(std::move(values), split_);
}

std::string_view to_string(FieldConvention conv) {
  return conv == FieldConvention::PaperOriented ? "paper" : "descent-ascent";
}

FieldConvention parse_convention(std::string_view name) {
  if (name == "paper") return FieldConvention::PaperOriented;
  if (name == "descent-ascent") return FieldConvention::DescentAscent;
  throw std::invalid_argument("unknown field convention '" + std::string(name) +
                              "' (expected 'paper' or 'descent-ascent')");
}

HessianBlocks GameOracle::hessian(const Vector&, const Vector&) const {
  throw CapabilityError("oracle does not provide Hessian blocks");
}

void require_finite(const Vector& v, std::string_view what) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw NonFiniteError(std::string(what), i);
  }
}

void require_dims(const GameOracle& oracle, const ParamPoint& p) {
  const GameDims d = oracle.dims();
  if (d.m != p.m() || d.n != p.n()) {
    throw DimensionError("point has (m, n) = (" + std::to_string(p.m()) + ", " +
                         std::to_string(p.n()) + ") but oracle expects (" + std::to_string(d.m) +
                         ", " + std::to_string(d.n) + ")");
  }
}

JointVector joint_field(const GameOracle& oracle, const ParamPoint& p, FieldConvention conv) {
  require_dims(oracle, p);
  const Vector x = p.x();
  const Vector y = p.y();
  const Vector gx = oracle.grad_x(x, y);
  const Vector gy = oracle.grad_y(x, y);
  if (gx.size() != p.m() || gy.size() != p.n()) {
    throw DimensionError("oracle returned gradients of the wrong length");
  }
  JointVector v(p.dim());
  if (conv == FieldConvention::PaperOriented) {
    v << gx, -gy;
  } else {
    v << -gx, gy;
  }
  require_finite(v, "joint field");
  return v;
}

Matrix central_difference_jacobian(const std::function<Vector(const Vector&)>& fn,
                                   const Vector& p, double step) {
  const Vector f0 = fn(p);
  Matrix jac(f0.size(), p.size());
  Vector probe = p;
  for (Index j = 0; j < p.size(); ++j) {
    probe[j] = p[j] + step;
    const Vector plus = fn(probe);
    probe[j] = p[j] - step;
    const Vector minus = fn(probe);
    probe[j] = p[j];
    jac.col(j) = (plus - minus) / (2.0 * step);
  }
  return jac;
}

JacobianMatrix joint_jacobian(const GameOracle& oracle, const ParamPoint& p, FieldConvention conv,
                              bool allow_numerical) {
  require_dims(oracle, p);
  if (!oracle.has_hessian()) {
    if (!allow_numerical) {
      throw CapabilityError("joint_jacobian: oracle has no Hessian blocks and numerical "
                            "fallback was not requested");
    }
    return central_difference_jacobian(
        [&](const Vector& q) { return joint_field(oracle, p.with_values(q), conv); },
        p.values(), kJacobianFdStep);
  }
  const HessianBlocks h = oracle.hessian(p.x(), p.y());
  const Index m = p.m();
  const Index n = p.n();
  JacobianMatrix jac(m + n, m + n);
  jac.topLeftCorner(m, m) = h.xx;
  jac.topRightCorner(m, n) = h.xy;
  jac.bottomLeftCorner(n, m) = -h.xy.transpose();
  jac.bottomRightCorner(n, n) = -h.yy;
  if (conv == FieldConvention::DescentAscent) jac = -jac;
  return jac;
}

double stable_norm(const Vector& v) { return v.stableNorm(); }

namespace {

double max_rel_error(const Matrix& analytic, const Matrix& numeric, bool& non_finite) {
  double worst = 0.0;
  for (Index j = 0; j < analytic.cols(); ++j) {
    for (Index i = 0; i < analytic.rows(); ++i) {
      const double a = analytic(i, j);
      const double b = numeric(i, j);
      if (!std::isfinite(a) || !std::isfinite(b)) {
        non_finite = true;
        continue;
      }
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
  }
  return worst;
}

}  // namespace

CheckReport grad_check(const GameOracle& oracle, const ParamPoint& p, double tolerance) {
  require_dims(oracle, p);
  CheckReport report;
  const Vector x = p.x();
  const Vector y = p.y();
  const double step = kGradCheckStep;

  const auto value_x = [&](const Vector& q) { return Vector::Constant(1, oracle.value(q, y)); };
  const auto value_y = [&](const Vector& q) { return Vector::Constant(1, oracle.value(x, q)); };
  const Matrix fd_gx = central_difference_jacobian(value_x, x, step).transpose();
  const Matrix fd_gy = central_difference_jacobian(value_y, y, step).transpose();
  const Vector gx = oracle.grad_x(x, y);
  const Vector gy = oracle.grad_y(x, y);
  report.grad_error = std::max(max_rel_error(gx, fd_gx, report.non_finite),
                               max_rel_error(gy, fd_gy, report.non_finite));
  report.max_error = report.grad_error;

  if (oracle.has_hessian()) {
    const HessianBlocks h = oracle.hessian(x, y);
    const auto gx_of_x = [&](const Vector& q) { return oracle.grad_x(q, y); };
    const auto gx_of_y = [&](const Vector& q) { return oracle.grad_x(x, q); };
    const auto gy_of_x = [&](const Vector& q) { return oracle.grad_y(q, y); };
    const auto gy_of_y = [&](const Vector& q) { return oracle.grad_y(x, q); };
    double err = max_rel_error(h.xx, central_difference_jacobian(gx_of_x, x, step),
                               report.non_finite);
    err = std::max(err, max_rel_error(h.xy, central_difference_jacobian(gx_of_y, y, step),
                                      report.non_finite));
    err = std::max(err, max_rel_error(h.xy.transpose(),
                                      central_difference_jacobian(gy_of_x, x, step),
                                      report.non_finite));
    err = std::max(err, max_rel_error(h.yy, central_difference_jacobian(gy_of_y, y, step),
                                      report.non_finite));
    report.hessian_error = err;
    report.max_error = std::max(report.max_error, err);
  }
  report.passed = !report.non_finite && report.max_error <= tolerance;
  return report;
}

}  // namespace minimax
