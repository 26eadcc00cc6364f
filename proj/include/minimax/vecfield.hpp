#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace minimax {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Gradients of both players stacked into one vector of length m + n.
using JointVector = Vector;
// Dense (m + n) x (m + n) derivative of a JointVector field.
using JacobianMatrix = Matrix;

// p = [x, y] stored flat; x (min player) is values[0, split), y (max player) the rest.
class ParamPoint {
 public:
  ParamPoint(Vector values, Index split);

  static ParamPoint from_blocks(const Vector& x, const Vector& y);

  const Vector& values() const { return values_; }
  Index split() const { return split_; }
  Index m() const { return split_; }
  Index n() const { return values_.size() - split_; }
  Index dim() const { return values_.size(); }

  Vector x() const { return values_.head(split_); }
  Vector y() const { return values_.tail(n()); }

  // Same split, new values. Values must be finite.
  ParamPoint with_values(Vector values) const;

  bool operator==(const ParamPoint& other) const {
    return split_ == other.split_ && values_ == other.values_;
  }

 private:
  Vector values_;
  Index split_;
};

// PaperOriented: v = [grad_x f; -grad_y f].  DescentAscent: v = [-grad_x f; grad_y f].
enum class FieldConvention { PaperOriented, DescentAscent };

std::string_view to_string(FieldConvention conv);
FieldConvention parse_convention(std::string_view name);

struct GameDims {
  Index m = 0;
  Index n = 0;
  bool operator==(const GameDims&) const = default;
};

// Second derivatives of f. xy is m x n (d^2 f / dx dy); the yx block is its transpose.
struct HessianBlocks {
  Matrix xx;
  Matrix xy;
  Matrix yy;
};

// f(x, y) of the zero-sum game min_x max_y f. The max player's utility is -f.
class GameOracle {
 public:
  virtual ~GameOracle() = default;

  virtual GameDims dims() const = 0;
  virtual double value(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_x(const Vector& x, const Vector& y) const = 0;
  virtual Vector grad_y(const Vector& x, const Vector& y) const = 0;

  virtual bool has_hessian() const { return false; }
  virtual HessianBlocks hessian(const Vector& x, const Vector& y) const;

  // Known equilibria, possibly none.
  virtual std::vector<ParamPoint> nash_points() const { return {}; }
};

using OraclePtr = std::shared_ptr<const GameOracle>;

// Throws NonFiniteError naming the first bad index.
void require_finite(const Vector& v, std::string_view what);
void require_dims(const GameOracle& oracle, const ParamPoint& p);

JointVector joint_field(const GameOracle& oracle, const ParamPoint& p, FieldConvention conv);

// Assembles [f_xx, f_xy; -f_yx, -f_yy] (negated under DescentAscent). Without Hessian
// blocks, falls back to central differences of joint_field when allow_numerical is set.
JacobianMatrix joint_jacobian(const GameOracle& oracle, const ParamPoint& p, FieldConvention conv,
                              bool allow_numerical = false);

inline constexpr double kJacobianFdStep = 1e-5;

// Central-difference Jacobian of fn at p, one column per coordinate.
Matrix central_difference_jacobian(const std::function<Vector(const Vector&)>& fn,
                                   const Vector& p, double step);

// Overflow/underflow safe 2-norm.
double stable_norm(const Vector& v);

struct CheckReport {
  double grad_error = 0.0;
  std::optional<double> hessian_error;
  double max_error = 0.0;
  bool non_finite = false;
  bool passed = false;
};

inline constexpr double kGradCheckStep = 1e-4;
inline constexpr double kGradCheckTolerance = 1e-5;

// Compares analytic derivatives with central differences. Entry error is
// |analytic - fd| / max(1, |fd|); the report keeps the max over entries.
CheckReport grad_check(const GameOracle& oracle, const ParamPoint& p,
                       double tolerance = kGradCheckTolerance);

}  // namespace minimax
