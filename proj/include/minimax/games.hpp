#pragma once

#include "minimax/vecfield.hpp"

namespace minimax {

// f(x, y) = (a/2)|x|^2 + x^T B y - (c/2)|y|^2 with B an m x n matrix.
struct QuadraticGameSpec {
  double a = 1.0;
  double c = 1.0;
  Matrix B = Matrix::Zero(1, 1);
};

enum class DiracLoss { Logistic, Linear };

// f(theta, psi) = l(theta * psi) + l(0) with l(t) = -log(1 + e^-t) or l(t) = t.
struct DiracGanSpec {
  DiracLoss loss = DiracLoss::Logistic;
};

class QuadraticGame final : public GameOracle {
 public:
  explicit QuadraticGame(QuadraticGameSpec spec);

  GameDims dims() const override { return {spec_.B.rows(), spec_.B.cols()}; }
  double value(const Vector& x, const Vector& y) const override;
  Vector grad_x(const Vector& x, const Vector& y) const override;
  Vector grad_y(const Vector& x, const Vector& y) const override;
  bool has_hessian() const override { return true; }
  HessianBlocks hessian(const Vector& x, const Vector& y) const override;
  std::vector<ParamPoint> nash_points() const override;

  const QuadraticGameSpec& spec() const { return spec_; }

 private:
  QuadraticGameSpec spec_;
};

class DiracGan final : public GameOracle {
 public:
  explicit DiracGan(DiracGanSpec spec) : spec_(spec) {}

  GameDims dims() const override { return {1, 1}; }
  double value(const Vector& x, const Vector& y) const override;
  Vector grad_x(const Vector& x, const Vector& y) const override;
  Vector grad_y(const Vector& x, const Vector& y) const override;
  bool has_hessian() const override { return true; }
  HessianBlocks hessian(const Vector& x, const Vector& y) const override;
  std::vector<ParamPoint> nash_points() const override;

  // l, l', l'' of the configured loss.
  double loss(double t) const;
  double loss_d1(double t) const;
  double loss_d2(double t) const;

 private:
  DiracGanSpec spec_;
};

// Rejects a < 0 or c < 0 and non-finite B.
std::shared_ptr<const QuadraticGame> make_quadratic(QuadraticGameSpec spec);
std::shared_ptr<const QuadraticGame> make_bilinear(const Matrix& B);
std::shared_ptr<const DiracGan> make_dirac_gan(DiracGanSpec spec);

}  // namespace minimax
