#include "minimax/games.hpp"

#include <cmath>

#include "minimax/errors.hpp"

namespace minimax {

QuadraticGame::QuadraticGame(QuadraticGameSpec spec) : spec_(std::move(spec)) {
  if (!(spec_.a >= 0.0) || !(spec_.c >= 0.0)) {
    throw std::invalid_argument("quadratic game needs curvatures a >= 0 and c >= 0");
  }
  if (!std::isfinite(spec_.a) || !std::isfinite(spec_.c) || !spec_.B.allFinite()) {
    throw std::invalid_argument("quadratic game parameters must be finite");
  }
}

double QuadraticGame::value(const Vector& x, const Vector& y) const {
  return 0.5 * spec_.a * x.squaredNorm() + x.dot(spec_.B * y) - 0.5 * spec_.c * y.squaredNorm();
}

Vector QuadraticGame::grad_x(const Vector& x, const Vector& y) const {
  return spec_.a * x + spec_.B * y;
}

Vector QuadraticGame::grad_y(const Vector& x, const Vector& y) const {
  return spec_.B.transpose() * x - spec_.c * y;
}

HessianBlocks QuadraticGame::hessian(const Vector&, const Vector&) const {
  const Index m = spec_.B.rows();
  const Index n = spec_.B.cols();
  return {spec_.a * Matrix::Identity(m, m), spec_.B, -spec_.c * Matrix::Identity(n, n)};
}

std::vector<ParamPoint> QuadraticGame::nash_points() const {
  return {ParamPoint(Vector::Zero(spec_.B.rows() + spec_.B.cols()), spec_.B.rows())};
}

double DiracGan::loss(double t) const {
  if (spec_.loss == DiracLoss::Linear) return t;
  // -log(1 + e^-t), written to stay finite for large |t|.
  return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
}

double DiracGan::loss_d1(double t) const {
  if (spec_.loss == DiracLoss::Linear) return 1.0;
  return 1.0 / (1.0 + std::exp(t));
}

double DiracGan::loss_d2(double t) const {
  if (spec_.loss == DiracLoss::Linear) return 0.0;
  const double s = 1.0 / (1.0 + std::exp(-t));
  return -s * (1.0 - s);
}

double DiracGan::value(const Vector& x, const Vector& y) const {
  return loss(x[0] * y[0]) + loss(0.0);
}

Vector DiracGan::grad_x(const Vector& x, const Vector& y) const {
  return Vector::Constant(1, loss_d1(x[0] * y[0]) * y[0]);
}

Vector DiracGan::grad_y(const Vector& x, const Vector& y) const {
  return Vector::Constant(1, loss_d1(x[0] * y[0]) * x[0]);
}

HessianBlocks DiracGan::hessian(const Vector& x, const Vector& y) const {
  const double theta = x[0];
  const double psi = y[0];
  const double t = theta * psi;
  const double d1 = loss_d1(t);
  const double d2 = loss_d2(t);
  return {Matrix::Constant(1, 1, d2 * psi * psi), Matrix::Constant(1, 1, d2 * t + d1),
          Matrix::Constant(1, 1, d2 * theta * theta)};
}

std::vector<ParamPoint> DiracGan::nash_points() const {
  return {ParamPoint(Vector::Zero(2), 1)};
}

std::shared_ptr<const QuadraticGame> make_quadratic(QuadraticGameSpec spec) {
  return std::make_shared<const QuadraticGame>(std::move(spec));
}

std::shared_ptr<const QuadraticGame> make_bilinear(const Matrix& B) {
  return make_quadratic({0.0, 0.0, B});
}

std::shared_ptr<const DiracGan> make_dirac_gan(DiracGanSpec spec) {
  return std::make_shared<const DiracGan>(spec);
}

}  // namespace minimax
