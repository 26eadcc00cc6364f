#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "minimax/errors.hpp"
#include "minimax/games.hpp"
#include "test_util.hpp"

namespace minimax {
namespace {

using testing::random_matrix;
using testing::random_vector;

ParamPoint pt(std::initializer_list<double> xs, Index split) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return ParamPoint(v, split);
}

std::vector<OraclePtr> analytic_games(std::mt19937_64& rng) {
  return {make_quadratic({1.0, 1.0, Matrix::Constant(1, 1, 0.5)}),
          make_quadratic({0.7, 1.3, random_matrix(rng, 2, 3)}),
          make_bilinear(random_matrix(rng, 3, 2)),
          make_dirac_gan({DiracLoss::Logistic}),
          make_dirac_gan({DiracLoss::Linear})};
}

TEST(ParamPoint, SplitBoundsAndBlocks) {
  const ParamPoint p = pt({1, 2, 3}, 1);
  EXPECT_EQ(p.m(), 1);
  EXPECT_EQ(p.n(), 2);
  EXPECT_EQ(p.x()[0], 1.0);
  EXPECT_EQ(p.y()[1], 3.0);
  EXPECT_NO_THROW(ParamPoint(Vector::Zero(3), 0));
  EXPECT_NO_THROW(ParamPoint(Vector::Zero(3), 3));
  EXPECT_THROW(ParamPoint(Vector::Zero(3), 4), DimensionError);
  EXPECT_THROW(ParamPoint(Vector::Zero(3), -1), DimensionError);
  EXPECT_EQ(ParamPoint::from_blocks(Vector::Constant(2, 1.0), Vector::Constant(1, 2.0)),
            pt({1, 1, 2}, 2));
}

TEST(ParamPoint, RejectsNonFinite) {
  Vector v = Vector::Zero(3);
  v[2] = std::numeric_limits<double>::quiet_NaN();
  try {
    ParamPoint p(v, 1);
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    EXPECT_EQ(e.index(), 2);
  }
  v[2] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(ParamPoint(v, 1), NonFiniteError);
}

TEST(FieldConvention, NamesRoundTrip) {
  for (FieldConvention c : {FieldConvention::PaperOriented, FieldConvention::DescentAscent}) {
    EXPECT_EQ(parse_convention(to_string(c)), c);
  }
  EXPECT_THROW(parse_convention("upside-down"), std::invalid_argument);
}

TEST(JointField, QuadraticExamples) {
  const auto game = make_quadratic({1.0, 1.0, Matrix::Zero(1, 1)});
  const ParamPoint p = pt({1, 1}, 1);
  const Vector po = joint_field(*game, p, FieldConvention::PaperOriented);
  const Vector da = joint_field(*game, p, FieldConvention::DescentAscent);
  EXPECT_EQ(po, Vector::Constant(2, 1.0));
  EXPECT_EQ(da, Vector::Constant(2, -1.0));
}

TEST(JointField, DiracGanExampleMatchesFiniteDifferences) {
  const auto game = make_dirac_gan({DiracLoss::Logistic});
  const ParamPoint p = pt({1, 0}, 1);
  const Vector v = joint_field(*game, p, FieldConvention::PaperOriented);
  EXPECT_NEAR(v[0], 0.0, 1e-15);
  EXPECT_NEAR(v[1], -0.5, 1e-15);
  const double s = 1e-6;
  const Vector x = p.x();
  const Vector y = p.y();
  const double fd_theta = (game->value(x.array() + s, y) - game->value(x.array() - s, y)) / (2 * s);
  const double fd_psi = (game->value(x, y.array() + s) - game->value(x, y.array() - s)) / (2 * s);
  EXPECT_NEAR(v[0], fd_theta, 1e-8);
  EXPECT_NEAR(v[1], -fd_psi, 1e-8);
}

TEST(JointField, NegationIsExact) {
  std::mt19937_64 rng(1);
  for (const auto& game : analytic_games(rng)) {
    const GameDims d = game->dims();
    for (int k = 0; k < 50; ++k) {
      const ParamPoint p(random_vector(rng, d.m + d.n, -2, 2), d.m);
      const Vector po = joint_field(*game, p, FieldConvention::PaperOriented);
      const Vector da = joint_field(*game, p, FieldConvention::DescentAscent);
      EXPECT_EQ(da, Vector(-po));
    }
  }
}

TEST(JointField, DimensionMismatch) {
  const auto game = make_quadratic({1.0, 1.0, Matrix::Zero(1, 1)});
  EXPECT_THROW(joint_field(*game, pt({1, 1, 1}, 1), FieldConvention::PaperOriented),
               DimensionError);
}

class NanOracle final : public GameOracle {
 public:
  GameDims dims() const override { return {1, 2}; }
  double value(const Vector&, const Vector&) const override { return 0.0; }
  Vector grad_x(const Vector&, const Vector&) const override { return Vector::Zero(1); }
  Vector grad_y(const Vector&, const Vector&) const override {
    Vector g = Vector::Zero(2);
    g[1] = std::numeric_limits<double>::quiet_NaN();
    return g;
  }
};

TEST(JointField, NonFiniteGradientNamesIndex) {
  NanOracle oracle;
  try {
    joint_field(oracle, pt({0, 0, 0}, 1), FieldConvention::PaperOriented);
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    EXPECT_EQ(e.index(), 2);
  }
}

TEST(JointJacobian, Examples) {
  const auto quad = make_quadratic({1.0, 1.0, Matrix::Zero(1, 1)});
  const Matrix j1 = joint_jacobian(*quad, pt({0.3, -2}, 1), FieldConvention::PaperOriented);
  EXPECT_EQ(j1, Matrix::Identity(2, 2));

  const auto bil = make_bilinear(Matrix::Constant(1, 1, 1.0));
  Matrix rot(2, 2);
  rot << 0, 1, -1, 0;
  EXPECT_EQ(joint_jacobian(*bil, pt({1, 4}, 1), FieldConvention::PaperOriented), rot);

  const auto cross = make_quadratic({1.0, 1.0, Matrix::Constant(1, 1, 0.5)});
  const Matrix j3 = joint_jacobian(*cross, pt({0.2, 0.1}, 1), FieldConvention::DescentAscent);
  Matrix expected(2, 2);
  expected << -1, -0.5, 0.5, -1;
  EXPECT_EQ(j3, expected);
  const Matrix num = joint_jacobian(*cross, pt({0.2, 0.1}, 1),
                                    FieldConvention::DescentAscent, true);
  EXPECT_LE((num - expected).cwiseAbs().maxCoeff(), 1e-12);
}

class GradientOnly final : public GameOracle {
 public:
  explicit GradientOnly(OraclePtr inner) : inner_(std::move(inner)) {}
  GameDims dims() const override { return inner_->dims(); }
  double value(const Vector& x, const Vector& y) const override { return inner_->value(x, y); }
  Vector grad_x(const Vector& x, const Vector& y) const override { return inner_->grad_x(x, y); }
  Vector grad_y(const Vector& x, const Vector& y) const override { return inner_->grad_y(x, y); }

 private:
  OraclePtr inner_;
};

TEST(JointJacobian, MissingHessianNeedsFallbackFlag) {
  GradientOnly oracle(make_quadratic({1.0, 1.0, Matrix::Constant(1, 1, 0.5)}));
  const ParamPoint p = pt({0.1, 0.2}, 1);
  EXPECT_THROW(joint_jacobian(oracle, p, FieldConvention::PaperOriented), CapabilityError);
  const Matrix j = joint_jacobian(oracle, p, FieldConvention::PaperOriented, true);
  Matrix expected(2, 2);
  expected << 1, 0.5, -0.5, 1;
  EXPECT_LE((j - expected).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(JointJacobian, MatchesNumericalJacobianAtRandomPoints) {
  std::mt19937_64 rng(2);
  for (const auto& game : analytic_games(rng)) {
    const GameDims d = game->dims();
    GradientOnly numeric(game);
    for (int k = 0; k < 100; ++k) {
      const ParamPoint p(random_vector(rng, d.m + d.n, -2, 2), d.m);
      for (FieldConvention c : {FieldConvention::PaperOriented, FieldConvention::DescentAscent}) {
        const Matrix a = joint_jacobian(*game, p, c);
        const Matrix n = joint_jacobian(numeric, p, c, true);
        EXPECT_LE((a - n).cwiseAbs().maxCoeff(), 1e-4);
      }
    }
  }
}

TEST(JointJacobian, OffDiagonalBlocksAreNegatedTransposes) {
  std::mt19937_64 rng(3);
  for (const auto& game : analytic_games(rng)) {
    const GameDims d = game->dims();
    for (int k = 0; k < 20; ++k) {
      const ParamPoint p(random_vector(rng, d.m + d.n, -2, 2), d.m);
      const Matrix j = joint_jacobian(*game, p, FieldConvention::PaperOriented);
      const Matrix xy = j.topRightCorner(d.m, d.n);
      const Matrix yx = j.bottomLeftCorner(d.n, d.m);
      EXPECT_LE((xy - (-yx).transpose()).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(CentralDifference, LinearMapIsExact) {
  Matrix a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  const auto fn = [&](const Vector& q) { return Vector(a * q); };
  const Matrix j = central_difference_jacobian(fn, Vector::Constant(3, 0.5), 1e-3);
  EXPECT_LE((j - a).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(StableNorm, SurvivesExtremeMagnitudes) {
  Vector tiny = Vector::Constant(4, 1e-200);
  EXPECT_NEAR(stable_norm(tiny) / 2e-200, 1.0, 1e-14);
  Vector huge = Vector::Constant(4, 1e200);
  EXPECT_NEAR(stable_norm(huge) / 2e200, 1.0, 1e-14);
}

TEST(GradCheck, QuadraticPassesTightly) {
  const auto game = make_quadratic({1.0, 1.0, Matrix::Zero(1, 1)});
  const CheckReport r = grad_check(*game, pt({1, 1}, 1));
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.max_error, 1e-10);
  ASSERT_TRUE(r.hessian_error.has_value());
}

TEST(GradCheck, DiracGanPasses) {
  const auto game = make_dirac_gan({DiracLoss::Logistic});
  EXPECT_TRUE(grad_check(*game, pt({0.3, -0.7}, 1)).passed);
}

class Corrupted final : public GameOracle {
 public:
  explicit Corrupted(OraclePtr inner) : inner_(std::move(inner)) {}
  GameDims dims() const override { return inner_->dims(); }
  double value(const Vector& x, const Vector& y) const override { return inner_->value(x, y); }
  Vector grad_x(const Vector& x, const Vector& y) const override {
    Vector g = inner_->grad_x(x, y);
    g[0] += 0.1;
    return g;
  }
  Vector grad_y(const Vector& x, const Vector& y) const override { return inner_->grad_y(x, y); }

 private:
  OraclePtr inner_;
};

TEST(GradCheck, CorruptedGradientFails) {
  Corrupted oracle(make_quadratic({1.0, 1.0, Matrix::Zero(1, 1)}));
  const CheckReport r = grad_check(oracle, pt({1, 1}, 1));
  EXPECT_FALSE(r.passed);
  EXPECT_GE(r.max_error, 0.09);
}

TEST(GradCheck, NonFiniteIsReportedNotThrown) {
  NanOracle oracle;
  CheckReport r;
  EXPECT_NO_THROW(r = grad_check(oracle, pt({0, 0, 0}, 1)));
  EXPECT_TRUE(r.non_finite);
  EXPECT_FALSE(r.passed);
}

}  // namespace
}  // namespace minimax
