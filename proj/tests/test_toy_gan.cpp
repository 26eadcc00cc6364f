#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "minimax/config.hpp"
#include "minimax/errors.hpp"
#include "minimax/record.hpp"
#include "minimax/toy_gan.hpp"
#include "test_util.hpp"

namespace minimax {
namespace {

ToyGanConfig small_config(GanLossKind kind) {
  ToyGanConfig cfg;
  cfg.loss.kind = kind;
  cfg.batch_size = 16;
  cfg.generator_hidden = {6};
  cfg.discriminator_hidden = {5};
  cfg.solver.kind = SolverKind::GDA;
  cfg.solver.gn.step = 0.01;
  cfg.steps = 40;
  cfg.eval_every = 10;
  cfg.eval_samples = 256;
  return cfg;
}

TEST(ToyGanConfig, Validation) {
  EXPECT_NO_THROW(validate(ToyGanConfig{}));
  ToyGanConfig cfg;
  cfg.batch_size = 1;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = ToyGanConfig{};
  cfg.loss.kind = GanLossKind::WganClipped;
  cfg.loss.clip = 0.0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = ToyGanConfig{};
  cfg.loss.kind = GanLossKind::WganGpFd;
  cfg.loss.gp_lambda = -1.0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = ToyGanConfig{};
  cfg.generator_hidden.clear();
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = ToyGanConfig{};
  cfg.solver.kind = SolverKind::CGD;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  for (GanLossKind k : {GanLossKind::NonSaturating, GanLossKind::WganClipped, GanLossKind::WganGpFd}) {
    EXPECT_EQ(parse_gan_loss(to_string(k)), k);
  }
}

TEST(ToyGan, Targets) {
  std::mt19937_64 rng(70);
  const Matrix g = sample_target(Gaussian1D{2.0, 0.5}, 20000, rng);
  EXPECT_EQ(g.rows(), 1);
  EXPECT_NEAR(g.mean(), 2.0, 0.02);
  const Matrix r = sample_target(Ring2D{}, 2000, rng);
  ASSERT_EQ(r.rows(), 2);
  for (Index i = 0; i < r.cols(); ++i) EXPECT_NEAR(r.col(i).norm(), 2.0, 0.15);
  EXPECT_EQ(data_dim(Ring2D{}), 2);
}

TEST(ToyGan, ConstantDiscriminatorGivesZeroGeneratorGradient) {
  ToyGanConfig cfg = small_config(GanLossKind::NonSaturating);
  std::mt19937_64 rng(71);
  ParamPoint p = init_gan_params(cfg, rng);
  Vector values = p.values();
  const Index last = cfg.discriminator_hidden.back() + 1;  // final weights and bias
  values.tail(last).setZero();
  p = p.with_values(values);
  const GanBatch batch = sample_batch(cfg, rng);
  const Vector v = gan_field(cfg, p, batch);
  EXPECT_EQ(v.head(p.m()), Vector::Zero(p.m()));
  // Finite differences agree: the loss is flat in x.
  const auto loss = [&](const Vector& x) {
    Vector q = p.values();
    q.head(p.m()) = x;
    return gan_losses(cfg, p.with_values(q), batch).generator_loss;
  };
  EXPECT_LE(testing::fd_gradient(loss, p.x(), 1e-5).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ToyGan, ZeroPenaltyEqualsPlainWgan) {
  ToyGanConfig gp = small_config(GanLossKind::WganGpFd);
  gp.loss.gp_lambda = 0.0;
  ToyGanConfig plain = small_config(GanLossKind::WganClipped);
  plain.loss.clip = 1e9;
  std::mt19937_64 rng(72);
  const ParamPoint p = init_gan_params(gp, rng);
  const GanBatch batch = sample_batch(gp, rng);
  EXPECT_EQ(gan_field(gp, p, batch), gan_field(plain, p, batch));
  ToyGanConfig with_gp = gp;
  with_gp.loss.gp_lambda = 10.0;
  EXPECT_EQ(gan_field(with_gp, p, batch, false), gan_field(plain, p, batch));
  EXPECT_FALSE(gan_field(with_gp, p, batch) == gan_field(plain, p, batch));
}

TEST(ToyGan, FieldIsDeterministic) {
  const ToyGanConfig cfg = small_config(GanLossKind::NonSaturating);
  std::mt19937_64 a(73);
  std::mt19937_64 b(73);
  const ParamPoint pa = init_gan_params(cfg, a);
  const ParamPoint pb = init_gan_params(cfg, b);
  EXPECT_EQ(pa, pb);
  EXPECT_EQ(gan_field(cfg, pa, sample_batch(cfg, a)), gan_field(cfg, pb, sample_batch(cfg, b)));
}

TEST(ToyGan, ConventionNegatesField) {
  ToyGanConfig cfg = small_config(GanLossKind::NonSaturating);
  std::mt19937_64 rng(74);
  const ParamPoint p = init_gan_params(cfg, rng);
  const GanBatch batch = sample_batch(cfg, rng);
  const Vector po = gan_field(cfg, p, batch);
  cfg.solver.convention = FieldConvention::DescentAscent;
  EXPECT_EQ(gan_field(cfg, p, batch), Vector(-po));
}

void check_field_fidelity(const ToyGanConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ParamPoint p = init_gan_params(cfg, rng);
  const GanBatch batch = sample_batch(cfg, rng);
  const Vector v = gan_field(cfg, p, batch, false);
  const double h = 1e-6;
  for (int k = 0; k < 20; ++k) {
    const Index i = static_cast<Index>(rng() % static_cast<std::uint64_t>(p.dim()));
    Vector a = p.values();
    Vector b = p.values();
    a[i] += h;
    b[i] -= h;
    const GanLosses la = gan_losses(cfg, p.with_values(a), batch, false);
    const GanLosses lb = gan_losses(cfg, p.with_values(b), batch, false);
    const double fd = i < p.m() ? (la.generator_loss - lb.generator_loss) / (2 * h)
                                : -(la.discriminator_value - lb.discriminator_value) / (2 * h);
    EXPECT_LE(std::abs(fd - v[i]), 1e-4 * std::max(std::abs(fd), 1e-3)) << "coordinate " << i;
  }
}

TEST(ToyGan, FieldMatchesFiniteDifferences) {
  for (GanLossKind k : {GanLossKind::NonSaturating, GanLossKind::WganClipped, GanLossKind::WganGpFd}) {
    ToyGanConfig cfg = small_config(k);
    cfg.loss.clip = 1.0;  // leave the initial critic unclipped so gradients are non-trivial
    check_field_fidelity(cfg, 75);
    cfg.target = Ring2D{};
    cfg.latent_dim = 2;
    cfg.activation = Activation::LeakyReLU;
    check_field_fidelity(cfg, 76);
  }
}

// The penalty gradient is approximated; it still has to track the penalty's own derivative.
TEST(ToyGan, PenaltyGradientApproximation) {
  ToyGanConfig cfg = small_config(GanLossKind::WganGpFd);
  cfg.activation = Activation::Tanh;
  std::mt19937_64 rng(77);
  const ParamPoint p = init_gan_params(cfg, rng);
  const GanBatch batch = sample_batch(cfg, rng);
  const Vector v = gan_field(cfg, p, batch);
  const double h = 1e-6;
  for (Index i = p.m(); i < p.dim(); i += 3) {
    Vector a = p.values();
    Vector b = p.values();
    a[i] += h;
    b[i] -= h;
    const double fd = -(gan_losses(cfg, p.with_values(a), batch).discriminator_value -
                        gan_losses(cfg, p.with_values(b), batch).discriminator_value) / (2 * h);
    EXPECT_LE(std::abs(fd - v[i]), 1e-3 * std::max(std::abs(fd), 1.0));
  }
}

TEST(ToyGan, EmptyBatchRejected) {
  const ToyGanConfig cfg = small_config(GanLossKind::NonSaturating);
  std::mt19937_64 rng(78);
  const ParamPoint p = init_gan_params(cfg, rng);
  GanBatch batch;
  batch.real = Matrix(1, 0);
  batch.latent = Matrix(1, 0);
  EXPECT_THROW(gan_field(cfg, p, batch), std::invalid_argument);
}

TEST(ToyGan, ClippingHoldsAfterEveryUpdate) {
  ToyGanConfig cfg = small_config(GanLossKind::WganClipped);
  cfg.solver.gn.step = 0.5;
  cfg.loss.clip = 0.05;
  std::mt19937_64 rng(79);
  ParamPoint p = init_gan_params(cfg, rng);
  EXPECT_LE(p.y().cwiseAbs().maxCoeff(), 0.05);
  for (std::int64_t steps : {1, 7, 40}) {
    cfg.steps = steps;
    const GanRun run = train_toy_gan(cfg);
    EXPECT_LE(run.final_point.y().cwiseAbs().maxCoeff(), 0.05);
    EXPECT_EQ(run.final_point.y().cwiseAbs().maxCoeff(), 0.05);  // something hit the box
  }
}

TEST(ToyGan, ZeroStepsLogsBaseline) {
  ToyGanConfig cfg = small_config(GanLossKind::NonSaturating);
  cfg.steps = 0;
  const GanRun run = train_toy_gan(cfg);
  ASSERT_EQ(run.rows.size(), 1u);
  EXPECT_EQ(run.rows[0].iter, 0);
  ASSERT_TRUE(run.rows[0].metric.has_value());
  EXPECT_GT(*run.rows[0].metric, 0.0);
  EXPECT_EQ(run.steps_taken, 0);
  std::mt19937_64 rng(cfg.seed);
  EXPECT_EQ(run.final_point, init_gan_params(cfg, rng));
}

TEST(ToyGan, RowsAtEvalCadenceAndEnd) {
  ToyGanConfig cfg = small_config(GanLossKind::NonSaturating);
  cfg.steps = 45;
  const GanRun run = train_toy_gan(cfg);
  std::vector<std::int64_t> iters;
  for (const auto& r : run.rows) iters.push_back(r.iter);
  EXPECT_EQ(iters, (std::vector<std::int64_t>{0, 10, 20, 30, 40, 45}));
}

TEST(ToyGan, TrainingIsDeterministic) {
  for (SolverKind k : {SolverKind::GDA, SolverKind::GN, SolverKind::GNAdaptive}) {
    ToyGanConfig cfg = small_config(GanLossKind::NonSaturating);
    cfg.solver.kind = k;
    const GanRun a = train_toy_gan(cfg);
    const GanRun b = train_toy_gan(cfg);
    EXPECT_EQ(a.final_point, b.final_point);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      EXPECT_EQ(a.rows[i].field_norm, b.rows[i].field_norm);
      EXPECT_EQ(a.rows[i].metric, b.rows[i].metric);
    }
    cfg.seed = 1;
    EXPECT_FALSE(train_toy_gan(cfg).final_point == a.final_point);
  }
}

TEST(ToyGan, DivergenceGuard) {
  ToyGanConfig cfg = small_config(GanLossKind::WganGpFd);
  cfg.solver.gn.step = 1e6;
  cfg.blowup = 1e3;
  const GanRun run = train_toy_gan(cfg);
  EXPECT_EQ(run.verdict, Verdict::Diverged);
  EXPECT_LT(run.steps_taken, cfg.steps);
}

TEST(ToyGan, SnapshotRoundTrip) {
  ExperimentConfig cfg;
  cfg.gan = small_config(GanLossKind::NonSaturating);
  cfg.solver = cfg.gan->solver;
  cfg = resolve(cfg, FieldConvention::PaperOriented);
  const RunRecord rec = execute_run(cfg);
  const Snapshot snap = gan_snapshot(rec);
  const auto path = std::filesystem::temp_directory_path() / "minimax_snapshot_test.bin";
  write_snapshot(path, snap);
  const Snapshot back = read_snapshot(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.header, snap.header);
  ASSERT_EQ(back.values.size(), rec.final_point.size());
  for (std::size_t i = 0; i < back.values.size(); ++i) EXPECT_EQ(back.values[i], rec.final_point[i]);
}

}  // namespace
}  // namespace minimax
