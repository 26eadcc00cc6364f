#include "minimax/toy_gan.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "minimax/energy_distance.hpp"
#include "minimax/errors.hpp"

namespace minimax {

Index data_dim(const GanTarget& target) {
  return std::holds_alternative<Gaussian1D>(target) ? 1 : 2;
}

Matrix sample_target(const GanTarget& target, Index count, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  if (const auto* g = std::get_if<Gaussian1D>(&target)) {
    Matrix out(1, count);
    for (Index i = 0; i < count; ++i) out(0, i) = g->mean + g->std * normal(rng);
    return out;
  }
  const auto& ring = std::get<Ring2D>(target);
  std::uniform_int_distribution<int> pick(0, ring.modes - 1);
  Matrix out(2, count);
  for (Index i = 0; i < count; ++i) {
    const double angle = 2.0 * std::numbers::pi * pick(rng) / ring.modes;
    out(0, i) = ring.radius * std::cos(angle) + ring.mode_std * normal(rng);
    out(1, i) = ring.radius * std::sin(angle) + ring.mode_std * normal(rng);
  }
  return out;
}

std::string_view to_string(GanLossKind kind) {
  switch (kind) {
    case GanLossKind::NonSaturating: return "non_saturating";
    case GanLossKind::WganClipped: return "wgan_clipped";
    case GanLossKind::WganGpFd: return "wgan_gp_fd";
  }
  return "?";
}

GanLossKind parse_gan_loss(std::string_view name) {
  for (GanLossKind k :
       {GanLossKind::NonSaturating, GanLossKind::WganClipped, GanLossKind::WganGpFd}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown GAN loss '" + std::string(name) + "'");
}

std::vector<std::string> validate(const ToyGanConfig& cfg) {
  if (const auto* g = std::get_if<Gaussian1D>(&cfg.target)) {
    if (!(g->std > 0.0) || !std::isfinite(g->mean)) {
      throw std::invalid_argument("gaussian1d target needs finite mean and std > 0");
    }
  } else {
    const auto& r = std::get<Ring2D>(cfg.target);
    if (r.modes < 1 || !(r.radius >= 0.0) || !(r.mode_std > 0.0)) {
      throw std::invalid_argument("ring2d target needs modes >= 1, radius >= 0, mode_std > 0");
    }
  }
  if (cfg.latent_dim < 1) throw std::invalid_argument("latent_dim must be >= 1");
  if (cfg.batch_size < 2) throw std::invalid_argument("batch_size must be >= 2");
  if (cfg.generator_hidden.empty() || cfg.discriminator_hidden.empty()) {
    throw std::invalid_argument("generator and discriminator need at least one hidden layer");
  }
  if (cfg.loss.kind == GanLossKind::WganClipped && !(cfg.loss.clip > 0.0)) {
    throw std::invalid_argument("clip must be > 0 for wgan_clipped");
  }
  if (cfg.loss.kind == GanLossKind::WganGpFd) {
    if (!(cfg.loss.gp_lambda >= 0.0)) throw std::invalid_argument("gp_lambda must be >= 0");
    if (!(cfg.loss.fd_step > 0.0)) throw std::invalid_argument("fd_step must be > 0");
  }
  if (cfg.steps < 0) throw std::invalid_argument("steps must be >= 0");
  if (cfg.eval_every < 1) throw std::invalid_argument("eval_every must be >= 1");
  if (cfg.eval_samples < 1) throw std::invalid_argument("eval_samples must be >= 1");
  const SolverKind k = cfg.solver.kind;
  if (k != SolverKind::GDA && k != SolverKind::GN && k != SolverKind::GNAdaptive) {
    throw std::invalid_argument("toy GAN supports the gda, gn and gn-adaptive solvers only");
  }
  std::vector<std::string> warnings = validate(cfg.solver);
  validate(generator_spec(cfg));
  validate(discriminator_spec(cfg));
  return warnings;
}

MlpSpec generator_spec(const ToyGanConfig& cfg) {
  MlpSpec spec;
  spec.widths.push_back(cfg.latent_dim);
  spec.widths.insert(spec.widths.end(), cfg.generator_hidden.begin(), cfg.generator_hidden.end());
  spec.widths.push_back(data_dim(cfg.target));
  spec.activation = cfg.activation;
  spec.leaky_slope = cfg.leaky_slope;
  spec.head = OutputActivation::Identity;
  return spec;
}

MlpSpec discriminator_spec(const ToyGanConfig& cfg) {
  MlpSpec spec;
  spec.widths.push_back(data_dim(cfg.target));
  spec.widths.insert(spec.widths.end(), cfg.discriminator_hidden.begin(),
                     cfg.discriminator_hidden.end());
  spec.widths.push_back(1);
  spec.activation = cfg.activation;
  spec.leaky_slope = cfg.leaky_slope;
  spec.head = cfg.loss.kind == GanLossKind::NonSaturating ? OutputActivation::Sigmoid
                                                           : OutputActivation::Identity;
  return spec;
}

void clip_discriminator(const ToyGanConfig& cfg, Vector& joint) {
  if (cfg.loss.kind != GanLossKind::WganClipped) return;
  const Index n_gen = generator_spec(cfg).param_count();
  auto disc = joint.tail(joint.size() - n_gen);
  disc = disc.cwiseMax(-cfg.loss.clip).cwiseMin(cfg.loss.clip);
}

ParamPoint init_gan_params(const ToyGanConfig& cfg, std::mt19937_64& rng) {
  const MlpSpec g = generator_spec(cfg);
  const MlpSpec d = discriminator_spec(cfg);
  const Vector pg = init_mlp_params(g, rng);
  const Vector pd = init_mlp_params(d, rng);
  Vector joint(pg.size() + pd.size());
  joint << pg, pd;
  clip_discriminator(cfg, joint);
  return ParamPoint(std::move(joint), pg.size());
}

GanBatch sample_batch(const ToyGanConfig& cfg, std::mt19937_64& rng) {
  GanBatch batch;
  batch.real = sample_target(cfg.target, cfg.batch_size, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  batch.latent.resize(cfg.latent_dim, cfg.batch_size);
  for (Index j = 0; j < batch.latent.cols(); ++j) {
    for (Index i = 0; i < batch.latent.rows(); ++i) batch.latent(i, j) = normal(rng);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  batch.mix.resize(cfg.batch_size);
  for (Index i = 0; i < batch.mix.size(); ++i) batch.mix[i] = unit(rng);
  return batch;
}

Matrix generate_samples(const ToyGanConfig& cfg, const ParamPoint& p, const Matrix& latent) {
  return mlp_forward(generator_spec(cfg), p.values().head(p.split()), latent);
}

namespace {

double log_sigmoid(double t) { return t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t)); }
double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Everything the loss and field computations share for one (p, batch).
struct GanPass {
  MlpSpec gen;
  MlpSpec critic;  // discriminator with identity head (logits for the non-saturating loss)
  Eigen::Ref<const Vector> gen_params;
  Eigen::Ref<const Vector> critic_params;
  Matrix fake;
  Matrix out_real;  // 1 x B
  Matrix out_fake;
};

GanPass forward_pass(const ToyGanConfig& cfg, const ParamPoint& p, const GanBatch& batch) {
  if (batch.real.cols() == 0 || batch.latent.cols() == 0) {
    throw std::invalid_argument("gan: empty batch");
  }
  if (batch.real.cols() != batch.latent.cols()) {
    throw DimensionError("gan: real and latent batches differ in size");
  }
  MlpSpec gen = generator_spec(cfg);
  MlpSpec critic = discriminator_spec(cfg);
  critic.head = OutputActivation::Identity;
  if (p.m() != gen.param_count() || p.n() != critic.param_count()) {
    throw DimensionError("gan: parameter point does not match the network sizes");
  }
  const Vector& values = p.values();
  GanPass pass{gen, critic, values.head(p.m()), values.tail(p.n()), {}, {}, {}};
  pass.fake = mlp_forward(gen, pass.gen_params, batch.latent);
  pass.out_real = mlp_forward(critic, pass.critic_params, batch.real);
  pass.out_fake = mlp_forward(critic, pass.critic_params, pass.fake);
  return pass;
}

Matrix interpolates(const GanPass& pass, const GanBatch& batch) {
  if (batch.mix.size() != batch.real.cols()) {
    throw DimensionError("gan: interpolation weights do not match the batch");
  }
  Matrix u(batch.real.rows(), batch.real.cols());
  for (Index i = 0; i < u.cols(); ++i) {
    u.col(i) = batch.mix[i] * batch.real.col(i) + (1.0 - batch.mix[i]) * pass.fake.col(i);
  }
  return u;
}

}  // namespace

GanLosses gan_losses(const ToyGanConfig& cfg, const ParamPoint& p, const GanBatch& batch,
                     bool include_penalty) {
  const GanPass pass = forward_pass(cfg, p, batch);
  const double b = static_cast<double>(batch.real.cols());
  GanLosses out;
  if (cfg.loss.kind == GanLossKind::NonSaturating) {
    double v = 0.0;
    double g = 0.0;
    for (Index i = 0; i < pass.out_real.cols(); ++i) v += log_sigmoid(pass.out_real(0, i));
    for (Index i = 0; i < pass.out_fake.cols(); ++i) {
      v += log_sigmoid(-pass.out_fake(0, i));
      g -= log_sigmoid(pass.out_fake(0, i));
    }
    out.discriminator_value = v / b;
    out.generator_loss = g / b;
    return out;
  }
  const double f = pass.out_real.mean() - pass.out_fake.mean();
  out.generator_loss = f;
  out.discriminator_value = f;
  if (cfg.loss.kind == GanLossKind::WganGpFd && include_penalty && cfg.loss.gp_lambda > 0.0) {
    const Matrix u = interpolates(pass, batch);
    const Matrix ones = Matrix::Ones(1, u.cols());
    const MlpGradients g = mlp_backward(pass.critic, pass.critic_params, u, ones);
    const Eigen::ArrayXd norms = g.input.colwise().norm().transpose().array();
    out.discriminator_value -= cfg.loss.gp_lambda * (norms - 1.0).square().mean();
  }
  return out;
}

JointVector gan_field(const ToyGanConfig& cfg, const ParamPoint& p, const GanBatch& batch,
                      bool include_penalty) {
  const GanPass pass = forward_pass(cfg, p, batch);
  const Index bsz = batch.real.cols();
  const double b = static_cast<double>(bsz);

  Vector grad_gen;     // d generator_loss / dx
  Vector grad_critic;  // d discriminator_value / dy
  if (cfg.loss.kind == GanLossKind::NonSaturating) {
    Matrix up_real(1, bsz);
    Matrix up_fake_d(1, bsz);
    Matrix up_fake_g(1, bsz);
    for (Index i = 0; i < bsz; ++i) {
      up_real(0, i) = (1.0 - sigmoid(pass.out_real(0, i))) / b;
      const double sf = sigmoid(pass.out_fake(0, i));
      up_fake_d(0, i) = -sf / b;
      up_fake_g(0, i) = -(1.0 - sf) / b;
    }
    grad_critic = mlp_backward(pass.critic, pass.critic_params, batch.real, up_real).params +
                  mlp_backward(pass.critic, pass.critic_params, pass.fake, up_fake_d).params;
    const Matrix dfake =
        mlp_backward(pass.critic, pass.critic_params, pass.fake, up_fake_g).input;
    grad_gen = mlp_backward(pass.gen, pass.gen_params, batch.latent, dfake).params;
  } else {
    const Matrix up_real = Matrix::Constant(1, bsz, 1.0 / b);
    const Matrix up_fake = Matrix::Constant(1, bsz, -1.0 / b);
    const MlpGradients fake_grads =
        mlp_backward(pass.critic, pass.critic_params, pass.fake, up_fake);
    grad_critic =
        mlp_backward(pass.critic, pass.critic_params, batch.real, up_real).params +
        fake_grads.params;
    grad_gen = mlp_backward(pass.gen, pass.gen_params, batch.latent, fake_grads.input).params;

    if (cfg.loss.kind == GanLossKind::WganGpFd && include_penalty && cfg.loss.gp_lambda > 0.0) {
      // P = mean (|grad_u D(u_i)| - 1)^2 over interpolates u_i. With w_i the unit input
      // gradient, d|grad_u D(u_i)| / dy = d/dy [grad_u D(u_i) . w_i], approximated by
      // (grad_y D(u_i + s w_i) - grad_y D(u_i - s w_i)) / 2s.
      const Matrix u = interpolates(pass, batch);
      const Matrix ones = Matrix::Ones(1, bsz);
      const Matrix gin = mlp_backward(pass.critic, pass.critic_params, u, ones).input;
      Matrix dir = Matrix::Zero(u.rows(), bsz);
      Matrix weight = Matrix::Zero(1, bsz);
      for (Index i = 0; i < bsz; ++i) {
        const double norm = gin.col(i).norm();
        if (norm == 0.0) continue;
        dir.col(i) = gin.col(i) / norm;
        weight(0, i) = 2.0 * (norm - 1.0) / b;
      }
      const double s = cfg.loss.fd_step;
      const Vector plus = mlp_backward(pass.critic, pass.critic_params, u + s * dir, weight).params;
      const Vector minus =
          mlp_backward(pass.critic, pass.critic_params, u - s * dir, weight).params;
      grad_critic -= cfg.loss.gp_lambda * (plus - minus) / (2.0 * s);
    }
  }

  JointVector v(p.dim());
  v << grad_gen, -grad_critic;
  if (cfg.solver.convention == FieldConvention::DescentAscent) v = -v;
  require_finite(v, "gan field");
  return v;
}

GanRun train_toy_gan(const ToyGanConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  // Evaluation sets come from their own stream so logging does not perturb training.
  std::mt19937_64 eval_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const Matrix eval_target = sample_target(cfg.target, cfg.eval_samples, eval_rng);
  Matrix eval_latent(cfg.latent_dim, cfg.eval_samples);
  {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Index j = 0; j < eval_latent.cols(); ++j) {
      for (Index i = 0; i < eval_latent.rows(); ++i) eval_latent(i, j) = normal(eval_rng);
    }
  }

  GanRun run;
  ParamPoint p = init_gan_params(cfg, rng);
  const SolverConfig& solver = cfg.solver;
  std::optional<AdaptiveState> adaptive;
  const auto start = std::chrono::steady_clock::now();

  run.verdict = Verdict::IterCap;
  for (std::int64_t t = 0;; ++t) {
    const GanBatch batch = sample_batch(cfg, rng);
    JointVector v;
    try {
      v = gan_field(cfg, p, batch);
    } catch (const NonFiniteError&) {
      run.verdict = Verdict::Diverged;
      break;
    }
    if (t % cfg.eval_every == 0 || t == cfg.steps) {
      TrajectoryRow row;
      row.iter = t;
      row.field_norm = stable_norm(v);
      row.value = gan_losses(cfg, p, batch).generator_loss;
      row.metric = energy_distance(generate_samples(cfg, p, eval_latent), eval_target);
      row.wall_time =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      run.rows.push_back(row);
    }
    if (t == cfg.steps) break;

    Vector delta;
    switch (solver.kind) {
      case SolverKind::GDA:
        delta = gda_delta(v, solver.convention);
        break;
      case SolverKind::GN:
        delta = gn_delta(v, solver.gn.lambda);
        break;
      case SolverKind::GNAdaptive:
        if (!adaptive) adaptive = init_adaptive_state(v, solver.adaptive);
        delta = adaptive_delta(v, *adaptive, solver.gn);
        break;
      default:
        throw std::logic_error("unsupported toy GAN solver");
    }
    Vector next = p.values() + solver.gn.step * delta;
    clip_discriminator(cfg, next);
    run.steps_taken = t + 1;
    if (!next.allFinite() || stable_norm(next) >= cfg.blowup) {
      run.verdict = Verdict::Diverged;
      break;
    }
    p = p.with_values(std::move(next));
  }
  run.final_point = p;
  return run;
}

}  // namespace minimax
