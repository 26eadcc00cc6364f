#pragma once

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "minimax/mlp.hpp"
#include "minimax/solvers.hpp"

namespace minimax {

struct Gaussian1D {
  double mean = 2.0;
  double std = 0.5;
  bool operator==(const Gaussian1D&) const = default;
};

// k Gaussian modes evenly spaced on a circle.
struct Ring2D {
  int modes = 8;
  double radius = 2.0;
  double mode_std = 0.02;
  bool operator==(const Ring2D&) const = default;
};

using GanTarget = std::variant<Gaussian1D, Ring2D>;

Index data_dim(const GanTarget& target);
Matrix sample_target(const GanTarget& target, Index count, std::mt19937_64& rng);

enum class GanLossKind { NonSaturating, WganClipped, WganGpFd };
std::string_view to_string(GanLossKind kind);
GanLossKind parse_gan_loss(std::string_view name);

struct GanLoss {
  GanLossKind kind = GanLossKind::NonSaturating;
  double clip = 0.01;       // WganClipped
  double gp_lambda = 10.0;  // WganGpFd
  double fd_step = 1e-3;    // WganGpFd
  bool operator==(const GanLoss&) const = default;
};

struct ToyGanConfig {
  GanTarget target = Gaussian1D{};
  Index latent_dim = 1;
  Index batch_size = 64;
  GanLoss loss;
  std::vector<Index> generator_hidden{16};
  std::vector<Index> discriminator_hidden{16};
  Activation activation = Activation::Tanh;
  double leaky_slope = 0.2;
  SolverConfig solver;
  std::uint64_t seed = 0;
  std::int64_t steps = 20000;
  std::int64_t eval_every = 500;
  Index eval_samples = 4096;
  double blowup = 1e6;
  bool operator==(const ToyGanConfig&) const = default;
};

std::vector<std::string> validate(const ToyGanConfig& cfg);

// latent -> hidden... -> data, identity head.
MlpSpec generator_spec(const ToyGanConfig& cfg);
// data -> hidden... -> 1; sigmoid head for the non-saturating loss, identity for WGAN.
MlpSpec discriminator_spec(const ToyGanConfig& cfg);

// Generator parameters first (x, min player), discriminator second (y, max player).
ParamPoint init_gan_params(const ToyGanConfig& cfg, std::mt19937_64& rng);

struct GanBatch {
  Matrix real;    // data_dim x B
  Matrix latent;  // latent_dim x B
  Vector mix;     // interpolation weights for the gradient penalty
};

GanBatch sample_batch(const ToyGanConfig& cfg, std::mt19937_64& rng);

// The generator minimises generator_loss; the discriminator maximises discriminator_value.
// Both coincide (zero-sum) for the WGAN losses without penalty.
struct GanLosses {
  double generator_loss = 0.0;
  double discriminator_value = 0.0;
};

GanLosses gan_losses(const ToyGanConfig& cfg, const ParamPoint& p, const GanBatch& batch,
                     bool include_penalty = true);

// PaperOriented: [grad_x generator_loss; -grad_y discriminator_value]; negated under
// DescentAscent. With WganGpFd the penalty's parameter gradient is approximated by central
// differences of the critic's parameter gradient along the unit input-gradient direction.
JointVector gan_field(const ToyGanConfig& cfg, const ParamPoint& p, const GanBatch& batch,
                      bool include_penalty = true);

// Projects discriminator parameters onto [-clip, clip] (WganClipped only).
void clip_discriminator(const ToyGanConfig& cfg, Vector& joint);

Matrix generate_samples(const ToyGanConfig& cfg, const ParamPoint& p, const Matrix& latent);

struct GanRun {
  std::vector<TrajectoryRow> rows;  // logged every eval_every steps and at the end
  Verdict verdict = Verdict::IterCap;
  ParamPoint final_point = ParamPoint(Vector(), 0);
  std::int64_t steps_taken = 0;
};

// Simultaneous updates with GDA, GN or GNAdaptive. Deterministic for a fixed config.
GanRun train_toy_gan(const ToyGanConfig& cfg);

}  // namespace minimax
