#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "minimax/eigen_qr.hpp"
#include "minimax/solvers.hpp"

namespace minimax {

// Eigenvalue real parts within this margin of zero count as zero.
inline constexpr double kSignMargin = 1e-10;
// |v(p)| threshold for "p is a stationary point".
inline constexpr double kStationaryTolerance = 1e-8;

enum class Classification { NashCandidate, NotNash, Indeterminate };
std::string_view to_string(Classification c);

enum class Definiteness { Positive, PositiveSemi, Negative, NegativeSemi, Indefinite, Zero };
std::string_view to_string(Definiteness d);

enum class JacobianMode { AtEquilibrium, NumericalGeneral };

// sigma = h (1/lambda - 1): the effective step of F'(p) = I + sigma v'(p) at an equilibrium.
inline double sigma_of(const GNConfig& cfg) { return cfg.step * (1.0 / cfg.lambda - 1.0); }
// Inverse of sigma_of for a fixed lambda < 1.
double step_for_sigma(double sigma, double lambda);

// AtEquilibrium: I + sigma v'(p), requires |v(p)| <= kStationaryTolerance.
// NumericalGeneral: central differences of p -> p + h gn_delta(v(p), lambda).
Matrix fixed_point_jacobian(const GameOracle& oracle, const ParamPoint& p, const GNConfig& cfg,
                            FieldConvention conv, JacobianMode mode);

// min over xi of (1/|Re xi|) * 2 / (1 + (Im xi / Re xi)^2). Throws std::domain_error if any
// Re xi >= 0 (the bound does not apply).
double sigma_bound(const std::vector<Complex>& eigs);
std::optional<double> try_sigma_bound(const std::vector<Complex>& eigs);

// Eigenvalues of a symmetric matrix turned into a definiteness verdict with kSignMargin.
Definiteness definiteness_of_symmetric(const Matrix& m);

struct StationaryClassification {
  Classification classification = Classification::Indeterminate;
  // Eigenvalues of the Jacobian under the requested convention.
  std::vector<Complex> jacobian_eigenvalues;
  // Definiteness of sym(f_xx) and sym(f_yy).
  Definiteness hess_xx = Definiteness::Zero;
  Definiteness hess_yy = Definiteness::Zero;
  // Quadratic-form verdict from the blocks: f_xx PSD and f_yy NSD (v' NSD under descent-ascent).
  bool blocks_semidefinite = false;
  // Eigenvalue verdict: all Re xi <= margin of the descent-ascent Jacobian.
  bool eigen_semidefinite = false;
  bool verdicts_agree = true;
};

// Classification is always taken from the descent-ascent Jacobian, where a strict local Nash
// point has eigenvalues with negative real parts.
StationaryClassification classify_stationary(const GameOracle& oracle, const ParamPoint& p,
                                             FieldConvention conv);

struct SpectralReport {
  std::vector<Complex> field_eigenvalues;   // of v'(p) under the convention
  std::vector<Complex> update_eigenvalues;  // of F'(p) = I + sigma v'(p)
  double spectral_radius = 0.0;             // max |update eigenvalue|
  double sigma = 0.0;
  std::optional<double> sigma_bound;        // empty when some Re xi >= 0
  bool contraction = false;                 // spectral_radius < 1
  StationaryClassification classification;
};

SpectralReport spectral_report(const GameOracle& oracle, const ParamPoint& equilibrium,
                               const GNConfig& cfg, FieldConvention conv);

struct ContractionResult {
  double predicted = 0.0;           // spectral radius of F'(p_bar)
  std::optional<double> measured;   // empty when the run diverged
  Verdict verdict = Verdict::IterCap;
};

inline constexpr int kContractionWindow = 100;

// Runs GN from p0 with the tolerance stop disabled and measures the geometric-mean
// per-step ratio |p_{t+1} - p_bar| / |p_t - p_bar| over the last kContractionWindow steps.
ContractionResult contraction_experiment(const GameOracle& oracle, const GNConfig& cfg,
                                         FieldConvention conv, const ParamPoint& p0,
                                         std::int64_t iters);

}  // namespace minimax
