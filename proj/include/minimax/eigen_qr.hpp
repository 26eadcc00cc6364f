#pragma once

#include <complex>
#include <vector>

#include "minimax/vecfield.hpp"

namespace minimax {

using Complex = std::complex<double>;

struct EigenOptions {
  int max_iterations_per_eigenvalue = 100;
  // How many eigenvalues get an inverse-iteration residual check (0 disables).
  int verify_samples = 4;
  double residual_tolerance = 1e-8;  // relative to the Frobenius norm of the input
};

inline constexpr Index kEigenMaxDim = 256;

// Parlett-Reinsch balancing, in place. Returns the diagonal similarity scaling.
Vector balance(Matrix& a);

// Householder reduction to upper Hessenberg form, in place (eigenvalues only).
void reduce_to_hessenberg(Matrix& a);

// Francis double-shift QR on an upper Hessenberg matrix. Throws ConvergenceError.
std::vector<Complex> hessenberg_qr_eigenvalues(Matrix h, int max_iterations_per_eigenvalue);

// All eigenvalues of a real square matrix, sorted by (real, imag). Conjugate pairs are
// reported exactly conjugate.
std::vector<Complex> eigenvalues(const Matrix& m, const EigenOptions& options = {});

// Residual |M w - xi w| / |w| of an inverse-iteration eigenvector for xi.
double eigen_residual(const Matrix& m, Complex xi);

double spectral_radius(const std::vector<Complex>& eigs);

}  // namespace minimax
