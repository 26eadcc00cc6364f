#include "minimax/eigen_qr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "minimax/errors.hpp"

namespace minimax {

namespace {

double sign_of(double magnitude, double sign_source) {
  return sign_source >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

}  // namespace

Vector balance(Matrix& a) {
  const Index n = a.rows();
  constexpr double radix = std::numeric_limits<double>::radix;
  constexpr double sqr_radix = radix * radix;
  Vector scale = Vector::Ones(n);
  bool done = false;
  while (!done) {
    done = true;
    for (Index i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqr_radix;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqr_radix;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        scale[i] *= f;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
  return scale;
}

void reduce_to_hessenberg(Matrix& a) {
  const Index n = a.rows();
  for (Index k = 0; k + 2 < n; ++k) {
    const Index len = n - k - 1;
    Vector v = a.col(k).tail(len);
    const double xnorm = v.norm();
    if (xnorm == 0.0) continue;
    const double alpha = -sign_of(xnorm, v[0]);
    v[0] -= alpha;
    const double vnorm = v.norm();
    if (vnorm == 0.0) continue;
    v /= vnorm;
    // Left: rows k+1.. of columns k..
    auto rows = a.bottomRightCorner(len, n - k);
    const Eigen::RowVectorXd vt_rows = v.transpose() * rows;
    rows.noalias() -= 2.0 * v * vt_rows;
    // Right: columns k+1.. of every row.
    auto cols = a.rightCols(len);
    const Vector cols_v = cols * v;
    cols.noalias() -= 2.0 * cols_v * v.transpose();
    a(k + 1, k) = alpha;
    a.col(k).tail(len - 1).setZero();
  }
}

std::vector<Complex> hessenberg_qr_eigenvalues(Matrix a, int max_iterations_per_eigenvalue) {
  const Index n = a.rows();
  std::vector<Complex> eig(static_cast<std::size_t>(n));
  if (n == 0) return eig;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  double anorm = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = std::max<Index>(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  }

  Index nn = n - 1;
  double t = 0.0;  // accumulated exceptional shifts
  while (nn >= 0) {
    int its = 0;
    Index l = 0;
    do {
      // Look for a negligible subdiagonal element to split the problem.
      for (l = nn; l > 0; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= eps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {
        // One root found.
        eig[static_cast<std::size_t>(nn)] = Complex(x + t, 0.0);
        --nn;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
          // Two roots from the trailing 2x2 block.
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            eig[static_cast<std::size_t>(nn - 1)] = Complex(x + z, 0.0);
            eig[static_cast<std::size_t>(nn)] = Complex(z != 0.0 ? x - w / z : x + z, 0.0);
          } else {
            eig[static_cast<std::size_t>(nn)] = Complex(x + p, -z);
            eig[static_cast<std::size_t>(nn - 1)] = Complex(x + p, z);
          }
          nn -= 2;
        } else {
          if (its >= max_iterations_per_eigenvalue) {
            throw ConvergenceError("QR iteration did not converge after " +
                                   std::to_string(its) + " sweeps at index " +
                                   std::to_string(nn));
          }
          if (its > 0 && its % 10 == 0) {
            // Exceptional shift.
            t += x;
            for (Index i = 0; i <= nn; ++i) a(i, i) -= x;
            const double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            x = y = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          // Find two consecutive small subdiagonal elements.
          Index m = nn - 2;
          double p = 0.0;
          double q = 0.0;
          double r = 0.0;
          for (; m >= l; --m) {
            const double z = a(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v =
                std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (Index i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
          }
          // Double QR step on rows l..nn and columns m..nn.
          for (Index k = m; k < nn; ++k) {
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = a(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
              a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            const double z = r / s;
            q /= p;
            r /= p;
            for (Index j = k; j <= nn; ++j) {
              p = a(k, j) + q * a(k + 1, j);
              if (k + 1 != nn) {
                p += r * a(k + 2, j);
                a(k + 2, j) -= p * z;
              }
              a(k + 1, j) -= p * y;
              a(k, j) -= p * x;
            }
            const Index mmin = nn < k + 3 ? nn : k + 3;
            for (Index i = l; i <= mmin; ++i) {
              p = x * a(i, k) + y * a(i, k + 1);
              if (k + 1 != nn) {
                p += z * a(i, k + 2);
                a(i, k + 2) -= p * r;
              }
              a(i, k + 1) -= p * q;
              a(i, k) -= p;
            }
          }
        }
      }
    } while (nn >= 0 && l + 1 < nn);
  }
  return eig;
}

double eigen_residual(const Matrix& m, Complex xi) {
  using CMatrix = Eigen::MatrixXcd;
  using CVector = Eigen::VectorXcd;
  const Index n = m.rows();
  const double mnorm = std::max(m.norm(), std::numeric_limits<double>::min());
  // Perturbed shift keeps the factorisation nonsingular even for exact eigenvalues.
  const Complex shift = xi + Complex(1e-10, 1e-10) * mnorm;
  CMatrix shifted = m.cast<Complex>();
  shifted.diagonal().array() -= shift;
  Eigen::PartialPivLU<CMatrix> lu(shifted);
  CVector w(n);
  for (Index i = 0; i < n; ++i) w[i] = Complex(1.0 + 0.1 * static_cast<double>(i % 7), 0.0);
  for (int iter = 0; iter < 3; ++iter) {
    w = lu.solve(w);
    const double wn = w.norm();
    if (!(wn > 0.0) || !std::isfinite(wn)) break;
    w /= wn;
  }
  const CVector resid = m.cast<Complex>() * w - xi * w;
  return resid.norm() / w.norm();
}

std::vector<Complex> eigenvalues(const Matrix& m, const EigenOptions& options) {
  if (m.rows() != m.cols()) throw DimensionError("eigenvalues: matrix is not square");
  if (m.rows() > kEigenMaxDim) {
    throw DimensionError("eigenvalues: dimension " + std::to_string(m.rows()) +
                         " exceeds the limit " + std::to_string(kEigenMaxDim));
  }
  if (!m.allFinite()) throw std::domain_error("eigenvalues: matrix has non-finite entries");

  Matrix work = m;
  balance(work);
  reduce_to_hessenberg(work);
  std::vector<Complex> eig =
      hessenberg_qr_eigenvalues(std::move(work), options.max_iterations_per_eigenvalue);
  std::sort(eig.begin(), eig.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  const double mnorm = m.norm();
  if (options.verify_samples > 0 && mnorm > 0.0 && !eig.empty()) {
    const std::size_t count = eig.size();
    const std::size_t samples = std::min<std::size_t>(count, options.verify_samples);
    for (std::size_t s = 0; s < samples; ++s) {
      const std::size_t idx = samples == 1 ? 0 : s * (count - 1) / (samples - 1);
      const double res = eigen_residual(m, eig[idx]);
      if (!(res <= options.residual_tolerance * mnorm)) {
        throw ConvergenceError("eigenvalue residual check failed: |Mw - xi w| = " +
                               std::to_string(res) + " for xi = (" +
                               std::to_string(eig[idx].real()) + ", " +
                               std::to_string(eig[idx].imag()) + ")");
      }
    }
  }
  return eig;
}

double spectral_radius(const std::vector<Complex>& eigs) {
  double r = 0.0;
  for (const Complex& e : eigs) r = std::max(r, std::abs(e));
  return r;
}

}  // namespace minimax
