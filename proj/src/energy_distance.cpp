#include "minimax/energy_distance.hpp"

#include <algorithm>
#include <vector>

#include "minimax/errors.hpp"

namespace minimax {

namespace {

double pairwise_sum_1d(const Matrix& a, const Matrix& b) {
  std::vector<double> sorted_b(b.data(), b.data() + b.cols());
  std::sort(sorted_b.begin(), sorted_b.end());
  std::vector<double> prefix(sorted_b.size() + 1, 0.0);
  for (std::size_t j = 0; j < sorted_b.size(); ++j) prefix[j + 1] = prefix[j] + sorted_b[j];
  const double total = prefix.back();
  const double m = static_cast<double>(sorted_b.size());

  std::vector<double> sorted_a(a.data(), a.data() + a.cols());
  std::sort(sorted_a.begin(), sorted_a.end());
  double sum = 0.0;
  std::size_t k = 0;
  for (double x : sorted_a) {
    while (k < sorted_b.size() && sorted_b[k] < x) ++k;
    const double below = static_cast<double>(k);
    sum += x * below - prefix[k] + (total - prefix[k]) - x * (m - below);
  }
  return sum;
}

}  // namespace

double pairwise_distance_sum(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("energy distance: sample dimensions differ");
  if (a.rows() == 1) return pairwise_sum_1d(a, b);
  double sum = 0.0;
  for (Index i = 0; i < a.cols(); ++i) {
    sum += (b.colwise() - a.col(i)).colwise().norm().sum();
  }
  return sum;
}

double energy_distance(const Matrix& a, const Matrix& b) {
  if (a.cols() == 0 || b.cols() == 0) throw std::invalid_argument("energy distance: empty sample");
  if (a.rows() != b.rows()) throw DimensionError("energy distance: sample dimensions differ");
  const double na = static_cast<double>(a.cols());
  const double nb = static_cast<double>(b.cols());
  const double cross = pairwise_distance_sum(a, b) / (na * nb);
  const double within_a = pairwise_distance_sum(a, a) / (na * na);
  const double within_b = pairwise_distance_sum(b, b) / (nb * nb);
  return 2.0 * cross - within_a - within_b;
}

}  // namespace minimax
