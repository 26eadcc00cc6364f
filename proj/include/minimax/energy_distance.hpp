#pragma once

#include "minimax/vecfield.hpp"

namespace minimax {

// V-statistic energy distance 2 E|a - b| - E|a - a'| - E|b - b'| between two sample sets
// (columns are samples). Non-negative up to rounding, symmetric, exactly 0 for A == B.
// One-dimensional samples use a sorted O(N log N) path.
double energy_distance(const Matrix& a, const Matrix& b);

// Sum over all pairs of |a_i - b_j|.
double pairwise_distance_sum(const Matrix& a, const Matrix& b);

}  // namespace minimax
