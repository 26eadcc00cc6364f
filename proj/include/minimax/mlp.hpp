#pragma once

#include <random>
#include <string_view>
#include <vector>

#include "minimax/vecfield.hpp"

namespace minimax {

enum class Activation { Identity, Tanh, LeakyReLU };
enum class OutputActivation { Identity, Sigmoid };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

// Fully connected network. widths = {input, hidden..., output}; `activation` is applied after
// every layer but the last, `head` after the last.
//
// Parameters are one flat vector, layer by layer: W (out x in, column-major) then b (out).
struct MlpSpec {
  std::vector<Index> widths;
  Activation activation = Activation::Tanh;
  double leaky_slope = 0.2;
  OutputActivation head = OutputActivation::Identity;

  Index layers() const { return static_cast<Index>(widths.size()) - 1; }
  Index input_dim() const { return widths.front(); }
  Index output_dim() const { return widths.back(); }
  Index param_count() const;
};

void validate(const MlpSpec& spec);

using ParamsRef = Eigen::Ref<const Vector>;

// Columns of `input` are samples.
Matrix mlp_forward(const MlpSpec& spec, ParamsRef params, const Matrix& input);

struct MlpGradients {
  Vector params;  // d(sum upstream .* output) / d params
  Matrix input;   // same, w.r.t. the input batch
};

MlpGradients mlp_backward(const MlpSpec& spec, ParamsRef params, const Matrix& input,
                          const Matrix& upstream);

// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
Vector init_mlp_params(const MlpSpec& spec, std::mt19937_64& rng);

}  // namespace minimax
