#include "minimax/mlp.hpp"

#include <cmath>
#include <string>

#include "minimax/errors.hpp"

namespace minimax {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Tanh: return "tanh";
    case Activation::LeakyReLU: return "leaky_relu";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  for (Activation a : {Activation::Identity, Activation::Tanh, Activation::LeakyReLU}) {
    if (to_string(a) == name) return a;
  }
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

Index MlpSpec::param_count() const {
  Index count = 0;
  for (Index l = 0; l < layers(); ++l) count += widths[l + 1] * widths[l] + widths[l + 1];
  return count;
}

void validate(const MlpSpec& spec) {
  if (spec.widths.size() < 2) throw std::invalid_argument("MLP needs input and output widths");
  for (Index w : spec.widths) {
    if (w < 1) throw std::invalid_argument("MLP widths must be >= 1");
  }
  if (spec.activation == Activation::LeakyReLU && !std::isfinite(spec.leaky_slope)) {
    throw std::invalid_argument("leaky slope must be finite");
  }
}

namespace {

using ConstMatrixMap = Eigen::Map<const Matrix>;
using ConstVectorMap = Eigen::Map<const Vector>;

struct Layer {
  ConstMatrixMap w;
  ConstVectorMap b;
};

std::vector<Layer> unpack(const MlpSpec& spec, ParamsRef params) {
  if (params.size() != spec.param_count()) {
    throw DimensionError("MLP expects " + std::to_string(spec.param_count()) +
                         " parameters, got " + std::to_string(params.size()));
  }
  std::vector<Layer> layers;
  layers.reserve(static_cast<std::size_t>(spec.layers()));
  const double* data = params.data();
  for (Index l = 0; l < spec.layers(); ++l) {
    const Index in = spec.widths[l];
    const Index out = spec.widths[l + 1];
    layers.push_back({ConstMatrixMap(data, out, in), ConstVectorMap(data + out * in, out)});
    data += out * in + out;
  }
  return layers;
}

void apply_hidden(const MlpSpec& spec, Matrix& z) {
  switch (spec.activation) {
    case Activation::Identity: break;
    case Activation::Tanh: z = z.array().tanh().matrix(); break;
    case Activation::LeakyReLU:
      z = z.unaryExpr([s = spec.leaky_slope](double t) { return t > 0.0 ? t : s * t; });
      break;
  }
}

// Derivative of the hidden activation given its pre-activation z and output a.
Matrix hidden_derivative(const MlpSpec& spec, const Matrix& z, const Matrix& a) {
  switch (spec.activation) {
    case Activation::Identity: return Matrix::Ones(z.rows(), z.cols());
    case Activation::Tanh: return (1.0 - a.array().square()).matrix();
    case Activation::LeakyReLU:
      return z.unaryExpr([s = spec.leaky_slope](double t) { return t > 0.0 ? 1.0 : s; });
  }
  return {};
}

void apply_head(const MlpSpec& spec, Matrix& z) {
  if (spec.head == OutputActivation::Sigmoid) {
    z = z.unaryExpr([](double t) { return 1.0 / (1.0 + std::exp(-t)); });
  }
}

void check_input(const MlpSpec& spec, const Matrix& input) {
  if (input.rows() != spec.input_dim()) {
    throw DimensionError("MLP input has " + std::to_string(input.rows()) +
                         " rows, expected " + std::to_string(spec.input_dim()));
  }
}

}  // namespace

Matrix mlp_forward(const MlpSpec& spec, ParamsRef params, const Matrix& input) {
  check_input(spec, input);
  const std::vector<Layer> layers = unpack(spec, params);
  Matrix a = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix z = layers[l].w * a;
    z.colwise() += layers[l].b;
    if (l + 1 < layers.size()) {
      apply_hidden(spec, z);
    } else {
      apply_head(spec, z);
    }
    a = std::move(z);
  }
  return a;
}

MlpGradients mlp_backward(const MlpSpec& spec, ParamsRef params, const Matrix& input,
                          const Matrix& upstream) {
  check_input(spec, input);
  const std::vector<Layer> layers = unpack(spec, params);
  if (upstream.rows() != spec.output_dim() || upstream.cols() != input.cols()) {
    throw DimensionError("MLP upstream gradient shape does not match the output");
  }

  // Forward pass keeping pre-activations and activations.
  std::vector<Matrix> pre(layers.size());
  std::vector<Matrix> act(layers.size() + 1);
  act[0] = input;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    pre[l] = layers[l].w * act[l];
    pre[l].colwise() += layers[l].b;
    Matrix a = pre[l];
    if (l + 1 < layers.size()) {
      apply_hidden(spec, a);
    } else {
      apply_head(spec, a);
    }
    act[l + 1] = std::move(a);
  }

  Matrix delta = upstream;
  if (spec.head == OutputActivation::Sigmoid) {
    const Matrix& s = act.back();
    delta = (delta.array() * s.array() * (1.0 - s.array())).matrix();
  }

  MlpGradients grads;
  grads.params.resize(params.size());
  // Offsets of each layer in the flat vector.
  std::vector<Index> offset(layers.size());
  Index off = 0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    offset[l] = off;
    off += layers[l].w.size() + layers[l].b.size();
  }
  for (std::size_t l = layers.size(); l-- > 0;) {
    const Index out = layers[l].w.rows();
    const Index in = layers[l].w.cols();
    Eigen::Map<Matrix> gw(grads.params.data() + offset[l], out, in);
    Eigen::Map<Vector> gb(grads.params.data() + offset[l] + out * in, out);
    gw.noalias() = delta * act[l].transpose();
    gb = delta.rowwise().sum();
    Matrix back = layers[l].w.transpose() * delta;
    if (l > 0) {
      delta = (back.array() * hidden_derivative(spec, pre[l - 1], act[l]).array()).matrix();
    } else {
      grads.input = std::move(back);
    }
  }
  return grads;
}

Vector init_mlp_params(const MlpSpec& spec, std::mt19937_64& rng) {
  validate(spec);
  Vector params = Vector::Zero(spec.param_count());
  Index off = 0;
  for (Index l = 0; l < spec.layers(); ++l) {
    const Index in = spec.widths[l];
    const Index out = spec.widths[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Index i = 0; i < out * in; ++i) params[off + i] = dist(rng);
    off += out * in + out;
  }
  return params;
}

}  // namespace minimax
