#include "vegahedge/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace vegahedge::distrl {
namespace {

using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>;
using MutRowMajorMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

double activate(Activation act, double z) {
  switch (act) {
    case Activation::kIdentity: return z;
    case Activation::kTanh: return std::tanh(z);
    case Activation::kSigmoid: return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

// Derivative expressed through the activation output.
double activate_grad(Activation act, double out) {
  switch (act) {
    case Activation::kIdentity: return 1.0;
    case Activation::kTanh: return 1.0 - out * out;
    case Activation::kSigmoid: return out * (1.0 - out);
  }
  return 1.0;
}

}  // namespace

std::string to_string(Activation act) {
  switch (act) {
    case Activation::kIdentity: return "identity";
    case Activation::kTanh: return "tanh";
    case Activation::kSigmoid: return "sigmoid";
  }
  return "identity";
}

Activation activation_from_string(const std::string& name) {
  if (name == "identity") return Activation::kIdentity;
  if (name == "tanh") return Activation::kTanh;
  if (name == "sigmoid") return Activation::kSigmoid;
  throw std::invalid_argument("unknown activation: " + name);
}

std::size_t MlpShape::param_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    n += layer_sizes[l + 1] * (layer_sizes[l] + 1);
  }
  return n;
}

void MlpShape::validate() const {
  if (layer_sizes.size() < 2) throw std::invalid_argument("MlpShape: need at least two layers");
  if (activations.size() + 1 != layer_sizes.size()) {
    throw std::invalid_argument("MlpShape: one activation per weight layer required");
  }
  for (auto s : layer_sizes) {
    if (s == 0) throw std::invalid_argument("MlpShape: empty layer");
  }
}

void MlpParams::validate() const {
  shape.validate();
  if (values.size() != shape.param_count()) {
    throw std::invalid_argument("MlpParams: parameter count does not match shape");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("MlpParams: non-finite parameter");
  }
}

MlpShape two_hidden_layer_shape(std::size_t inputs, std::size_t hidden, std::size_t outputs,
                                Activation output_act) {
  return {{inputs, hidden, hidden, outputs},
          {Activation::kTanh, Activation::kTanh, output_act}};
}

MlpParams init_mlp(const MlpShape& shape, std::mt19937_64& rng, double output_scale) {
  shape.validate();
  MlpParams params{shape, std::vector<double>(shape.param_count(), 0.0)};
  std::size_t offset = 0;
  const std::size_t n_layers = shape.layer_sizes.size() - 1;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t in = shape.layer_sizes[l];
    const std::size_t out = shape.layer_sizes[l + 1];
    double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    if (l + 1 == n_layers) limit *= output_scale;
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t i = 0; i < in * out; ++i) params.values[offset + i] = dist(rng);
    offset += in * out + out;
  }
  return params;
}

MlpParams zero_mlp(const MlpShape& shape) {
  shape.validate();
  return {shape, std::vector<double>(shape.param_count(), 0.0)};
}

MlpTrace mlp_forward_trace(const MlpParams& params, std::span<const double> input) {
  const MlpShape& shape = params.shape;
  if (input.size() != shape.input_size()) {
    throw std::invalid_argument("mlp_forward: input size does not match network shape");
  }
  if (params.values.size() != shape.param_count()) {
    throw std::invalid_argument("mlp_forward: parameter count does not match shape");
  }
  MlpTrace trace;
  trace.layer_outputs.emplace_back(input.begin(), input.end());
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < shape.layer_sizes.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(shape.layer_sizes[l]);
    const auto out = static_cast<Eigen::Index>(shape.layer_sizes[l + 1]);
    RowMajorMap weights(params.values.data() + offset, out, in);
    ConstVecMap bias(params.values.data() + offset + out * in, out);
    offset += static_cast<std::size_t>(out * in + out);

    const auto& prev = trace.layer_outputs.back();
    std::vector<double> next(static_cast<std::size_t>(out));
    VecMap next_map(next.data(), out);
    next_map.noalias() = weights * ConstVecMap(prev.data(), in) + bias;
    for (double& z : next) z = activate(shape.activations[l], z);
    trace.layer_outputs.push_back(std::move(next));
  }
  return trace;
}

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input) {
  return std::move(mlp_forward_trace(params, input).layer_outputs.back());
}

void mlp_backward(const MlpParams& params, const MlpTrace& trace,
                  std::span<const double> grad_output, std::span<double> grad_params) {
  const MlpShape& shape = params.shape;
  if (grad_output.size() != shape.output_size() || grad_params.size() != shape.param_count()) {
    throw std::invalid_argument("mlp_backward: size mismatch");
  }
  const std::size_t n_layers = shape.layer_sizes.size() - 1;
  std::vector<std::size_t> offsets(n_layers);
  std::size_t offset = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    offsets[l] = offset;
    offset += shape.layer_sizes[l + 1] * (shape.layer_sizes[l] + 1);
  }

  Eigen::VectorXd upstream = ConstVecMap(grad_output.data(), grad_output.size());
  for (std::size_t l = n_layers; l-- > 0;) {
    const auto in = static_cast<Eigen::Index>(shape.layer_sizes[l]);
    const auto out = static_cast<Eigen::Index>(shape.layer_sizes[l + 1]);
    const auto& layer_out = trace.layer_outputs[l + 1];
    Eigen::VectorXd pre_grad(out);
    for (Eigen::Index j = 0; j < out; ++j) {
      pre_grad[j] = upstream[j] * activate_grad(shape.activations[l], layer_out[j]);
    }
    ConstVecMap layer_in(trace.layer_outputs[l].data(), in);
    MutRowMajorMap grad_w(grad_params.data() + offsets[l], out, in);
    VecMap grad_b(grad_params.data() + offsets[l] + out * in, out);
    grad_w.noalias() += pre_grad * layer_in.transpose();
    grad_b += pre_grad;
    if (l > 0) {
      RowMajorMap weights(params.values.data() + offsets[l], out, in);
      upstream = weights.transpose() * pre_grad;
    }
  }
}

}  // namespace vegahedge::distrl
