#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace vegahedge::distrl {

enum class Activation { kIdentity, kTanh, kSigmoid };

std::string to_string(Activation act);
Activation activation_from_string(const std::string& name);

/// Fully connected network shape. activations[l] is applied to the output of
/// layer l, so activations.size() == layer_sizes.size() - 1.
struct MlpShape {
  std::vector<std::size_t> layer_sizes;
  std::vector<Activation> activations;

  std::size_t param_count() const;
  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  void validate() const;
  bool operator==(const MlpShape&) const = default;
};

/// Flat parameter vector. Layer l stores its weights row-major
/// (out x in) followed by its bias (out).
struct MlpParams {
  MlpShape shape;
  std::vector<double> values;

  void validate() const;
};

/// Two tanh hidden layers followed by `output_act`.
MlpShape two_hidden_layer_shape(std::size_t inputs, std::size_t hidden, std::size_t outputs,
                                Activation output_act);

/// Glorot-uniform weights, zero biases. The final layer is scaled by
/// `output_scale`.
MlpParams init_mlp(const MlpShape& shape, std::mt19937_64& rng, double output_scale = 1.0);

MlpParams zero_mlp(const MlpShape& shape);

/// Activations of every layer, kept for backpropagation.
struct MlpTrace {
  std::vector<std::vector<double>> layer_outputs;  // [0] is the input
  const std::vector<double>& output() const { return layer_outputs.back(); }
};

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input);
MlpTrace mlp_forward_trace(const MlpParams& params, std::span<const double> input);

/// Accumulates d(output . grad_output)/d(params) into `grad_params`.
void mlp_backward(const MlpParams& params, const MlpTrace& trace,
                  std::span<const double> grad_output, std::span<double> grad_params);

}  // namespace vegahedge::distrl
