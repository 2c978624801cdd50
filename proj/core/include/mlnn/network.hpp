#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mlnn/dataset.hpp"

namespace mlnn {

enum class Activation : std::uint8_t { relu = 0, tanh = 1, sigmoid = 2 };

Activation parse_activation(std::string_view name);
std::string_view to_string(Activation act);

double activate(Activation act, double z);
/// f'(z); `fz` must equal activate(act, z).
double activate_derivative(Activation act, double z, double fz);

enum class LossKind : std::uint8_t { cross_entropy = 0, pairwise_error = 1 };
enum class LabelWeighting : std::uint8_t { unit = 0, inverse_cardinality = 1 };

LossKind parse_loss_kind(std::string_view name);
std::string_view to_string(LossKind kind);
LabelWeighting parse_label_weighting(std::string_view name);
std::string_view to_string(LabelWeighting weighting);

/// Cross entropy pairs with a sigmoid output layer, the pairwise error with tanh.
struct LossConfig {
  LossKind kind = LossKind::cross_entropy;
  LabelWeighting weighting = LabelWeighting::unit;

  /// unit weighting for cross entropy, 1/(|y||ybar|) for the pairwise error.
  static LossConfig defaults_for(LossKind kind);
  Activation output_activation() const noexcept {
    return kind == LossKind::cross_entropy ? Activation::sigmoid : Activation::tanh;
  }
  friend bool operator==(const LossConfig&, const LossConfig&) = default;
};

struct Shape {
  std::size_t inputs = 0;  // D
  std::size_t hidden = 0;  // F
  std::size_t labels = 0;  // L

  std::size_t parameter_count() const noexcept {
    return inputs * hidden + hidden + labels * hidden + labels;
  }
  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Weights and biases of the one-hidden-layer network.
///
/// W1 (F x D) is stored feature-major: the F weights fed by input j are
/// contiguous at w1[j * F], so a sparse input touches only nnz(x) blocks.
/// W2 (L x F) is row-major.
struct NetworkParams {
  Shape shape;
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  std::vector<double> b2;

  static NetworkParams zeros(const Shape& shape);
  /// Uniform in +-sqrt(6 / (fan_in + fan_out)) per layer, biases zero.
  static NetworkParams glorot(const Shape& shape, std::uint64_t seed);

  double& W1(std::size_t hidden, std::size_t input) { return w1[input * shape.hidden + hidden]; }
  double W1(std::size_t hidden, std::size_t input) const { return w1[input * shape.hidden + hidden]; }
  double& W2(std::size_t label, std::size_t hidden) { return w2[label * shape.hidden + hidden]; }
  double W2(std::size_t label, std::size_t hidden) const { return w2[label * shape.hidden + hidden]; }

  bool all_finite() const;
  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;
};

/// Gradient with respect to NetworkParams. Only the W1 blocks of inputs that
/// were nonzero are materialised; `w1_inputs` is sorted and unique and
/// `w1` holds F values per listed input.
struct Gradients {
  Shape shape;
  std::vector<FeatureId> w1_inputs;
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  std::vector<double> b2;

  static Gradients zeros(const Shape& shape);

  std::span<const double> w1_block(std::size_t k) const {
    return std::span<const double>(w1).subspan(k * shape.hidden, shape.hidden);
  }
  /// Dense d/dW1(hidden, input); zero for inputs not listed.
  double dW1(std::size_t hidden, std::size_t input) const;

  /// this += scale * other, merging the sparse W1 blocks.
  void add_scaled(const Gradients& other, double scale);
  void scale(double factor);
};

struct DropoutSpec {
  double rate = 0.5;          // in [0, 1)
  std::uint64_t mask_seed = 0;
};

/// Activations of one forward pass. With dropout, `h` already carries the
/// mask and the 1/(1 - rate) scale (inverted dropout), and `mask` is set.
struct ForwardTrace {
  Activation hidden_act = Activation::relu;
  Activation output_act = Activation::sigmoid;
  std::vector<double> z1;
  std::vector<double> h;
  std::vector<double> z2;
  std::vector<double> o;
  std::optional<std::vector<std::uint8_t>> mask;
  double keep_scale = 1.0;
};

/// Throws DimensionError when x.dim() != D. Without `dropout` this is the
/// inference pass.
ForwardTrace forward(const NetworkParams& params, const SparseVector& x, Activation hidden_act,
                     Activation output_act, const std::optional<DropoutSpec>& dropout = std::nullopt);

/// Same as forward(...).o without keeping the trace.
std::vector<double> predict_scores(const NetworkParams& params, const SparseVector& x, Activation hidden_act,
                                   Activation output_act);

/// Counts floating-point operations spent on output error terms.
struct OpCounter {
  std::uint64_t flops = 0;
};

inline constexpr double kProbabilityClamp = 1e-12;

/// -sum_l [y_l ln o_l + (1 - y_l) ln(1 - o_l)], o clamped to [1e-12, 1 - 1e-12].
double loss_cross_entropy(std::span<const double> o, const LabelSet& y);
/// The same loss evaluated from pre-activations without overflow or clamping.
double cross_entropy_from_logits(std::span<const double> z, const LabelSet& y);
/// -[y ln sigmoid(z) + (1 - y) ln(1 - sigmoid(z))] for one label, stable for any z.
double binary_cross_entropy_logit(double z, bool relevant);
/// ln(1 + exp(-t z)) with t in {-1, +1}, stable for any z.
double log_loss_signed(double z, int signed_target);

/// (1/(|y||ybar|)) sum over y x ybar of exp(-(o_p - o_n)); nullopt when y or ybar is empty.
std::optional<double> loss_pairwise(std::span<const double> o, const LabelSet& y);

/// Loss value under `config` (weighting applied); nullopt when the example is skipped.
std::optional<double> evaluate_loss(const LossConfig& config, std::span<const double> o, const LabelSet& y);

/// dJ/dz2 for cross entropy on sigmoid outputs: (o_l - y_l), times w(y) when weighted.
std::optional<std::vector<double>> output_delta_cross_entropy(const ForwardTrace& trace, const LabelSet& y,
                                                              LabelWeighting weighting = LabelWeighting::unit,
                                                              OpCounter* counter = nullptr);

/// dJ/dz2 for the pairwise error, evaluated pair by pair:
///   l in y:    -w sum_{n in ybar} exp(-(o_l - o_n)) f_o'(z2_l)
///   l in ybar: +w sum_{p in y}    exp(-(o_p - o_l)) f_o'(z2_l)
/// nullopt when y or ybar is empty.
std::optional<std::vector<double>> output_delta_pairwise(const ForwardTrace& trace, const LabelSet& y,
                                                         LabelWeighting weighting = LabelWeighting::inverse_cardinality,
                                                         OpCounter* counter = nullptr);

/// Propagates output error terms through W2 and the hidden layer (dropout
/// mask included) and forms the full gradient.
Gradients backpropagate(const NetworkParams& params, const ForwardTrace& trace, const SparseVector& x,
                        std::span<const double> output_delta);

Gradients backward_cross_entropy(const NetworkParams& params, const ForwardTrace& trace, const SparseVector& x,
                                 const LabelSet& y, OpCounter* counter = nullptr);
std::optional<Gradients> backward_pairwise(const NetworkParams& params, const ForwardTrace& trace,
                                           const SparseVector& x, const LabelSet& y,
                                           OpCounter* counter = nullptr);

/// Network parameters plus the architecture choices that go with them.
struct Model {
  NetworkParams params;
  Activation hidden_act = Activation::relu;
  LossConfig loss;

  Activation output_act() const noexcept { return loss.output_activation(); }
  std::vector<double> scores(const SparseVector& x) const {
    return predict_scores(params, x, hidden_act, output_act());
  }
};

struct LossAndGradient {
  double loss;
  Gradients gradient;
};

/// One example's loss and gradient; nullopt when the loss skips it.
std::optional<LossAndGradient> loss_and_gradient(const Model& model, const SparseVector& x, const LabelSet& y,
                                                 const std::optional<DropoutSpec>& dropout = std::nullopt,
                                                 OpCounter* counter = nullptr);

}  // namespace mlnn
