#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mlnn/network.hpp"

namespace mlnn {

enum class OptimizerKind : std::uint8_t { sgd = 0, momentum = 1, adagrad = 2 };

OptimizerKind parse_optimizer_kind(std::string_view name);
std::string_view to_string(OptimizerKind kind);

struct OptimizerSettings {
  OptimizerKind kind = OptimizerKind::adagrad;
  double eta0 = 0.1;
  double momentum = 0.9;
  double epsilon = 1e-8;  // AdaGrad denominator stabiliser
};

/// Per-parameter optimizer state, laid out like NetworkParams.
///
///   sgd:      p -= eta0 * g
///   momentum: v = mu * v - eta0 * g;  p += v
///   adagrad:  G += g^2;  p -= eta0 / (sqrt(G) + eps) * g
///
/// Entries whose gradient is exactly zero are left alone by every rule, so a
/// sparse input only touches the W1 blocks of its nonzero features. For
/// momentum this means velocities are lazily frozen on untouched entries.
class Optimizer {
 public:
  Optimizer(const OptimizerSettings& settings, const Shape& shape);

  /// Validates every gradient block first; on a NaN/inf throws NumericError
  /// naming the block and leaves params and state unchanged.
  void update(NetworkParams& params, const Gradients& grads);

  const OptimizerSettings& settings() const noexcept { return settings_; }
  std::uint64_t step() const noexcept { return step_; }

  /// Accumulated squared gradients / velocities, one vector per block
  /// (0 = W1, 1 = b1, 2 = W2, 3 = b2). Empty for kinds that do not use them.
  const std::vector<double>& accumulator(int block) const { return accum_[block]; }
  const std::vector<double>& velocity(int block) const { return velocity_[block]; }

  /// Current per-entry step size eta0 / (sqrt(G) + eps) for AdaGrad, eta0 otherwise.
  double effective_rate(int block, std::size_t index) const;

 private:
  void apply(int block, double* param, const double* grad, std::size_t state_offset, std::size_t count);

  OptimizerSettings settings_;
  Shape shape_;
  std::uint64_t step_ = 0;
  std::vector<double> accum_[4];
  std::vector<double> velocity_[4];
};

}  // namespace mlnn
