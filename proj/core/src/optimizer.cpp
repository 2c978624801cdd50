#include "mlnn/optimizer.hpp"

#include <cmath>

#include <fmt/format.h>

#include "mlnn/errors.hpp"

namespace mlnn {

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "momentum") return OptimizerKind::momentum;
  if (name == "adagrad") return OptimizerKind::adagrad;
  throw ConfigError(fmt::format("unknown optimizer '{}'", name));
}

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::momentum: return "momentum";
    case OptimizerKind::adagrad: return "adagrad";
  }
  return "?";
}

namespace {

constexpr const char* kBlockNames[4] = {"W1", "b1", "W2", "b2"};

std::size_t block_size(const Shape& s, int block) {
  switch (block) {
    case 0: return s.inputs * s.hidden;
    case 1: return s.hidden;
    case 2: return s.labels * s.hidden;
    default: return s.labels;
  }
}

void require_finite(const std::vector<double>& values, int block) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]))
      throw NumericError(fmt::format("non-finite gradient in parameter block {} (entry {})", kBlockNames[block], i));
}

}  // namespace

Optimizer::Optimizer(const OptimizerSettings& settings, const Shape& shape) : settings_(settings), shape_(shape) {
  if (!(settings.eta0 > 0.0)) throw ConfigError("eta0 must be positive");
  if (!(settings.momentum >= 0.0 && settings.momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (!(settings.epsilon >= 0.0)) throw ConfigError("epsilon must be nonnegative");
  for (int b = 0; b < 4; ++b) {
    if (settings.kind == OptimizerKind::adagrad) accum_[b].assign(block_size(shape, b), 0.0);
    if (settings.kind == OptimizerKind::momentum) velocity_[b].assign(block_size(shape, b), 0.0);
  }
}

double Optimizer::effective_rate(int block, std::size_t index) const {
  if (settings_.kind != OptimizerKind::adagrad) return settings_.eta0;
  return settings_.eta0 / (std::sqrt(accum_[block][index]) + settings_.epsilon);
}

void Optimizer::apply(int block, double* param, const double* grad, std::size_t offset, std::size_t count) {
  const double eta = settings_.eta0;
  switch (settings_.kind) {
    case OptimizerKind::sgd:
      for (std::size_t i = 0; i < count; ++i)
        if (grad[i] != 0.0) param[i] -= eta * grad[i];
      break;
    case OptimizerKind::momentum: {
      double* v = velocity_[block].data() + offset;
      const double mu = settings_.momentum;
      for (std::size_t i = 0; i < count; ++i) {
        if (grad[i] == 0.0) continue;
        v[i] = mu * v[i] - eta * grad[i];
        param[i] += v[i];
      }
      break;
    }
    case OptimizerKind::adagrad: {
      double* acc = accum_[block].data() + offset;
      const double eps = settings_.epsilon;
      for (std::size_t i = 0; i < count; ++i) {
        if (grad[i] == 0.0) continue;
        acc[i] += grad[i] * grad[i];
        param[i] -= eta / (std::sqrt(acc[i]) + eps) * grad[i];
      }
      break;
    }
  }
}

void Optimizer::update(NetworkParams& params, const Gradients& grads) {
  if (params.shape != shape_ || grads.shape != shape_) throw DimensionError("optimizer shape mismatch");
  if (grads.w1.size() != grads.w1_inputs.size() * shape_.hidden) throw DimensionError("malformed W1 gradient");
  require_finite(grads.w1, 0);
  require_finite(grads.b1, 1);
  require_finite(grads.w2, 2);
  require_finite(grads.b2, 3);

  const std::size_t f = shape_.hidden;
  for (std::size_t k = 0; k < grads.w1_inputs.size(); ++k) {
    const std::size_t offset = std::size_t{grads.w1_inputs[k]} * f;
    if (grads.w1_inputs[k] >= shape_.inputs) throw DimensionError("W1 gradient input out of range");
    apply(0, params.w1.data() + offset, grads.w1.data() + k * f, offset, f);
  }
  apply(1, params.b1.data(), grads.b1.data(), 0, f);
  apply(2, params.w2.data(), grads.w2.data(), 0, params.w2.size());
  apply(3, params.b2.data(), grads.b2.data(), 0, params.b2.size());
  ++step_;
}

}  // namespace mlnn
