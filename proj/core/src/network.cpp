#include "mlnn/network.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mlnn/errors.hpp"
#include "mlnn/random.hpp"

namespace mlnn {

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  if (name == "sigmoid") return Activation::sigmoid;
  throw ConfigError(fmt::format("unknown activation '{}'", name));
}

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
  }
  return "?";
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// ln(1 + e^a)
double softplus(double a) { return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a)); }

// ln sigmoid(u)
double log_sigmoid(double u) { return u < 0.0 ? u - std::log1p(std::exp(u)) : -std::log1p(std::exp(-u)); }

double label_weight(const LabelSet& y, LabelWeighting weighting) {
  if (weighting == LabelWeighting::unit) return 1.0;
  return 1.0 / (static_cast<double>(y.size()) * static_cast<double>(y.irrelevant_size()));
}

}  // namespace

double activate(Activation act, double z) {
  switch (act) {
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::tanh: return std::tanh(z);
    case Activation::sigmoid: return sigmoid(z);
  }
  return 0.0;
}

double activate_derivative(Activation act, double z, double fz) {
  switch (act) {
    case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: return 1.0 - fz * fz;
    case Activation::sigmoid: return fz * (1.0 - fz);
  }
  return 0.0;
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "cross_entropy" || name == "ce") return LossKind::cross_entropy;
  if (name == "pairwise_error" || name == "pwe") return LossKind::pairwise_error;
  throw ConfigError(fmt::format("unknown loss '{}'", name));
}

std::string_view to_string(LossKind kind) {
  return kind == LossKind::cross_entropy ? "cross_entropy" : "pairwise_error";
}

LabelWeighting parse_label_weighting(std::string_view name) {
  if (name == "unit") return LabelWeighting::unit;
  if (name == "inverse_cardinality") return LabelWeighting::inverse_cardinality;
  throw ConfigError(fmt::format("unknown label weighting '{}'", name));
}

std::string_view to_string(LabelWeighting weighting) {
  return weighting == LabelWeighting::unit ? "unit" : "inverse_cardinality";
}

LossConfig LossConfig::defaults_for(LossKind kind) {
  return {kind, kind == LossKind::cross_entropy ? LabelWeighting::unit : LabelWeighting::inverse_cardinality};
}

// --- parameters -------------------------------------------------------------

NetworkParams NetworkParams::zeros(const Shape& shape) {
  NetworkParams p;
  p.shape = shape;
  p.w1.assign(shape.inputs * shape.hidden, 0.0);
  p.b1.assign(shape.hidden, 0.0);
  p.w2.assign(shape.labels * shape.hidden, 0.0);
  p.b2.assign(shape.labels, 0.0);
  return p;
}

NetworkParams NetworkParams::glorot(const Shape& shape, std::uint64_t seed) {
  NetworkParams p = zeros(shape);
  const double r1 = std::sqrt(6.0 / static_cast<double>(shape.inputs + shape.hidden));
  const double r2 = std::sqrt(6.0 / static_cast<double>(shape.hidden + shape.labels));
  Rng rng1(derive_seed(seed, 1));
  for (auto& w : p.w1) w = rng1.uniform(-r1, r1);
  Rng rng2(derive_seed(seed, 2));
  for (auto& w : p.w2) w = rng2.uniform(-r2, r2);
  return p;
}

bool NetworkParams::all_finite() const {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return finite(w1) && finite(b1) && finite(w2) && finite(b2);
}

Gradients Gradients::zeros(const Shape& shape) {
  Gradients g;
  g.shape = shape;
  g.b1.assign(shape.hidden, 0.0);
  g.w2.assign(shape.labels * shape.hidden, 0.0);
  g.b2.assign(shape.labels, 0.0);
  return g;
}

double Gradients::dW1(std::size_t hidden, std::size_t input) const {
  auto it = std::lower_bound(w1_inputs.begin(), w1_inputs.end(), input);
  if (it == w1_inputs.end() || *it != input) return 0.0;
  return w1[static_cast<std::size_t>(it - w1_inputs.begin()) * shape.hidden + hidden];
}

void Gradients::add_scaled(const Gradients& other, double factor) {
  if (other.shape != shape) throw DimensionError("gradient shapes differ");
  const std::size_t f = shape.hidden;
  std::vector<FeatureId> inputs;
  std::vector<double> values;
  inputs.reserve(w1_inputs.size() + other.w1_inputs.size());
  values.reserve((w1_inputs.size() + other.w1_inputs.size()) * f);
  std::size_t a = 0, b = 0;
  while (a < w1_inputs.size() || b < other.w1_inputs.size()) {
    const bool take_a = b == other.w1_inputs.size() ||
                        (a < w1_inputs.size() && w1_inputs[a] <= other.w1_inputs[b]);
    const bool take_b = a == w1_inputs.size() ||
                        (b < other.w1_inputs.size() && other.w1_inputs[b] <= w1_inputs[a]);
    inputs.push_back(take_a ? w1_inputs[a] : other.w1_inputs[b]);
    const std::size_t base = values.size();
    values.resize(base + f, 0.0);
    if (take_a) {
      std::copy_n(w1.begin() + static_cast<std::ptrdiff_t>(a * f), f, values.begin() + static_cast<std::ptrdiff_t>(base));
      ++a;
    }
    if (take_b) {
      for (std::size_t i = 0; i < f; ++i) values[base + i] += factor * other.w1[b * f + i];
      ++b;
    }
  }
  w1_inputs = std::move(inputs);
  w1 = std::move(values);
  for (std::size_t i = 0; i < b1.size(); ++i) b1[i] += factor * other.b1[i];
  for (std::size_t i = 0; i < w2.size(); ++i) w2[i] += factor * other.w2[i];
  for (std::size_t i = 0; i < b2.size(); ++i) b2[i] += factor * other.b2[i];
}

void Gradients::scale(double factor) {
  for (auto* v : {&w1, &b1, &w2, &b2})
    for (auto& x : *v) x *= factor;
}

// --- forward ----------------------------------------------------------------

ForwardTrace forward(const NetworkParams& params, const SparseVector& x, Activation hidden_act,
                     Activation output_act, const std::optional<DropoutSpec>& dropout) {
  const Shape& s = params.shape;
  if (x.dim() != s.inputs)
    throw DimensionError(fmt::format("input has dimension {}, network expects {}", x.dim(), s.inputs));

  ForwardTrace t;
  t.hidden_act = hidden_act;
  t.output_act = output_act;
  t.z1 = params.b1;
  for (const auto& e : x.entries()) {
    const double* col = params.w1.data() + std::size_t{e.index} * s.hidden;
    for (std::size_t i = 0; i < s.hidden; ++i) t.z1[i] += col[i] * e.value;
  }
  t.h.resize(s.hidden);
  for (std::size_t i = 0; i < s.hidden; ++i) t.h[i] = activate(hidden_act, t.z1[i]);

  if (dropout) {
    if (!(dropout->rate >= 0.0 && dropout->rate < 1.0))
      throw ConfigError(fmt::format("dropout rate {} outside [0, 1)", dropout->rate));
    t.keep_scale = 1.0 / (1.0 - dropout->rate);
    std::vector<std::uint8_t> mask(s.hidden);
    Rng rng(dropout->mask_seed);
    for (std::size_t i = 0; i < s.hidden; ++i) {
      mask[i] = rng.uniform01() >= dropout->rate ? 1 : 0;
      t.h[i] = mask[i] ? t.h[i] * t.keep_scale : 0.0;
    }
    t.mask = std::move(mask);
  }

  t.z2 = params.b2;
  for (std::size_t l = 0; l < s.labels; ++l) {
    const double* row = params.w2.data() + l * s.hidden;
    double sum = 0.0;
    for (std::size_t i = 0; i < s.hidden; ++i) sum += row[i] * t.h[i];
    t.z2[l] += sum;
  }
  t.o.resize(s.labels);
  for (std::size_t l = 0; l < s.labels; ++l) t.o[l] = activate(output_act, t.z2[l]);
  return t;
}

std::vector<double> predict_scores(const NetworkParams& params, const SparseVector& x, Activation hidden_act,
                                   Activation output_act) {
  return forward(params, x, hidden_act, output_act).o;
}

// --- losses -----------------------------------------------------------------

double loss_cross_entropy(std::span<const double> o, const LabelSet& y) {
  if (o.size() != y.label_count()) throw DimensionError("loss_cross_entropy: size mismatch");
  double loss = 0.0;
  std::size_t next = 0;
  const auto rel = y.relevant();
  for (std::size_t l = 0; l < o.size(); ++l) {
    const double p = std::clamp(o[l], kProbabilityClamp, 1.0 - kProbabilityClamp);
    const bool relevant = next < rel.size() && rel[next] == l;
    if (relevant) ++next;
    loss -= relevant ? std::log(p) : std::log1p(-p);
  }
  return loss;
}

double binary_cross_entropy_logit(double z, bool relevant) {
  return relevant ? -log_sigmoid(z) : -log_sigmoid(-z);
}

double log_loss_signed(double z, int signed_target) { return softplus(-static_cast<double>(signed_target) * z); }

double cross_entropy_from_logits(std::span<const double> z, const LabelSet& y) {
  if (z.size() != y.label_count()) throw DimensionError("cross_entropy_from_logits: size mismatch");
  double loss = 0.0;
  for (std::size_t l = 0; l < z.size(); ++l) loss += binary_cross_entropy_logit(z[l], y.contains(static_cast<LabelId>(l)));
  return loss;
}

std::optional<double> loss_pairwise(std::span<const double> o, const LabelSet& y) {
  if (o.size() != y.label_count()) throw DimensionError("loss_pairwise: size mismatch");
  if (!y.has_pairs()) return std::nullopt;
  const auto neg = y.irrelevant();
  double sum = 0.0;
  for (LabelId p : y.relevant())
    for (LabelId n : neg) sum += std::exp(-(o[p] - o[n]));
  return sum / (static_cast<double>(y.size()) * static_cast<double>(neg.size()));
}

std::optional<double> evaluate_loss(const LossConfig& config, std::span<const double> o, const LabelSet& y) {
  if (config.kind == LossKind::cross_entropy) {
    if (config.weighting == LabelWeighting::unit) return loss_cross_entropy(o, y);
    if (!y.has_pairs()) return std::nullopt;
    return loss_cross_entropy(o, y) * label_weight(y, config.weighting);
  }
  auto normalized = loss_pairwise(o, y);
  if (!normalized || config.weighting == LabelWeighting::inverse_cardinality) return normalized;
  return *normalized * static_cast<double>(y.size()) * static_cast<double>(y.irrelevant_size());
}

// --- output error terms -----------------------------------------------------

std::optional<std::vector<double>> output_delta_cross_entropy(const ForwardTrace& trace, const LabelSet& y,
                                                              LabelWeighting weighting, OpCounter* counter) {
  if (trace.output_act != Activation::sigmoid)
    throw ConfigError("cross entropy requires a sigmoid output layer");
  if (weighting == LabelWeighting::inverse_cardinality && !y.has_pairs()) return std::nullopt;
  const std::size_t labels = trace.o.size();
  std::vector<double> delta(labels);
  const auto rel = y.relevant();
  std::size_t next = 0;
  for (std::size_t l = 0; l < labels; ++l) {
    const bool relevant = next < rel.size() && rel[next] == l;
    if (relevant) ++next;
    delta[l] = trace.o[l] - (relevant ? 1.0 : 0.0);
  }
  std::uint64_t flops = labels;
  if (weighting == LabelWeighting::inverse_cardinality) {
    const double w = label_weight(y, weighting);
    for (auto& d : delta) d *= w;
    flops += labels;
  }
  if (counter) counter->flops += flops;
  return delta;
}

std::optional<std::vector<double>> output_delta_pairwise(const ForwardTrace& trace, const LabelSet& y,
                                                         LabelWeighting weighting, OpCounter* counter) {
  if (trace.output_act != Activation::tanh) throw ConfigError("the pairwise error requires a tanh output layer");
  if (!y.has_pairs()) return std::nullopt;
  const std::size_t labels = trace.o.size();
  const auto pos = y.relevant();
  const auto neg = y.irrelevant();
  const double w = label_weight(y, weighting);
  const auto& o = trace.o;

  std::vector<double> delta(labels);
  std::uint64_t flops = 0;
  for (LabelId l : pos) {
    double sum = 0.0;
    for (LabelId n : neg) sum += std::exp(-(o[l] - o[n]));
    flops += 3 * neg.size();
    delta[l] = -w * sum * activate_derivative(trace.output_act, trace.z2[l], o[l]);
  }
  for (LabelId l : neg) {
    double sum = 0.0;
    for (LabelId p : pos) sum += std::exp(-(o[p] - o[l]));
    flops += 3 * pos.size();
    delta[l] = w * sum * activate_derivative(trace.output_act, trace.z2[l], o[l]);
  }
  flops += 4 * labels;  // derivative (2) and the two scalings
  if (counter) counter->flops += flops;
  return delta;
}

// --- backward ---------------------------------------------------------------

Gradients backpropagate(const NetworkParams& params, const ForwardTrace& trace, const SparseVector& x,
                        std::span<const double> output_delta) {
  const Shape& s = params.shape;
  if (output_delta.size() != s.labels) throw DimensionError("output delta has the wrong length");
  Gradients g = Gradients::zeros(s);

  std::vector<double> back(s.hidden, 0.0);
  for (std::size_t l = 0; l < s.labels; ++l) {
    const double d = output_delta[l];
    g.b2[l] = d;
    if (d == 0.0) continue;
    const double* row = params.w2.data() + l * s.hidden;
    double* grow = g.w2.data() + l * s.hidden;
    for (std::size_t i = 0; i < s.hidden; ++i) {
      grow[i] = d * trace.h[i];
      back[i] += row[i] * d;
    }
  }

  for (std::size_t i = 0; i < s.hidden; ++i) {
    const double fz = activate(trace.hidden_act, trace.z1[i]);
    double gate = activate_derivative(trace.hidden_act, trace.z1[i], fz);
    if (trace.mask) gate = (*trace.mask)[i] ? gate * trace.keep_scale : 0.0;
    g.b1[i] = back[i] * gate;
  }

  g.w1_inputs.reserve(x.nnz());
  g.w1.resize(x.nnz() * s.hidden);
  std::size_t k = 0;
  for (const auto& e : x.entries()) {
    g.w1_inputs.push_back(e.index);
    double* block = g.w1.data() + k * s.hidden;
    for (std::size_t i = 0; i < s.hidden; ++i) block[i] = g.b1[i] * e.value;
    ++k;
  }
  return g;
}

Gradients backward_cross_entropy(const NetworkParams& params, const ForwardTrace& trace, const SparseVector& x,
                                 const LabelSet& y, OpCounter* counter) {
  auto delta = output_delta_cross_entropy(trace, y, LabelWeighting::unit, counter);
  return backpropagate(params, trace, x, *delta);
}

std::optional<Gradients> backward_pairwise(const NetworkParams& params, const ForwardTrace& trace,
                                           const SparseVector& x, const LabelSet& y, OpCounter* counter) {
  auto delta = output_delta_pairwise(trace, y, LabelWeighting::inverse_cardinality, counter);
  if (!delta) return std::nullopt;
  return backpropagate(params, trace, x, *delta);
}

std::optional<LossAndGradient> loss_and_gradient(const Model& model, const SparseVector& x, const LabelSet& y,
                                                 const std::optional<DropoutSpec>& dropout, OpCounter* counter) {
  const ForwardTrace trace = forward(model.params, x, model.hidden_act, model.output_act(), dropout);
  const auto loss = evaluate_loss(model.loss, trace.o, y);
  if (!loss) return std::nullopt;
  auto delta = model.loss.kind == LossKind::cross_entropy
                   ? output_delta_cross_entropy(trace, y, model.loss.weighting, counter)
                   : output_delta_pairwise(trace, y, model.loss.weighting, counter);
  if (!delta) return std::nullopt;
  return LossAndGradient{*loss, backpropagate(model.params, trace, x, *delta)};
}

}  // namespace mlnn
