#include "mlnn/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "mlnn/errors.hpp"

namespace mlnn {

double example_f1(std::span<const double> scores, const LabelSet& y, double cutoff) {
  std::size_t predicted = 0, tp = 0;
  for (std::size_t l = 0; l < scores.size(); ++l) {
    if (scores[l] > cutoff) {
      ++predicted;
      if (y.contains(static_cast<LabelId>(l))) ++tp;
    }
  }
  if (predicted + y.size() == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(predicted + y.size());
}

ThresholdChoice best_threshold_choice(std::span<const double> scores, const LabelSet& y) {
  const std::size_t labels = scores.size();
  if (labels == 0 || labels != y.label_count()) throw DimensionError("best_threshold: score/label size mismatch");
  for (double s : scores)
    if (!std::isfinite(s)) throw NumericError("best_threshold: non-finite score");

  std::vector<std::size_t> order(labels);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const double hi = scores[order.front()];
  const double lo = scores[order.back()];

  double smallest_gap = 0.0;
  for (std::size_t k = 1; k < labels; ++k) {
    const double gap = scores[order[k - 1]] - scores[order[k]];
    if (gap > 0.0 && (smallest_gap == 0.0 || gap < smallest_gap)) smallest_gap = gap;
  }
  const double delta = smallest_gap > 0.0 ? smallest_gap / 2.0 : 1e-6;

  if (y.size() == labels) return {lo - delta, 1.0, labels};
  if (y.size() == 0) return {hi + delta, 1.0, 0};

  const double positives = static_cast<double>(y.size());
  ThresholdChoice best{hi + delta, 0.0, 0};
  double best_gap = 0.0;
  auto consider = [&](double cutoff, double gap, std::size_t predicted, std::size_t tp) {
    const double f1 = 2.0 * static_cast<double>(tp) / (static_cast<double>(predicted) + positives);
    const bool better = f1 > best.f1 || (f1 == best.f1 && (gap > best_gap || (gap == best_gap && cutoff > best.cutoff)));
    if (better) {
      best = {cutoff, f1, predicted};
      best_gap = gap;
    }
  };

  std::size_t tp = 0;
  for (std::size_t k = 1; k <= labels; ++k) {
    if (y.contains(static_cast<LabelId>(order[k - 1]))) ++tp;
    if (k == labels) {
      consider(lo - delta, 0.0, k, tp);
    } else {
      const double above = scores[order[k - 1]];
      const double below = scores[order[k]];
      if (above > below) consider(below + (above - below) / 2.0, above - below, k, tp);
    }
  }
  return best;
}

double best_threshold(std::span<const double> scores, const LabelSet& y) {
  return best_threshold_choice(scores, y).cutoff;
}

double ThresholdModel::predict(const SparseVector& x) const {
  if (x.dim() != theta.size())
    throw DimensionError(fmt::format("threshold model expects dimension {}, got {}", theta.size(), x.dim()));
  return x.dot(theta) + intercept;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Centred least-squares operator: v -> (1/M) Xc^T Xc v + lambda v.
struct RidgeSystem {
  std::span<const SparseVector> xs;
  std::vector<double> mean_x;
  double lambda;

  void apply(std::span<const double> v, std::span<double> out) const {
    const double mean_proj = dot(mean_x, v);
    std::fill(out.begin(), out.end(), 0.0);
    double sum_s = 0.0;
    for (const auto& x : xs) {
      const double s = x.dot(v) - mean_proj;
      sum_s += s;
      for (const auto& e : x.entries()) out[e.index] += s * e.value;
    }
    const double inv_m = 1.0 / static_cast<double>(xs.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] - sum_s * mean_x[i]) * inv_m + lambda * v[i];
  }
};

double ridge_objective(std::span<const SparseVector> xs, std::span<const double> targets, double mean_t,
                       std::span<const double> mean_x, std::span<const double> theta, double lambda) {
  const double mean_proj = dot(mean_x, theta);
  double sq = 0.0;
  for (std::size_t m = 0; m < xs.size(); ++m) {
    const double r = (xs[m].dot(theta) - mean_proj) - (targets[m] - mean_t);
    sq += r * r;
  }
  return sq / (2.0 * static_cast<double>(xs.size())) + 0.5 * lambda * dot(theta, theta);
}

}  // namespace

RidgeFit fit_threshold_regressor_detailed(std::span<const SparseVector> xs, std::span<const double> targets,
                                          double lambda, const RidgeOptions& options) {
  if (xs.empty()) throw ConfigError("threshold regression needs at least one example");
  if (xs.size() != targets.size()) throw ConfigError("threshold regression: inputs and targets differ in length");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be a finite nonnegative number");
  const std::size_t dim = xs.front().dim();
  for (const auto& x : xs)
    if (x.dim() != dim) throw DimensionError("threshold regression: inconsistent input dimensions");
  for (double t : targets)
    if (!std::isfinite(t)) throw NumericError("threshold regression: non-finite target");

  const double inv_m = 1.0 / static_cast<double>(xs.size());
  RidgeSystem system{xs, std::vector<double>(dim, 0.0), lambda};
  for (const auto& x : xs)
    for (const auto& e : x.entries()) system.mean_x[e.index] += e.value * inv_m;
  double mean_t = 0.0;
  for (double t : targets) mean_t += t * inv_m;

  // rhs = (1/M) Xc^T (t - mean_t)
  std::vector<double> rhs(dim, 0.0);
  double sum_c = 0.0;
  for (std::size_t m = 0; m < xs.size(); ++m) {
    const double c = targets[m] - mean_t;
    sum_c += c;
    for (const auto& e : xs[m].entries()) rhs[e.index] += c * e.value;
  }
  for (std::size_t i = 0; i < dim; ++i) rhs[i] = (rhs[i] - sum_c * system.mean_x[i]) * inv_m;

  RidgeFit fit;
  std::vector<double> theta(dim, 0.0);
  std::vector<double> r = rhs;
  std::vector<double> p = r;
  std::vector<double> ap(dim);
  double rr = dot(r, r);
  const std::size_t cap = options.max_iterations > 0 ? options.max_iterations : 2 * (dim + 1) + 100;
  fit.objective_history.push_back(ridge_objective(xs, targets, mean_t, system.mean_x, theta, lambda));

  while (std::sqrt(rr) >= options.gradient_tol && fit.iterations < cap) {
    system.apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    for (std::size_t i = 0; i < dim; ++i) {
      theta[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    const double rr_next = dot(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t i = 0; i < dim; ++i) p[i] = r[i] + beta * p[i];
    ++fit.iterations;
    fit.objective_history.push_back(ridge_objective(xs, targets, mean_t, system.mean_x, theta, lambda));
  }

  // Report the true gradient norm rather than the recurrence residual.
  system.apply(theta, ap);
  double g2 = 0.0;
  for (std::size_t i = 0; i < dim; ++i) g2 += (ap[i] - rhs[i]) * (ap[i] - rhs[i]);
  fit.gradient_norm = std::sqrt(g2);

  fit.model.intercept = mean_t - dot(system.mean_x, theta);
  fit.model.theta = std::move(theta);
  fit.model.lambda = lambda;
  return fit;
}

ThresholdModel fit_threshold_regressor(std::span<const SparseVector> xs, std::span<const double> targets,
                                       double lambda, const RidgeOptions& options) {
  return fit_threshold_regressor_detailed(xs, targets, lambda, options).model;
}

std::vector<std::uint8_t> apply_cutoff(std::span<const double> scores, double cutoff) {
  std::vector<std::uint8_t> out(scores.size());
  for (std::size_t l = 0; l < scores.size(); ++l) out[l] = scores[l] > cutoff ? 1 : 0;
  return out;
}

std::vector<std::uint8_t> predict_bipartition(const ThresholdModel& model, const SparseVector& x,
                                              std::span<const double> scores) {
  return apply_cutoff(scores, model.predict(x));
}

}  // namespace mlnn
