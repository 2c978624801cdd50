#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mlnn/dataset.hpp"

namespace mlnn {

struct ThresholdChoice {
  double cutoff = 0.0;
  double f1 = 0.0;
  std::size_t predicted = 0;  // labels with score > cutoff
};

/// Example-level F1-optimal cutoff. Candidates are every midpoint between
/// adjacent distinct sorted scores plus one cutoff above the maximum and one
/// below the minimum (offset delta = half the smallest positive gap, 1e-6 if
/// all scores are equal). Ties on F1 go to the larger gap around the cutoff,
/// then to the higher cutoff. All-relevant examples get min - delta,
/// none-relevant ones max + delta.
ThresholdChoice best_threshold_choice(std::span<const double> scores, const LabelSet& y);
double best_threshold(std::span<const double> scores, const LabelSet& y);

/// Example F1 of predicting exactly the labels with score > cutoff.
/// Defined as 1 when both the prediction and y are empty.
double example_f1(std::span<const double> scores, const LabelSet& y, double cutoff);

/// Linear threshold predictor T(x) = theta^T x + intercept.
struct ThresholdModel {
  std::vector<double> theta;
  double intercept = 0.0;
  double lambda = 1.0;

  std::size_t dim() const noexcept { return theta.size(); }
  double predict(const SparseVector& x) const;
  friend bool operator==(const ThresholdModel&, const ThresholdModel&) = default;
};

struct RidgeOptions {
  double gradient_tol = 1e-8;
  std::size_t max_iterations = 0;  // 0: 2 * (D + 1) + 100
};

struct RidgeFit {
  ThresholdModel model;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  std::vector<double> objective_history;  // objective after each iteration, starting at theta = 0
};

/// Minimises (1/2M) sum_m (theta^T x_m + b - t_m)^2 + (lambda/2) |theta|^2 with
/// the intercept b unpenalised. Runs conjugate gradients on the centred
/// normal equations using only sparse products. Throws ConfigError on empty
/// input, size mismatch or negative lambda.
RidgeFit fit_threshold_regressor_detailed(std::span<const SparseVector> xs, std::span<const double> targets,
                                          double lambda, const RidgeOptions& options = {});
ThresholdModel fit_threshold_regressor(std::span<const SparseVector> xs, std::span<const double> targets,
                                       double lambda, const RidgeOptions& options = {});

/// y_hat_l = 1 iff scores_l > T(x).
std::vector<std::uint8_t> predict_bipartition(const ThresholdModel& model, const SparseVector& x,
                                              std::span<const double> scores);
std::vector<std::uint8_t> apply_cutoff(std::span<const double> scores, double cutoff);

}  // namespace mlnn
