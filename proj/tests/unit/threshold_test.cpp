#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mlnn/errors.hpp"
#include "mlnn/metrics.hpp"
#include "mlnn/random.hpp"
#include "mlnn/threshold.hpp"
#include "oracles.hpp"

using namespace mlnn;

namespace {

// Every cutoff that yields a distinct bipartition: one per distinct score
// level, plus one above the maximum.
double brute_best_f1(const std::vector<double>& s, const LabelSet& y) {
  std::vector<double> cuts(s.begin(), s.end());
  cuts.push_back(*std::min_element(s.begin(), s.end()) - 1.0);
  double best = 0.0;
  for (double c : cuts) best = std::max(best, example_f1(s, y, c));
  return best;
}

std::vector<double> random_scores(Rng& rng, std::size_t L, bool with_ties) {
  std::vector<double> s(L);
  for (double& v : s) v = with_ties ? static_cast<double>(rng.index(4)) / 4.0 : rng.uniform(-1, 1);
  return s;
}

}  // namespace

TEST_SUITE("threshold") {

TEST_CASE("three relevant labels on top of nine") {
  const std::vector<double> s{0.9, 0.2, 0.1, 0.8, 0.3, 0.7, 0.05, 0.25, 0.15};
  const LabelSet y(9, {0, 3, 5});
  const ThresholdChoice c = best_threshold_choice(s, y);
  CHECK(c.f1 == 1.0);
  CHECK(c.predicted == 3);
  CHECK(c.cutoff == doctest::Approx((0.7 + 0.3) / 2).epsilon(1e-15));
}

TEST_CASE("degenerate label sets") {
  const std::vector<double> s{0.4, 0.1, 0.9};
  const double all = best_threshold(s, LabelSet(3, {0, 1, 2}));
  CHECK(all < 0.1);
  CHECK(all == doctest::Approx(0.1 - 0.15).epsilon(1e-15));
  const double none = best_threshold(s, LabelSet(3));
  CHECK(none > 0.9);
  const std::vector<double> flat{0.5, 0.5};
  CHECK(best_threshold(flat, LabelSet(2, {0, 1})) == doctest::Approx(0.5 - 1e-6).epsilon(1e-15));
}

TEST_CASE("four labels against brute force") {
  const std::vector<double> s{0.9, 0.8, 0.3, 0.1};
  const LabelSet y(4, {0, 2});
  const ThresholdChoice c = best_threshold_choice(s, y);
  CHECK(c.f1 == doctest::Approx(brute_best_f1(s, y)).epsilon(1e-15));
  // Cutting after 0.3 gives F1 0.8; after 0.9 gives 2/3.
  CHECK(c.f1 == doctest::Approx(0.8));
  CHECK(c.cutoff == doctest::Approx(0.2));
  CHECK(example_f1(s, y, c.cutoff) == c.f1);
}

TEST_CASE("per-example optimality against every cutpoint and every global cutoff") {
  Rng rng(12);
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t L = 2 + rng.index(10);
    const auto s = random_scores(rng, L, rep % 2 == 0);
    const LabelSet y = oracle::random_labels(rng, L);
    const ThresholdChoice c = best_threshold_choice(s, y);
    CHECK(c.f1 == doctest::Approx(brute_best_f1(s, y)).epsilon(1e-15));
    CHECK(example_f1(s, y, c.cutoff) == doctest::Approx(c.f1).epsilon(1e-15));
    for (double global : {-0.5, 0.0, 0.25, 0.5, 0.9}) CHECK(c.f1 >= example_f1(s, y, global));
    // The cutoff lies strictly between adjacent scores or outside the range.
    for (double v : s) CHECK(v != c.cutoff);
  }
}

TEST_CASE("bipartition invariant under increasing transforms") {
  // Only when a single bipartition attains the best F1: the larger-gap
  // tie-break compares gaps, which a nonlinear transform can reorder.
  Rng rng(13);
  int compared = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t L = 2 + rng.index(10);
    const auto s = random_scores(rng, L, rep % 3 == 0);
    std::vector<double> t(L);
    std::transform(s.begin(), s.end(), t.begin(), [](double v) { return std::exp(3 * v) + 7; });
    const LabelSet y = oracle::random_labels(rng, L);
    const double best = brute_best_f1(s, y);
    std::vector<double> cuts(s.begin(), s.end());
    cuts.push_back(*std::min_element(s.begin(), s.end()) - 1.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    int winners = 0;
    for (double c : cuts) winners += example_f1(s, y, c) == best;
    if (winners != 1) continue;
    ++compared;
    CHECK(apply_cutoff(s, best_threshold(s, y)) == apply_cutoff(t, best_threshold(t, y)));
  }
  CHECK(compared > 100);
}

TEST_CASE("separable scores give perfect bipartitions") {
  Rng rng(14);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t L = 2 + rng.index(20);
    const LabelSet y = oracle::random_pair_labels(rng, L);
    std::vector<double> s(L);
    for (std::size_t l = 0; l < L; ++l) s[l] = y.contains(static_cast<LabelId>(l)) ? rng.uniform(0.6, 1) : rng.uniform(0, 0.4);
    const auto bip = apply_cutoff(s, best_threshold(s, y));
    ConfusionCounts counts(L);
    counts.add(bip, y);
    CHECK(micro_macro(counts).micro_f1 == 1.0);
  }
}

TEST_CASE("ridge interpolates a single example") {
  const std::vector<SparseVector> xs{SparseVector(4, {{2, 1.0}})};
  const std::vector<double> t{0.37};
  const ThresholdModel m = fit_threshold_regressor(xs, t, 0.0);
  CHECK(m.predict(xs[0]) == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("ridge with huge lambda predicts the target mean") {
  Rng rng(15);
  std::vector<SparseVector> xs;
  std::vector<double> t;
  for (int m = 0; m < 30; ++m) {
    xs.push_back(oracle::random_sparse(rng, 6));
    t.push_back(rng.uniform(-1, 1));
  }
  const ThresholdModel m = fit_threshold_regressor(xs, t, 1e12);
  double mean = 0;
  for (double v : t) mean += v / 30.0;
  for (double th : m.theta) CHECK(std::abs(th) < 1e-9);
  CHECK(m.intercept == doctest::Approx(mean).epsilon(1e-9));
}

TEST_CASE("ridge matches the normal equations") {
  Rng rng(16);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t D = 3, M = 5;
    std::vector<std::vector<double>> dense(M, std::vector<double>(D));
    std::vector<SparseVector> xs;
    std::vector<double> t(M);
    for (std::size_t m = 0; m < M; ++m) {
      std::vector<SparseEntry> e;
      for (std::size_t j = 0; j < D; ++j) {
        dense[m][j] = rng.uniform(-2, 2);
        e.push_back({static_cast<FeatureId>(j), dense[m][j]});
      }
      xs.emplace_back(D, std::move(e));
      t[m] = rng.uniform(-1, 1);
    }
    const auto sol = oracle::ridge_normal_equations(dense, t, 0.1);
    const ThresholdModel m = fit_threshold_regressor(xs, t, 0.1, {1e-14, 0});
    for (std::size_t j = 0; j < D; ++j) CHECK(std::abs(m.theta[j] - sol[j]) < 1e-8);
    CHECK(std::abs(m.intercept - sol[D]) < 1e-8);
  }
}

TEST_CASE("ridge objective is nonincreasing") {
  Rng rng(17);
  std::vector<SparseVector> xs;
  std::vector<double> t;
  for (int m = 0; m < 80; ++m) {
    xs.push_back(oracle::random_sparse(rng, 25, 0.2));
    t.push_back(rng.normal());
  }
  const RidgeFit fit = fit_threshold_regressor_detailed(xs, t, 0.01);
  REQUIRE(fit.objective_history.size() >= 2);
  for (std::size_t k = 1; k < fit.objective_history.size(); ++k)
    CHECK(fit.objective_history[k] <= fit.objective_history[k - 1] + 1e-15);
  CHECK(fit.gradient_norm < 1e-7);
}

TEST_CASE("ridge input validation") {
  const std::vector<SparseVector> xs{SparseVector(2, {{0, 1.0}})};
  const std::vector<double> none;
  const std::vector<double> t{1.0};
  CHECK_THROWS_AS(fit_threshold_regressor({}, none, 1.0), ConfigError);
  CHECK_THROWS_AS(fit_threshold_regressor(xs, none, 1.0), ConfigError);
  CHECK_THROWS_AS(fit_threshold_regressor(xs, t, -1.0), ConfigError);
}

TEST_CASE("bipartition from the threshold model") {
  ThresholdModel m{{0.0, 0.0}, 0.0, 1.0};
  const SparseVector x(2);
  const std::vector<double> s{0.2, 0.5, 0.9};
  m.intercept = 0.1;
  CHECK(predict_bipartition(m, x, s) == std::vector<std::uint8_t>{1, 1, 1});
  m.intercept = 0.95;
  CHECK(predict_bipartition(m, x, s) == std::vector<std::uint8_t>{0, 0, 0});
  m.intercept = 0.5;
  CHECK(predict_bipartition(m, x, s) == std::vector<std::uint8_t>{0, 0, 1});
  CHECK_THROWS_AS(m.predict(SparseVector(3)), DimensionError);
}

}  // TEST_SUITE
