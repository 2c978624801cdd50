// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero if any criterion fails. Tolerances and budgets are pinned below.

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "mlnn/io.hpp"
#include "mlnn/metrics.hpp"
#include "mlnn/network.hpp"
#include "mlnn/optimizer.hpp"
#include "mlnn/random.hpp"
#include "mlnn/synthetic.hpp"
#include "mlnn/threshold.hpp"
#include "mlnn/trainer.hpp"
#include "oracles.hpp"

using namespace mlnn;
using Clock = std::chrono::steady_clock;

namespace {

enum class Verdict { pass, fail, skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// ---------------------------------------------------------------- 1

constexpr double kGradientTol = 1e-6;
constexpr double kGradientStep = 1e-5;
constexpr double kGradientFloor = 1e-4;  // denominator floor for near-zero partials
constexpr int kGradientDraws = 100;      // per (loss, hidden activation) pair
constexpr double kGradientSeconds = 10.0;

Outcome gradient_correctness() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double worst = 0.0;
  std::size_t compared = 0;
  for (LossKind kind : {LossKind::cross_entropy, LossKind::pairwise_error}) {
    for (Activation act : {Activation::relu, Activation::tanh, Activation::sigmoid}) {
      for (int draw = 0; draw < kGradientDraws;) {
        const Shape s{1 + rng.index(8), 1 + rng.index(8), 2 + rng.index(7)};
        const Model m{oracle::random_params(rng, s), act, LossConfig::defaults_for(kind)};
        const SparseVector x = oracle::random_sparse(rng, s.inputs);
        const LabelSet y = oracle::random_pair_labels(rng, s.labels);
        const ForwardTrace t = forward(m.params, x, act, m.output_act());
        if (act == Activation::relu &&
            std::any_of(t.z1.begin(), t.z1.end(), [](double z) { return std::abs(z) < 1e-3; }))
          continue;  // too close to the kink for central differences
        const auto lg = loss_and_gradient(m, x, y);
        const auto check = oracle::check_gradient(m, x, y, lg->gradient, kGradientStep, kGradientFloor);
        worst = std::max(worst, check.max_relative_error);
        compared += check.compared;
        ++draw;
      }
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = worst < kGradientTol && secs < kGradientSeconds;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt::format("max rel err {:.3e} (< {:g}) over {} partials, 6 x {} draws, {:.2f}s (< {:g}s)", worst,
                      kGradientTol, compared, kGradientDraws, secs, kGradientSeconds)};
}

// ---------------------------------------------------------------- 2

constexpr int kIdentityPairs = 10000;
constexpr double kIdentityTol = 1e-12;

Outcome cross_entropy_identity() {
  const auto t0 = Clock::now();
  Rng rng(102);
  double worst = 0.0;
  for (int k = 0; k < kIdentityPairs; ++k) {
    const double z = rng.normal() * std::pow(10.0, rng.uniform(-4, 3));
    const bool y = rng.bernoulli(0.5);
    worst = std::max(worst, std::abs(binary_cross_entropy_logit(z, y) - log_loss_signed(z, y ? 1 : -1)));
  }
  const double secs = seconds_since(t0);
  const bool ok = worst < kIdentityTol && secs < 1.0;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt::format("max abs diff {:.3e} (< {:g}) over {} pairs, {:.3f}s (< 1s)", worst, kIdentityTol,
                      kIdentityPairs, secs)};
}

// ---------------------------------------------------------------- 3

Outcome rank_loss_oracle() {
  Rng rng(103);
  int mismatches = 0, with_ties = 0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t L = 2 + rng.index(20);
    std::vector<double> s(L);
    const bool ties = k % 2 == 0;
    for (double& v : s) v = ties ? static_cast<double>(rng.index(4)) : rng.uniform(-1, 1);
    const LabelSet y = oracle::random_pair_labels(rng, L);
    const double got = *rank_loss(s, y), want = *oracle::rank_loss(s, y);
    if (got != want) ++mismatches;
    with_ties += ties;
  }
  return {mismatches == 0 ? Verdict::pass : Verdict::fail,
          fmt::format("{} exact mismatches over 1000 fixtures ({} with tied scores)", mismatches, with_ties)};
}

// ---------------------------------------------------------------- 4

constexpr double kPweGrowth = 10.0;
constexpr double kCeLinearTol = 0.2;

std::uint64_t delta_flops(LossKind kind, std::size_t L, std::size_t relevant) {
  Rng rng(104);
  const Model m{oracle::random_params(rng, {8, 8, L}), Activation::relu, LossConfig::defaults_for(kind)};
  std::vector<LabelId> rel;
  for (std::size_t l = 0; l < relevant; ++l) rel.push_back(static_cast<LabelId>(l));
  OpCounter counter;
  loss_and_gradient(m, oracle::random_sparse(rng, 8), LabelSet(L, rel), std::nullopt, &counter);
  return counter.flops;
}

Outcome pwe_cost_scaling() {
  std::string detail;
  bool ok = true;
  // Label cardinality fixed at 3, and growing with L (half relevant).
  for (bool proportional : {false, true}) {
    const auto rel = [&](std::size_t L) { return proportional ? L / 2 : std::size_t{3}; };
    const double pwe = static_cast<double>(delta_flops(LossKind::pairwise_error, 100, rel(100))) /
                       static_cast<double>(delta_flops(LossKind::pairwise_error, 10, rel(10)));
    const double ce = static_cast<double>(delta_flops(LossKind::cross_entropy, 100, rel(100))) /
                      static_cast<double>(delta_flops(LossKind::cross_entropy, 10, rel(10)));
    ok = ok && pwe >= kPweGrowth && std::abs(ce / 10.0 - 1.0) <= kCeLinearTol;
    detail += fmt::format("{}|y|={}: PWE x{:.1f} (>= {:g}), CE x{:.2f} (10 +- {:g}%)", detail.empty() ? "" : "; ",
                          proportional ? "L/2" : "3", pwe, kPweGrowth, ce, kCeLinearTol * 100);
  }
  return {ok ? Verdict::pass : Verdict::fail, "L 10 -> 100, " + detail};
}

// ---------------------------------------------------------------- 5

constexpr double kAdagradTol = 1e-9;

Outcome adagrad_closed_form() {
  const Shape s{1, 1, 1};
  const double eta0 = 0.1, eps = 1e-8;
  double worst = 0.0;
  for (double g : {1.0, 0.37, -4.2}) {
    NetworkParams p = NetworkParams::zeros(s);
    Optimizer opt({OptimizerKind::adagrad, eta0, 0.9, eps}, s);
    Gradients grad = Gradients::zeros(s);
    grad.b2 = {g};
    for (int tau = 1; tau <= 1000; ++tau) {
      const double before = p.b2[0];
      opt.update(p, grad);
      const double expected = eta0 * std::abs(g) / (std::abs(g) * std::sqrt(static_cast<double>(tau)) + eps);
      worst = std::max(worst, std::abs(std::abs(p.b2[0] - before) - expected));
    }
  }

  // Two labels' output biases; the first receives a gradient every update,
  // the second on every tenth.
  const Shape two{1, 1, 2};
  NetworkParams p = NetworkParams::zeros(two);
  Optimizer opt({OptimizerKind::adagrad, eta0}, two);
  Rng rng(105);
  for (int t = 0; t < 100; ++t) {
    Gradients grad = Gradients::zeros(two);
    const double g = rng.uniform(0.2, 1.0);
    grad.b2 = {g, t % 10 == 0 ? g : 0.0};
    opt.update(p, grad);
  }
  const double frequent = opt.effective_rate(3, 0), rare = opt.effective_rate(3, 1);
  const bool ok = worst < kAdagradTol && frequent < rare;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt::format("max |step - eta0/sqrt(tau)| {:.2e} (< {:g}) for tau <= 1000; rate frequent {:.4f} < rare {:.4f}",
                      worst, kAdagradTol, frequent, rare)};
}

// ---------------------------------------------------------------- 6 and 7

// Overfit-prone synthetic text task: 1000-word vocabulary, 10 labels, 300
// training documents, 1000 held-out documents, 500 hidden units.
constexpr std::size_t kTaskTrain = 300;
constexpr std::size_t kTaskHeldOut = 1000;
constexpr std::size_t kTaskHidden = 500;
constexpr double kTaskEta0 = 0.1;

std::pair<Dataset, Dataset> overfit_task(std::uint64_t seed) {
  synthetic::TopicCorpusSpec spec;
  spec.seed = seed;
  return synthetic::topic_corpus(spec, kTaskTrain, kTaskHeldOut);
}

TrainConfig task_config(std::uint64_t seed) {
  TrainConfig c;
  c.hidden_units = kTaskHidden;
  c.eta0 = kTaskEta0;
  c.seed = seed;
  return c;
}

constexpr std::uint64_t kDropoutBudget = 60000;
constexpr std::uint64_t kDropoutEvalEvery = 2000;
constexpr double kOverfitRise = 1.10;
constexpr double kDropoutSeconds = 120.0;

Outcome dropout_effect() {
  const auto t0 = Clock::now();
  const auto [train_data, test_data] = overfit_task(1);
  TrainConfig c = task_config(1);
  c.max_updates = kDropoutBudget;
  c.eval_every = kDropoutEvalEvery;

  c.dropout = 0.0;
  const TrainResult plain = train(c, train_data, test_data);
  c.dropout = 0.5;
  const TrainResult dropped = train(c, train_data, test_data);
  const double secs = seconds_since(t0);

  double plain_min = plain.log.entries.front().val_rankloss;
  for (const auto& e : plain.log.entries) plain_min = std::min(plain_min, e.val_rankloss);
  const double rise = plain.final_val_rankloss / plain_min;
  const bool ok = dropped.final_val_rankloss <= plain.final_val_rankloss && rise >= kOverfitRise &&
                  secs < kDropoutSeconds;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt::format("final test rankloss dropout {:.4f} <= none {:.4f}; no-dropout min {:.4f} -> final "
                      "x{:.3f} (>= {:.2f}); {} updates, {:.1f}s (< {:g}s)",
                      dropped.final_val_rankloss, plain.final_val_rankloss, plain_min, rise, kOverfitRise,
                      kDropoutBudget, secs, kDropoutSeconds)};
}

constexpr std::uint64_t kOrderBudget = 15000;
constexpr std::uint64_t kOrderEvalEvery = 500;
constexpr double kOrderDropout = 0.5;

struct Curves {
  std::vector<double> adagrad, momentum;  // validation rank loss past 20% of the budget
};

Curves convergence_curves(std::uint64_t seed) {
  const auto [train_data, valid_data] = overfit_task(seed);
  TrainConfig c = task_config(seed);
  c.max_updates = kOrderBudget;
  c.eval_every = kOrderEvalEvery;
  c.dropout = kOrderDropout;

  c.optimizer = OptimizerKind::adagrad;
  c.hidden_act = Activation::relu;
  const TrainResult a = train(c, train_data, valid_data);
  c.optimizer = OptimizerKind::momentum;
  c.hidden_act = Activation::tanh;
  const TrainResult m = train(c, train_data, valid_data);

  Curves out;
  const double start = 0.2 * static_cast<double>(kOrderBudget);
  for (std::size_t k = 0; k < a.log.entries.size(); ++k) {
    if (static_cast<double>(a.log.entries[k].updates) <= start) continue;
    out.adagrad.push_back(a.log.entries[k].val_rankloss);
    out.momentum.push_back(m.log.entries[k].val_rankloss);
  }
  return out;
}

bool ordered(const std::vector<double>& a, const std::vector<double>& m) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] > m[k]) return false;
  return true;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome convergence_ordering() {
  const auto t0 = Clock::now();
  const Curves first = convergence_curves(1);
  const auto summary = [](const Curves& c) {
    double worst_gap = -INFINITY;
    for (std::size_t k = 0; k < c.adagrad.size(); ++k) worst_gap = std::max(worst_gap, c.adagrad[k] - c.momentum[k]);
    return fmt::format("{} checkpoints past 20% of {} updates, adagrad max {:.4f}, momentum min {:.4f}, "
                       "max(adagrad - momentum) {:.4f}",
                       c.adagrad.size(), kOrderBudget, *std::max_element(c.adagrad.begin(), c.adagrad.end()),
                       *std::min_element(c.momentum.begin(), c.momentum.end()), worst_gap);
  };
  if (ordered(first.adagrad, first.momentum))
    return {Verdict::pass, fmt::format("seed 1: {}; eta0 {:g}, {:.1f}s", summary(first), kTaskEta0, seconds_since(t0))};

  // Fallback: median over five seeds at every checkpoint.
  std::vector<Curves> runs{first};
  for (std::uint64_t seed = 2; seed <= 5; ++seed) runs.push_back(convergence_curves(seed));
  Curves med;
  for (std::size_t k = 0; k < first.adagrad.size(); ++k) {
    std::vector<double> a, m;
    for (const auto& r : runs) {
      a.push_back(r.adagrad[k]);
      m.push_back(r.momentum[k]);
    }
    med.adagrad.push_back(median(a));
    med.momentum.push_back(median(m));
  }
  return {ordered(med.adagrad, med.momentum) ? Verdict::pass : Verdict::fail,
          fmt::format("seed 1 failed; 5-seed median: {}; {:.1f}s", summary(med), seconds_since(t0))};
}

// ---------------------------------------------------------------- 8

constexpr double kRidgeTol = 1e-8;

Outcome threshold_pipeline() {
  Rng rng(108);
  const std::size_t M = 200, L = 12;
  std::vector<std::vector<double>> scores;
  std::vector<std::vector<std::uint8_t>> bip;
  std::vector<LabelSet> gold;
  for (std::size_t m = 0; m < M; ++m) {
    const LabelSet y = oracle::random_pair_labels(rng, L);
    const double split = rng.uniform(-0.5, 0.5);
    std::vector<double> s(L);
    for (std::size_t l = 0; l < L; ++l)
      s[l] = y.contains(static_cast<LabelId>(l)) ? split + rng.uniform(1e-6, 1.0) : split - rng.uniform(1e-6, 1.0);
    bip.push_back(apply_cutoff(s, best_threshold(s, y)));
    scores.push_back(std::move(s));
    gold.push_back(y);
  }
  const EvaluationReport r = evaluate(scores, bip, gold);

  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t D = 1 + rng.index(5), Mr = D + 1 + rng.index(6);
    std::vector<std::vector<double>> dense(Mr, std::vector<double>(D));
    std::vector<SparseVector> xs;
    std::vector<double> t(Mr);
    for (std::size_t m = 0; m < Mr; ++m) {
      std::vector<SparseEntry> e;
      for (std::size_t j = 0; j < D; ++j) {
        dense[m][j] = rng.uniform(-2, 2);
        e.push_back({static_cast<FeatureId>(j), dense[m][j]});
      }
      xs.emplace_back(D, std::move(e));
      t[m] = rng.uniform(-1, 1);
    }
    const double lambda = rep % 4 == 0 ? 0.0 : std::pow(10.0, rng.uniform(-3, 1));
    const auto sol = oracle::ridge_normal_equations(dense, t, lambda);
    const ThresholdModel model = fit_threshold_regressor(xs, t, lambda);
    for (std::size_t j = 0; j < D; ++j) worst = std::max(worst, std::abs(model.theta[j] - sol[j]));
    worst = std::max(worst, std::abs(model.intercept - sol[D]));
  }
  const bool ok = r.bipartition->micro_f1 == 1.0 && r.bipartition->macro_f1 == 1.0 && worst < kRidgeTol;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt::format("separable fixtures ({} examples) micro-F1 {} macro-F1 {}; ridge vs normal equations max "
                      "diff {:.2e} (< {:g}) over 100 dense systems",
                      M, r.bipartition->micro_f1, r.bipartition->macro_f1, worst, kRidgeTol)};
}

// ---------------------------------------------------------------- 9

constexpr double kReutersRankLoss = 0.008;
constexpr double kReutersMicroF1 = 0.80;

Outcome reuters_reproduction() {
  const char* dir = std::getenv("MLNN_REUTERS_DIR");
  if (dir == nullptr) return {Verdict::skip, "set MLNN_REUTERS_DIR to a directory with train.svm and test.svm"};
  const std::filesystem::path root(dir);
  if (!std::filesystem::exists(root / "train.svm") || !std::filesystem::exists(root / "test.svm"))
    return {Verdict::skip, fmt::format("train.svm/test.svm not found under {}", root.string())};

  const auto t0 = Clock::now();
  const Dataset train_full = parse_multilabel_file(root / "train.svm", FileFormat::svmlight_multilabel);
  const Dataset test = parse_multilabel_file(root / "test.svm", FileFormat::svmlight_multilabel,
                                             {train_full.dim(), train_full.label_count()});
  auto [train_data, valid_data] = split(train_full, 0.9, 1);
  TrainConfig c;
  c.hidden_units = 1000;
  c.hidden_act = Activation::relu;
  c.dropout = 0.5;
  c.optimizer = OptimizerKind::adagrad;
  c.epochs = 10;
  c.eval_every = 2000;
  TrainResult best;
  bool first = true;
  for (double eta : kDefaultEta0Grid) {
    c.eta0 = eta;
    TrainResult r = train(c, train_data, valid_data);
    if (first || r.best_val_rankloss < best.best_val_rankloss) best = std::move(r);
    first = false;
  }
  const EvaluationReport r = evaluate_model(best.model, best.threshold, test);
  const bool ok = r.rank_loss <= kReutersRankLoss && r.bipartition->micro_f1 >= kReutersMicroF1;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt::format("test rankloss {:.4f} (<= {:g}), micro-F1 {:.4f} (>= {:.2f}), eta0 {:g}, {:.0f}s", r.rank_loss,
                      kReutersRankLoss, r.bipartition->micro_f1, kReutersMicroF1, best.eta0, seconds_since(t0))};
}

// ---------------------------------------------------------------- 10

constexpr double kSuiteTol = 1e-12;

Outcome metric_suite() {
  Rng rng(110);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t M = 50, L = 2 + rng.index(15);
    std::vector<std::vector<double>> scores;
    std::vector<std::vector<std::uint8_t>> bip;
    std::vector<LabelSet> gold;
    for (std::size_t m = 0; m < M; ++m) {
      std::vector<double> s(L);
      const bool ties = rng.bernoulli(0.3);
      for (double& v : s) v = ties ? static_cast<double>(rng.index(3)) : rng.uniform01();
      std::vector<std::uint8_t> b(L);
      for (auto& v : b) v = rng.bernoulli(0.4);
      scores.push_back(std::move(s));
      bip.push_back(std::move(b));
      gold.push_back(oracle::random_labels(rng, L, rng.uniform(0.05, 0.95)));
    }
    const EvaluationReport r = evaluate(scores, bip, gold);
    const oracle::NaiveReport n = oracle::evaluate(scores, bip, gold);
    const auto& b = *r.bipartition;
    for (double d : {r.rank_loss - n.rank_loss, r.one_error - n.one_error, r.coverage - n.coverage, r.map - n.map,
                     b.micro_precision - n.miP, b.micro_recall - n.miR, b.micro_f1 - n.miF,
                     b.macro_precision - n.maP, b.macro_recall - n.maR, b.macro_f1 - n.maF})
      worst = std::max(worst, std::abs(d));
    if (r.skipped_examples != n.skipped) worst = INFINITY;
  }

  // One label on every example, predicted perfectly; nine rare labels never predicted.
  const std::size_t L = 10;
  std::vector<std::vector<double>> scores;
  std::vector<std::vector<std::uint8_t>> bip;
  std::vector<LabelSet> gold;
  for (std::size_t m = 0; m < 200; ++m) {
    std::vector<LabelId> rel{0};
    if (m % 5 == 0) rel.push_back(static_cast<LabelId>(1 + m / 5 % 9));
    gold.emplace_back(L, rel);
    std::vector<std::uint8_t> b(L, 0);
    b[0] = 1;
    bip.push_back(b);
    std::vector<double> s(L, 0.0);
    s[0] = 1.0;
    scores.push_back(s);
  }
  const auto freq = *evaluate(scores, bip, gold).bipartition;
  const bool ok = worst < kSuiteTol && freq.micro_f1 > freq.macro_f1;
  return {ok ? Verdict::pass : Verdict::fail,
          fmt::format("max |report - naive| {:.2e} (< {:g}) over 200 fixtures of 50 examples; frequent-label fixture "
                      "micro-F1 {:.4f} > macro-F1 {:.4f}",
                      worst, kSuiteTol, freq.micro_f1, freq.macro_f1)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "gradient correctness", gradient_correctness},
      {2, "cross entropy / log-loss identity", cross_entropy_identity},
      {3, "rank loss oracle", rank_loss_oracle},
      {4, "pairwise error cost scaling", pwe_cost_scaling},
      {5, "adagrad closed form", adagrad_closed_form},
      {6, "dropout regularization", dropout_effect},
      {7, "convergence ordering", convergence_ordering},
      {8, "threshold pipeline", threshold_pipeline},
      {9, "reuters-21578 reproduction", reuters_reproduction},
      {10, "metric suite equivalence", metric_suite},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Verdict::fail, fmt::format("exception: {}", e.what())};
    }
    const char* tag = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::fail ? "FAIL" : "SKIP";
    failed += o.verdict == Verdict::fail;
    fmt::print("{} {:>2} {}: {}\n", tag, c.id, c.name, o.detail);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
