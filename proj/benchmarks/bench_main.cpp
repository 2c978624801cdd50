#include <benchmark/benchmark.h>

#include <vector>

#include "mlnn/metrics.hpp"
#include "mlnn/network.hpp"
#include "mlnn/optimizer.hpp"
#include "mlnn/random.hpp"
#include "mlnn/threshold.hpp"

using namespace mlnn;

namespace {

constexpr std::size_t kInputs = 2000;
constexpr std::size_t kHidden = 200;
constexpr std::size_t kNonzeros = 60;

SparseVector random_document(Rng& rng) {
  std::vector<SparseEntry> e;
  for (std::size_t k = 0; k < kNonzeros; ++k) e.push_back({static_cast<FeatureId>(rng.index(kInputs)), rng.uniform01()});
  return SparseVector::from_unsorted(kInputs, std::move(e));
}

LabelSet few_labels(std::size_t L) { return LabelSet(L, {0, static_cast<LabelId>(L / 2), static_cast<LabelId>(L - 1)}); }

Model random_model(LossKind kind, std::size_t L) {
  return Model{NetworkParams::glorot({kInputs, kHidden, L}, 1), Activation::relu, LossConfig::defaults_for(kind)};
}

void loss_and_gradient_bench(benchmark::State& state, LossKind kind) {
  const auto L = static_cast<std::size_t>(state.range(0));
  const Model m = random_model(kind, L);
  Rng rng(2);
  const SparseVector x = random_document(rng);
  const LabelSet y = few_labels(L);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(m, x, y));
  state.SetLabel(kind == LossKind::cross_entropy ? "ce" : "pwe");
}

void BM_CrossEntropyStep(benchmark::State& state) { loss_and_gradient_bench(state, LossKind::cross_entropy); }
void BM_PairwiseStep(benchmark::State& state) { loss_and_gradient_bench(state, LossKind::pairwise_error); }

void BM_AdagradUpdate(benchmark::State& state) {
  const std::size_t L = 50;
  Model m = random_model(LossKind::cross_entropy, L);
  Rng rng(3);
  const auto g = loss_and_gradient(m, random_document(rng), few_labels(L));
  Optimizer opt({OptimizerKind::adagrad, 0.1}, m.params.shape);
  for (auto _ : state) opt.update(m.params, g->gradient);
}

void BM_RankLoss(benchmark::State& state) {
  const auto L = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  std::vector<double> s(L);
  for (double& v : s) v = rng.uniform01();
  const LabelSet y = few_labels(L);
  for (auto _ : state) benchmark::DoNotOptimize(rank_loss(s, y));
}

void BM_BestThreshold(benchmark::State& state) {
  const auto L = static_cast<std::size_t>(state.range(0));
  Rng rng(5);
  std::vector<double> s(L);
  for (double& v : s) v = rng.uniform01();
  const LabelSet y = few_labels(L);
  for (auto _ : state) benchmark::DoNotOptimize(best_threshold(s, y));
}

}  // namespace

BENCHMARK(BM_CrossEntropyStep)->Arg(10)->Arg(100)->Arg(1000);
BENCHMARK(BM_PairwiseStep)->Arg(10)->Arg(100)->Arg(1000);
BENCHMARK(BM_AdagradUpdate);
BENCHMARK(BM_RankLoss)->Arg(10)->Arg(100)->Arg(1000);
BENCHMARK(BM_BestThreshold)->Arg(10)->Arg(100)->Arg(1000);

BENCHMARK_MAIN();
