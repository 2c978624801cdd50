#include "mlnn/trainer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "mlnn/errors.hpp"
#include "mlnn/io.hpp"
#include "mlnn/model_file.hpp"
#include "mlnn/optimizer.hpp"
#include "mlnn/random.hpp"

namespace mlnn {

void RunLog::write_csv(std::ostream& out) const {
  out << "updates,train_loss,val_rankloss,val_map\n";
  for (const auto& e : entries) out << fmt::format("{},{},{},{}\n", e.updates, e.train_loss, e.val_rankloss, e.val_map);
}

std::vector<std::vector<double>> score_dataset(const Model& model, const Dataset& data) {
  std::vector<std::vector<double>> scores;
  scores.reserve(data.size());
  for (const auto& inst : data) scores.push_back(model.scores(inst.features));
  return scores;
}

RankingSummary ranking_summary(const Model& model, const Dataset& data) {
  RankingSummary summary;
  std::size_t counted = 0;
  for (const auto& inst : data) {
    const auto scores = model.scores(inst.features);
    const auto loss = rank_loss(scores, inst.labels);
    if (!loss) continue;
    summary.rank_loss += *loss;
    summary.map += *average_precision(scores, inst.labels);
    ++counted;
  }
  if (counted > 0) {
    summary.rank_loss /= static_cast<double>(counted);
    summary.map /= static_cast<double>(counted);
  }
  return summary;
}

EvaluationReport evaluate_model(const Model& model, const std::optional<ThresholdModel>& threshold,
                                const Dataset& data) {
  const Shape& s = model.params.shape;
  if (data.dim() != s.inputs || data.label_count() != s.labels)
    throw DimensionError(fmt::format("data has shape (D={}, L={}), model expects (D={}, L={})", data.dim(),
                                     data.label_count(), s.inputs, s.labels));
  const auto scores = score_dataset(model, data);
  std::vector<std::vector<std::uint8_t>> bipartitions;
  if (threshold) {
    bipartitions.reserve(data.size());
    for (std::size_t m = 0; m < data.size(); ++m)
      bipartitions.push_back(predict_bipartition(*threshold, data[m].features, scores[m]));
  }
  std::vector<LabelSet> gold;
  gold.reserve(data.size());
  for (const auto& inst : data) gold.push_back(inst.labels);
  return evaluate(scores, bipartitions, gold);
}

namespace {

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kShuffleStream = 0x5407;
constexpr std::uint64_t kDropoutStream = 0xd809;

void write_checkpoint(const TrainConfig& config, const Model& model) {
  if (config.model.empty()) return;
  std::filesystem::path path = config.model;
  path += ".lastgood";
  save_model(path, ModelFile{model, std::nullopt});
}

}  // namespace

TrainResult train(const TrainConfig& config, const Dataset& train_data, const Dataset& valid_data) {
  config.validate();
  if (train_data.dim() != valid_data.dim() || train_data.label_count() != valid_data.label_count())
    throw DimensionError(fmt::format("training data (D={}, L={}) and validation data (D={}, L={}) disagree",
                                     train_data.dim(), train_data.label_count(), valid_data.dim(),
                                     valid_data.label_count()));

  const Shape shape{train_data.dim(), config.hidden_units, train_data.label_count()};
  Model model{NetworkParams::glorot(shape, derive_seed(config.seed, kInitStream)), config.hidden_act,
              config.loss_config()};
  Optimizer optimizer(config.optimizer_settings(), shape);

  TrainResult result;
  result.eta0 = config.eta0;
  result.best_val_rankloss = std::numeric_limits<double>::infinity();
  Model best = model;

  double loss_sum = 0.0;
  std::uint64_t loss_count = 0;
  std::uint64_t examples_seen = 0;

  auto log_point = [&] {
    const RankingSummary summary = ranking_summary(model, valid_data);
    const double mean_loss = loss_count > 0 ? loss_sum / static_cast<double>(loss_count) : 0.0;
    result.log.entries.push_back({result.updates, mean_loss, summary.rank_loss, summary.map});
    loss_sum = 0.0;
    loss_count = 0;
    result.final_val_rankloss = summary.rank_loss;
    if (summary.rank_loss < result.best_val_rankloss) {
      result.best_val_rankloss = summary.rank_loss;
      result.best_updates = result.updates;
      best = model;
    }
  };

  const std::size_t m = train_data.size();
  std::vector<std::size_t> order(m);
  bool done = false;
  for (std::size_t epoch = 0; !done; ++epoch) {
    if (config.max_updates == 0 && epoch == config.epochs) break;
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    Rng rng(derive_seed(config.seed, kShuffleStream, epoch));
    for (std::size_t i = m - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);

    for (std::size_t start = 0; start < m && !done; start += config.batch_size) {
      const std::size_t stop = std::min(m, start + config.batch_size);
      Gradients batch;
      std::size_t used = 0;
      for (std::size_t k = start; k < stop; ++k) {
        const Instance& inst = train_data[order[k]];
        std::optional<DropoutSpec> dropout;
        if (config.dropout > 0.0)
          dropout = DropoutSpec{config.dropout, derive_seed(config.seed, kDropoutStream, examples_seen)};
        ++examples_seen;
        auto lg = loss_and_gradient(model, inst.features, inst.labels, dropout);
        if (!lg) {
          ++result.skipped_examples;
          continue;
        }
        if (!std::isfinite(lg->loss)) {
          write_checkpoint(config, best);
          throw NumericError(fmt::format("non-finite training loss after {} updates (epoch {})", result.updates, epoch));
        }
        loss_sum += lg->loss;
        ++loss_count;
        if (used == 0) {
          batch = std::move(lg->gradient);
        } else {
          batch.add_scaled(lg->gradient, 1.0);
        }
        ++used;
      }
      if (used == 0) continue;
      if (used > 1) batch.scale(1.0 / static_cast<double>(used));
      try {
        optimizer.update(model.params, batch);
      } catch (const NumericError&) {
        write_checkpoint(config, best);
        throw;
      }
      ++result.updates;
      if (result.updates % config.eval_every == 0) log_point();
      if (config.max_updates > 0 && result.updates >= config.max_updates) done = true;
    }
    if (config.max_updates > 0 && epoch > 0 && result.updates == 0) break;  // nothing trainable
  }
  if (result.log.entries.empty() || result.log.entries.back().updates != result.updates) log_point();

  result.model = std::move(best);

  std::vector<SparseVector> xs;
  std::vector<double> targets;
  xs.reserve(m);
  targets.reserve(m);
  for (const auto& inst : train_data) {
    xs.push_back(inst.features);
    targets.push_back(best_threshold(result.model.scores(inst.features), inst.labels));
  }
  result.threshold = fit_threshold_regressor(xs, targets, config.lambda);
  return result;
}

TrainResult train_from_config(const TrainConfig& config) {
  config.validate();
  if (config.train.empty()) throw ConfigError("no training file given");
  const Dataset full = parse_multilabel_file(config.train, config.format);
  std::optional<Dataset> train_data, valid_data;
  if (!config.valid.empty()) {
    train_data = full;
    valid_data = parse_multilabel_file(config.valid, config.format, {full.dim(), full.label_count()});
  } else {
    auto [tr, va] = split(full, 1.0 - config.valid_fraction, config.seed);
    train_data = std::move(tr);
    valid_data = std::move(va);
  }

  TrainResult result;
  if (config.eta0_grid.empty()) {
    result = train(config, *train_data, *valid_data);
  } else {
    bool first = true;
    for (double eta0 : config.eta0_grid) {
      TrainConfig candidate = config;
      candidate.eta0 = eta0;
      TrainResult r = train(candidate, *train_data, *valid_data);
      if (first || r.best_val_rankloss < result.best_val_rankloss) result = std::move(r);
      first = false;
    }
  }

  if (!config.model.empty()) save_model(config.model, ModelFile{result.model, result.threshold});
  if (!config.runlog.empty()) {
    std::ofstream out(config.runlog);
    if (!out) throw Error(fmt::format("cannot write '{}'", config.runlog.string()));
    result.log.write_csv(out);
  }
  return result;
}

}  // namespace mlnn
