#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mlnn/config.hpp"
#include "mlnn/dataset.hpp"
#include "mlnn/metrics.hpp"
#include "mlnn/network.hpp"
#include "mlnn/threshold.hpp"

namespace mlnn {

struct RunLogEntry {
  std::uint64_t updates = 0;
  double train_loss = 0.0;  // mean loss of the examples seen since the previous entry
  double val_rankloss = 0.0;
  double val_map = 0.0;

  friend bool operator==(const RunLogEntry&, const RunLogEntry&) = default;
};

struct RunLog {
  std::vector<RunLogEntry> entries;

  void write_csv(std::ostream& out) const;  // updates,train_loss,val_rankloss,val_map
  friend bool operator==(const RunLog&, const RunLog&) = default;
};

struct TrainResult {
  Model model;  // best-validation parameters
  ThresholdModel threshold;
  RunLog log;
  double eta0 = 0.0;
  std::uint64_t updates = 0;
  std::uint64_t skipped_examples = 0;  // examples the loss could not use
  std::uint64_t best_updates = 0;
  double best_val_rankloss = 0.0;
  double final_val_rankloss = 0.0;  // parameters after the last update
};

struct RankingSummary {
  double rank_loss = 0.0;
  double map = 0.0;
};

std::vector<std::vector<double>> score_dataset(const Model& model, const Dataset& data);
RankingSummary ranking_summary(const Model& model, const Dataset& data);

/// Trains on `train`, selects parameters by validation rank loss, then fits
/// the threshold predictor on training scores. Throws NumericError on a
/// non-finite loss; when config.model is set, the best parameters so far are
/// written to `<model>.lastgood` first.
TrainResult train(const TrainConfig& config, const Dataset& train, const Dataset& valid);

/// Loads the files named in config (splitting off a validation set when none
/// is given), runs train() or the eta0 grid, and writes the model and run log
/// if their paths are set.
TrainResult train_from_config(const TrainConfig& config);

/// Scores `data`; the bipartition section is filled only when `threshold` is set.
EvaluationReport evaluate_model(const Model& model, const std::optional<ThresholdModel>& threshold,
                                const Dataset& data);

}  // namespace mlnn
