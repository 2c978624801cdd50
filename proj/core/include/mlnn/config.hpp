#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlnn/io.hpp"
#include "mlnn/network.hpp"
#include "mlnn/optimizer.hpp"

namespace mlnn {

/// Everything a training run needs. Each field has a config key and a CLI
/// flag of the same name (see train_config_keys()).
struct TrainConfig {
  LossKind loss = LossKind::cross_entropy;
  std::optional<LabelWeighting> label_weighting;  // default depends on loss
  std::size_t hidden_units = 1000;
  Activation hidden_act = Activation::relu;
  double dropout = 0.5;
  OptimizerKind optimizer = OptimizerKind::adagrad;
  double eta0 = 0.1;
  std::vector<double> eta0_grid;  // nonempty: pick eta0 by validation rank loss
  double momentum = 0.9;
  std::size_t epochs = 10;
  std::uint64_t max_updates = 0;  // 0: bounded by epochs only
  std::size_t batch_size = 1;
  std::uint64_t eval_every = 1000;
  std::uint64_t seed = 1;
  double lambda = 1.0;
  double valid_fraction = 0.1;  // used when no validation file is given
  FileFormat format = FileFormat::svmlight_multilabel;

  std::filesystem::path train;
  std::filesystem::path valid;
  std::filesystem::path test;
  std::filesystem::path model;
  std::filesystem::path report;
  std::filesystem::path runlog;

  LossConfig loss_config() const;
  OptimizerSettings optimizer_settings() const;

  /// Throws ConfigError on a violated invariant.
  void validate() const;

  /// Sets one field from its textual form; throws ConfigError on an unknown
  /// key or unparsable value.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
};

const std::vector<std::string>& train_config_keys();

/// Flat `key = value` lines; `#` comments and blank lines ignored.
void apply_config_text(TrainConfig& config, std::string_view text);
void apply_config_file(TrainConfig& config, const std::filesystem::path& path);
std::string to_config_text(const TrainConfig& config);

/// The learning-rate grid searched when eta0_grid is requested without values.
inline const std::vector<double> kDefaultEta0Grid{0.001, 0.01, 0.1};

}  // namespace mlnn
