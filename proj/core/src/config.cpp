#include "mlnn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "mlnn/errors.hpp"

namespace mlnn {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_value(std::string_view key, std::string_view text) {
  T value{};
  text = trim(text);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw ConfigError(fmt::format("{}: cannot parse '{}'", key, text));
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError(fmt::format("{}: value must be finite", key));
  }
  return value;
}

std::vector<double> parse_grid(std::string_view text) {
  text = trim(text);
  if (text.empty() || text == "none") return {};
  if (text == "default") return kDefaultEta0Grid;
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_value<double>("eta0_grid", text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& train_config_keys() {
  static const std::vector<std::string> keys{
      "loss",     "label_weighting", "hidden_units", "hidden_act", "dropout",        "optimizer",
      "eta0",     "eta0_grid",       "momentum",     "epochs",     "max_updates",    "batch_size",
      "eval_every", "seed",          "lambda",       "valid_fraction", "format",     "train",
      "valid",    "test",            "model",        "report",     "runlog"};
  return keys;
}

LossConfig TrainConfig::loss_config() const {
  LossConfig config = LossConfig::defaults_for(loss);
  if (label_weighting) config.weighting = *label_weighting;
  return config;
}

OptimizerSettings TrainConfig::optimizer_settings() const {
  OptimizerSettings s;
  s.kind = optimizer;
  s.eta0 = eta0;
  s.momentum = momentum;
  return s;
}

void TrainConfig::validate() const {
  if (hidden_units < 1) throw ConfigError("hidden_units must be at least 1");
  if (!(eta0 > 0.0)) throw ConfigError("eta0 must be positive");
  for (double e : eta0_grid)
    if (!(e > 0.0)) throw ConfigError("eta0_grid values must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (eval_every < 1) throw ConfigError("eval_every must be at least 1");
  if (epochs < 1 && max_updates == 0) throw ConfigError("either epochs or max_updates must be positive");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be nonnegative");
  if (!(valid_fraction > 0.0 && valid_fraction < 1.0)) throw ConfigError("valid_fraction must lie in (0, 1)");
}

void TrainConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "loss") loss = parse_loss_kind(value);
  else if (key == "label_weighting")
    label_weighting = value == "auto" ? std::nullopt : std::optional(parse_label_weighting(value));
  else if (key == "hidden_units") hidden_units = parse_value<std::size_t>(key, value);
  else if (key == "hidden_act") hidden_act = parse_activation(value);
  else if (key == "dropout") dropout = parse_value<double>(key, value);
  else if (key == "optimizer") optimizer = parse_optimizer_kind(value);
  else if (key == "eta0") eta0 = parse_value<double>(key, value);
  else if (key == "eta0_grid") eta0_grid = parse_grid(value);
  else if (key == "momentum") momentum = parse_value<double>(key, value);
  else if (key == "epochs") epochs = parse_value<std::size_t>(key, value);
  else if (key == "max_updates") max_updates = parse_value<std::uint64_t>(key, value);
  else if (key == "batch_size") batch_size = parse_value<std::size_t>(key, value);
  else if (key == "eval_every") eval_every = parse_value<std::uint64_t>(key, value);
  else if (key == "seed") seed = parse_value<std::uint64_t>(key, value);
  else if (key == "lambda") lambda = parse_value<double>(key, value);
  else if (key == "valid_fraction") valid_fraction = parse_value<double>(key, value);
  else if (key == "format") format = parse_file_format(value);
  else if (key == "train") train = std::string(value);
  else if (key == "valid") valid = std::string(value);
  else if (key == "test") test = std::string(value);
  else if (key == "model") model = std::string(value);
  else if (key == "report") report = std::string(value);
  else if (key == "runlog") runlog = std::string(value);
  else throw ConfigError(fmt::format("unknown config key '{}'", key));
}

std::string TrainConfig::get(std::string_view key) const {
  if (key == "loss") return std::string(to_string(loss));
  if (key == "label_weighting") return label_weighting ? std::string(to_string(*label_weighting)) : "auto";
  if (key == "hidden_units") return fmt::format("{}", hidden_units);
  if (key == "hidden_act") return std::string(to_string(hidden_act));
  if (key == "dropout") return fmt::format("{}", dropout);
  if (key == "optimizer") return std::string(to_string(optimizer));
  if (key == "eta0") return fmt::format("{}", eta0);
  if (key == "eta0_grid") return eta0_grid.empty() ? "none" : fmt::format("{}", fmt::join(eta0_grid, ","));
  if (key == "momentum") return fmt::format("{}", momentum);
  if (key == "epochs") return fmt::format("{}", epochs);
  if (key == "max_updates") return fmt::format("{}", max_updates);
  if (key == "batch_size") return fmt::format("{}", batch_size);
  if (key == "eval_every") return fmt::format("{}", eval_every);
  if (key == "seed") return fmt::format("{}", seed);
  if (key == "lambda") return fmt::format("{}", lambda);
  if (key == "valid_fraction") return fmt::format("{}", valid_fraction);
  if (key == "format") return std::string(to_string(format));
  if (key == "train") return train.string();
  if (key == "valid") return valid.string();
  if (key == "test") return test.string();
  if (key == "model") return model.string();
  if (key == "report") return report.string();
  if (key == "runlog") return runlog.string();
  throw ConfigError(fmt::format("unknown config key '{}'", key));
}

void apply_config_text(TrainConfig& config, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    try {
      config.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
}

void apply_config_file(TrainConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open config '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  apply_config_text(config, buffer.str());
}

std::string to_config_text(const TrainConfig& config) {
  std::string out;
  for (const auto& key : train_config_keys()) {
    const std::string value = config.get(key);
    if (!value.empty()) fmt::format_to(std::back_inserter(out), "{} = {}\n", key, value);
  }
  return out;
}

}  // namespace mlnn
