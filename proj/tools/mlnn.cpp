// mlnn: train, evaluate and inspect multi-label neural network models.

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlnn/config.hpp"
#include "mlnn/dataset.hpp"
#include "mlnn/errors.hpp"
#include "mlnn/io.hpp"
#include "mlnn/landscape.hpp"
#include "mlnn/metrics.hpp"
#include "mlnn/model_file.hpp"
#include "mlnn/tfidf.hpp"
#include "mlnn/trainer.hpp"

namespace fs = std::filesystem;
using namespace mlnn;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void write_report(const EvaluationReport& report, const fs::path& csv_path) {
  std::cout << report_text(report);
  if (csv_path.empty()) return;
  auto csv = open_output(csv_path);
  csv << report_csv_header() << '\n' << report_csv_row(report) << '\n';
  fs::path text_path = csv_path;
  text_path += ".txt";
  auto text = open_output(text_path);
  text << report_text(report);
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string config_file;
  std::map<std::string, std::string> values;
};

void add_train(CLI::App& app, TrainArgs& args) {
  auto* cmd = app.add_subcommand("train", "train a network and its threshold predictor");
  cmd->add_option("--config", args.config_file, "flat key = value config file")->check(CLI::ExistingFile);
  for (const auto& key : train_config_keys()) {
    cmd->add_option_function<std::string>(
        "--" + key, [&args, key](const std::string& v) { args.values[key] = v; }, "overrides config key " + key);
  }
  cmd->callback([&args] {
    TrainConfig config;
    if (!args.config_file.empty()) apply_config_file(config, args.config_file);
    for (const auto& [key, value] : args.values) config.set(key, value);
    config.validate();

    TrainResult result = train_from_config(config);
    fmt::print(stderr, "eta0 = {}  updates = {}  best updates = {}  best val rankloss = {:.6f}\n", result.eta0,
               result.updates, result.best_updates, result.best_val_rankloss);
    if (result.skipped_examples > 0)
      fmt::print(stderr, "warning: {} example visits skipped by the loss (empty or full label set)\n",
                 result.skipped_examples);

    if (!config.test.empty()) {
      const Dataset test = parse_multilabel_file(
          config.test, config.format, {result.model.params.shape.inputs, result.model.params.shape.labels});
      write_report(evaluate_model(result.model, result.threshold, test), config.report);
    }
  });
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string model;
  std::string test;
  std::string format = "svmlight";
  std::string report;
  bool ranking_only = false;
};

void add_evaluate(CLI::App& app, EvaluateArgs& args) {
  auto* cmd = app.add_subcommand("evaluate", "score a test set with a saved model");
  cmd->add_option("--model", args.model, "model file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--test", args.test, "test data")->required()->check(CLI::ExistingFile);
  cmd->add_option("--format", args.format, "svmlight or dense-csv");
  cmd->add_option("--report", args.report, "CSV report path (a .txt twin is written next to it)");
  cmd->add_flag("--ranking-only", args.ranking_only, "ignore the threshold predictor");
  cmd->callback([&args] {
    ModelFile file = load_model(fs::path(args.model));
    const Shape& shape = file.model.params.shape;
    const Dataset test = parse_multilabel_file(args.test, parse_file_format(args.format), {shape.inputs, shape.labels});
    if (args.ranking_only) file.threshold.reset();
    if (!file.threshold) fmt::print(stderr, "note: model has no threshold predictor, bipartition measures absent\n");
    write_report(evaluate_model(file.model, file.threshold, test), args.report);
  });
}

// ---------------------------------------------------------------- landscape

struct LandscapeArgs {
  std::string loss = "ce";
  std::string hidden_act = "relu";
  AxisRange w1{-4.0, 4.0, 50};
  AxisRange w2{-4.0, 4.0, 50};
  double x = 1.0;
  double c = 0.0;
  std::vector<unsigned> relevant{0, 2};
  double gradient_tol = 1e-3;
  double cost_margin = 0.1;
  std::string output;
};

void add_landscape(CLI::App& app, LandscapeArgs& args) {
  auto* cmd = app.add_subcommand("landscape", "cost surface of a 1-1-4 toy network over (W1, W2_1)");
  cmd->add_option("--loss", args.loss, "ce or pwe");
  cmd->add_option("--hidden_act", args.hidden_act, "relu, tanh or sigmoid");
  cmd->add_option("--w1_lo", args.w1.lo);
  cmd->add_option("--w1_hi", args.w1.hi);
  cmd->add_option("--w1_steps", args.w1.steps);
  cmd->add_option("--w2_lo", args.w2.lo);
  cmd->add_option("--w2_hi", args.w2.hi);
  cmd->add_option("--w2_steps", args.w2.steps);
  cmd->add_option("--x", args.x, "scalar input");
  cmd->add_option("--c", args.c, "value of the pinned output weights");
  cmd->add_option("--relevant", args.relevant, "relevant label ids out of 4")->delimiter(',');
  cmd->add_option("--gradient_tol", args.gradient_tol, "plateau scan: max |partial|");
  cmd->add_option("--cost_margin", args.cost_margin, "plateau scan: min cost above the grid minimum");
  cmd->add_option("--output,-o", args.output, "CSV path (stdout when omitted)");
  cmd->callback([&args] {
    LandscapeFixture fixture;
    fixture.x = args.x;
    fixture.c = args.c;
    fixture.y = LabelSet(4, std::vector<LabelId>(args.relevant.begin(), args.relevant.end()));
    const LossConfig loss = LossConfig::defaults_for(parse_loss_kind(args.loss));
    const LandscapeGrid grid = landscape_grid(args.w1, args.w2, loss, parse_activation(args.hidden_act), fixture);
    if (args.output.empty()) {
      write_landscape_csv(std::cout, grid);
    } else {
      auto out = open_output(args.output);
      write_landscape_csv(out, grid);
    }
    const PlateauScan scan = find_plateaus(grid, args.gradient_tol, args.cost_margin);
    fmt::print(stderr, "min cost = {:.6f}  plateau cells = {}  plateau regions = {}\n", scan.min_cost,
               scan.plateau_cells, scan.regions);
  });
}

// ---------------------------------------------------------------- vectorize

struct VectorizeArgs {
  std::string input;
  std::string output;
  std::string vocab;
  std::string label_names;
  bool fit = false;
  std::optional<std::size_t> max_features;
};

struct RawDoc {
  std::vector<std::string> labels;
  TokenList tokens;
};

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string piece;
  std::istringstream in(s);
  while (std::getline(in, piece, sep))
    if (!piece.empty()) parts.push_back(piece);
  return parts;
}

// One document per line: comma-separated label names, a TAB, whitespace-separated tokens.
std::vector<RawDoc> read_documents(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::vector<RawDoc> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected '<labels>\\t<tokens>'", line_no);
    RawDoc doc;
    doc.labels = split_on(line.substr(0, tab), ',');
    std::istringstream tokens(line.substr(tab + 1));
    for (std::string t; tokens >> t;) doc.tokens.push_back(t);
    docs.push_back(std::move(doc));
  }
  if (docs.empty()) throw ParseError("no documents", 0);
  return docs;
}

void add_vectorize(CLI::App& app, VectorizeArgs& args) {
  auto* cmd = app.add_subcommand("vectorize", "turn tokenised documents into tf-idf svmlight data");
  cmd->add_option("--input", args.input, "documents: labels<TAB>tokens per line")->required()->check(CLI::ExistingFile);
  cmd->add_option("--output", args.output, "svmlight-multilabel output")->required();
  cmd->add_option("--vocab", args.vocab, "vectorizer file (written with --fit, read otherwise)")->required();
  cmd->add_option("--label_names", args.label_names, "label-name sidecar (written with --fit, read otherwise)")
      ->required();
  cmd->add_flag("--fit", args.fit, "fit vocabulary and label names on this input");
  cmd->add_option("--max_features", args.max_features, "keep the most frequent tokens only");
  cmd->callback([&args] {
    const std::vector<RawDoc> docs = read_documents(args.input);
    VectorizerModel model;
    std::vector<std::string> names;
    if (args.fit) {
      std::vector<TokenList> corpus;
      corpus.reserve(docs.size());
      for (const auto& d : docs) corpus.push_back(d.tokens);
      model = fit_tfidf(corpus, args.max_features);
      for (const auto& d : docs) names.insert(names.end(), d.labels.begin(), d.labels.end());
      std::sort(names.begin(), names.end());
      names.erase(std::unique(names.begin(), names.end()), names.end());
      save_vectorizer(args.vocab, model);
      write_label_names(args.label_names, names);
    } else {
      model = load_vectorizer(args.vocab);
      names = read_label_names(args.label_names);
    }

    std::unordered_map<std::string, LabelId> label_ids;
    for (std::size_t i = 0; i < names.size(); ++i) label_ids.emplace(names[i], static_cast<LabelId>(i));
    std::vector<Instance> instances;
    instances.reserve(docs.size());
    for (std::size_t m = 0; m < docs.size(); ++m) {
      std::vector<LabelId> relevant;
      for (const auto& name : docs[m].labels) {
        auto it = label_ids.find(name);
        if (it == label_ids.end()) throw ParseError(fmt::format("unknown label '{}'", name), m + 1);
        relevant.push_back(it->second);
      }
      instances.push_back({transform_tfidf(model, docs[m].tokens), LabelSet(names.size(), std::move(relevant))});
    }
    write_svmlight_file(args.output, Dataset(model.dim(), names.size(), std::move(instances)));
    fmt::print(stderr, "{} documents, D = {}, L = {}\n", docs.size(), model.dim(), names.size());
  });
}

// ---------------------------------------------------------------- split

struct SplitArgs {
  std::string input;
  std::string format = "svmlight";
  double fraction = 0.9;
  std::uint64_t seed = 1;
  std::string first;
  std::string second;
};

void add_split(CLI::App& app, SplitArgs& args) {
  auto* cmd = app.add_subcommand("split", "random two-way partition of a data file");
  cmd->add_option("--input", args.input)->required()->check(CLI::ExistingFile);
  cmd->add_option("--format", args.format, "svmlight or dense-csv");
  cmd->add_option("--fraction", args.fraction, "share of instances in the first part");
  cmd->add_option("--seed", args.seed);
  cmd->add_option("--first", args.first, "output for the first part")->required();
  cmd->add_option("--second", args.second, "output for the second part")->required();
  cmd->callback([&args] {
    const Dataset data = parse_multilabel_file(args.input, parse_file_format(args.format));
    auto [a, b] = split(data, args.fraction, args.seed);
    write_svmlight_file(args.first, a);
    write_svmlight_file(args.second, b);
    fmt::print(stderr, "{} -> {} + {}\n", data.size(), a.size(), b.size());
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-label text classification with a one-hidden-layer network"};
  app.require_subcommand(1);

  TrainArgs train_args;
  EvaluateArgs evaluate_args;
  LandscapeArgs landscape_args;
  VectorizeArgs vectorize_args;
  SplitArgs split_args;
  add_train(app, train_args);
  add_evaluate(app, evaluate_args);
  add_landscape(app, landscape_args);
  add_vectorize(app, vectorize_args);
  add_split(app, split_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    fmt::print(stderr, "mlnn: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "mlnn: unexpected error: {}\n", e.what());
    return 2;
  }
  return 0;
}
