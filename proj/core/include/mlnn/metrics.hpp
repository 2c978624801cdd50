#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlnn/dataset.hpp"

namespace mlnn {

/// Labels sorted by score descending, ties by ascending label id.
class RankedList {
 public:
  explicit RankedList(std::span<const double> scores);

  std::span<const LabelId> order() const noexcept { return order_; }
  /// 1-based rank of label l.
  std::size_t rank(LabelId l) const { return rank_[l]; }
  LabelId top() const { return order_.front(); }

 private:
  std::vector<LabelId> order_;
  std::vector<std::size_t> rank_;
};

/// Fraction of (relevant, irrelevant) pairs ranked wrongly, ties counting 1/2.
/// nullopt when y or its complement is empty.
std::optional<double> rank_loss(std::span<const double> scores, const LabelSet& y);
/// 1 if the top-ranked label is irrelevant (always 1 for empty y).
double one_error(std::span<const double> scores, const LabelSet& y);
/// max rank of a relevant label minus one; nullopt for empty y.
std::optional<double> coverage(std::span<const double> scores, const LabelSet& y);
std::optional<double> average_precision(std::span<const double> scores, const LabelSet& y);

struct LabelCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Per-label confusion counts over M examples.
struct ConfusionCounts {
  std::vector<LabelCounts> per_label;
  std::uint64_t examples = 0;

  explicit ConfusionCounts(std::size_t label_count = 0) : per_label(label_count) {}
  void add(std::span<const std::uint8_t> predicted, const LabelSet& gold);
};

struct BipartitionMeasures {
  double micro_precision = 0, micro_recall = 0, micro_f1 = 0;
  double macro_precision = 0, macro_recall = 0, macro_f1 = 0;
  friend bool operator==(const BipartitionMeasures&, const BipartitionMeasures&) = default;
};

/// Pooled (micro) and per-label averaged (macro) P/R/F1; every 0/0 is 0.
BipartitionMeasures micro_macro(const ConfusionCounts& counts);

/// Ranking measures average over examples where they are defined: rank loss,
/// coverage and AP skip examples whose label set is empty or full;
/// one-error covers all examples.
struct EvaluationReport {
  double rank_loss = 0, one_error = 0, coverage = 0, map = 0;
  std::optional<BipartitionMeasures> bipartition;
  std::size_t examples = 0;
  std::size_t skipped_examples = 0;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

/// Throws DimensionError on length mismatch and ConfigError on zero examples.
/// An empty `bipartitions` span leaves the bipartition section absent.
EvaluationReport evaluate(std::span<const std::vector<double>> scores_all,
                          std::span<const std::vector<std::uint8_t>> bipartitions,
                          std::span<const LabelSet> gold);

/// CSV in the column order
/// rankloss,oneError,coverage,MAP,miP,miR,miF,maP,maR,maF,examples,skipped;
/// absent bipartition fields are empty.
std::string report_csv_header();
std::string report_csv_row(const EvaluationReport& report);
EvaluationReport parse_report_csv(const std::string& text);

/// Flat `key = value` lines, one measure per line.
std::string report_text(const EvaluationReport& report);

}  // namespace mlnn
