#include "mlnn/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "mlnn/errors.hpp"

namespace mlnn {

RankedList::RankedList(std::span<const double> scores) : order_(scores.size()), rank_(scores.size()) {
  std::iota(order_.begin(), order_.end(), LabelId{0});
  std::stable_sort(order_.begin(), order_.end(), [&](LabelId a, LabelId b) { return scores[a] > scores[b]; });
  for (std::size_t r = 0; r < order_.size(); ++r) rank_[order_[r]] = r + 1;
}

namespace {

void check_sizes(std::span<const double> scores, const LabelSet& y) {
  if (scores.size() != y.label_count())
    throw DimensionError(fmt::format("{} scores for {} labels", scores.size(), y.label_count()));
  if (scores.empty()) throw DimensionError("no labels to rank");
}

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

std::optional<double> rank_loss(std::span<const double> scores, const LabelSet& y) {
  check_sizes(scores, y);
  if (!y.has_pairs()) return std::nullopt;
  std::vector<double> negatives;
  negatives.reserve(y.irrelevant_size());
  for (LabelId n : y.irrelevant()) negatives.push_back(scores[n]);
  std::sort(negatives.begin(), negatives.end());

  // Twice the mis-ordered pair count keeps the 1/2 tie term integral.
  std::uint64_t doubled = 0;
  for (LabelId p : y.relevant()) {
    const auto lower = std::lower_bound(negatives.begin(), negatives.end(), scores[p]);
    const auto upper = std::upper_bound(lower, negatives.end(), scores[p]);
    doubled += 2 * static_cast<std::uint64_t>(negatives.end() - upper) + static_cast<std::uint64_t>(upper - lower);
  }
  const double pairs = static_cast<double>(y.size()) * static_cast<double>(y.irrelevant_size());
  return (static_cast<double>(doubled) / 2.0) / pairs;
}

double one_error(std::span<const double> scores, const LabelSet& y) {
  check_sizes(scores, y);
  return y.contains(RankedList(scores).top()) ? 0.0 : 1.0;
}

std::optional<double> coverage(std::span<const double> scores, const LabelSet& y) {
  check_sizes(scores, y);
  if (y.size() == 0) return std::nullopt;
  const RankedList ranked(scores);
  std::size_t worst = 0;
  for (LabelId l : y.relevant()) worst = std::max(worst, ranked.rank(l));
  return static_cast<double>(worst - 1);
}

std::optional<double> average_precision(std::span<const double> scores, const LabelSet& y) {
  check_sizes(scores, y);
  if (y.size() == 0) return std::nullopt;
  const RankedList ranked(scores);
  std::vector<std::size_t> ranks;
  ranks.reserve(y.size());
  for (LabelId l : y.relevant()) ranks.push_back(ranked.rank(l));
  std::sort(ranks.begin(), ranks.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) sum += static_cast<double>(i + 1) / static_cast<double>(ranks[i]);
  return sum / static_cast<double>(ranks.size());
}

void ConfusionCounts::add(std::span<const std::uint8_t> predicted, const LabelSet& gold) {
  if (predicted.size() != per_label.size() || gold.label_count() != per_label.size())
    throw DimensionError("confusion counts: label count mismatch");
  for (std::size_t l = 0; l < per_label.size(); ++l) {
    const bool truth = gold.contains(static_cast<LabelId>(l));
    auto& c = per_label[l];
    if (predicted[l]) {
      ++(truth ? c.tp : c.fp);
    } else {
      ++(truth ? c.fn : c.tn);
    }
  }
  ++examples;
}

BipartitionMeasures micro_macro(const ConfusionCounts& counts) {
  BipartitionMeasures m;
  double tp = 0, fp = 0, fn = 0;
  for (const auto& c : counts.per_label) {
    const double ltp = static_cast<double>(c.tp), lfp = static_cast<double>(c.fp), lfn = static_cast<double>(c.fn);
    tp += ltp;
    fp += lfp;
    fn += lfn;
    m.macro_precision += safe_ratio(ltp, ltp + lfp);
    m.macro_recall += safe_ratio(ltp, ltp + lfn);
    m.macro_f1 += safe_ratio(2 * ltp, 2 * ltp + lfp + lfn);
  }
  if (!counts.per_label.empty()) {
    const auto labels = static_cast<double>(counts.per_label.size());
    m.macro_precision /= labels;
    m.macro_recall /= labels;
    m.macro_f1 /= labels;
  }
  m.micro_precision = safe_ratio(tp, tp + fp);
  m.micro_recall = safe_ratio(tp, tp + fn);
  m.micro_f1 = safe_ratio(2 * tp, 2 * tp + fp + fn);
  return m;
}

EvaluationReport evaluate(std::span<const std::vector<double>> scores_all,
                          std::span<const std::vector<std::uint8_t>> bipartitions,
                          std::span<const LabelSet> gold) {
  if (scores_all.size() != gold.size()) throw DimensionError("evaluate: scores and gold labels differ in length");
  if (!bipartitions.empty() && bipartitions.size() != gold.size())
    throw DimensionError("evaluate: bipartitions and gold labels differ in length");
  if (gold.empty()) throw ConfigError("evaluate: no examples");

  EvaluationReport report;
  report.examples = gold.size();
  double rl = 0, oe = 0, cov = 0, ap = 0;
  std::size_t ranked = 0;
  for (std::size_t m = 0; m < gold.size(); ++m) {
    oe += one_error(scores_all[m], gold[m]);
    const auto loss = rank_loss(scores_all[m], gold[m]);
    if (!loss) {
      ++report.skipped_examples;
      continue;
    }
    rl += *loss;
    cov += *coverage(scores_all[m], gold[m]);
    ap += *average_precision(scores_all[m], gold[m]);
    ++ranked;
  }
  report.one_error = oe / static_cast<double>(gold.size());
  if (ranked > 0) {
    report.rank_loss = rl / static_cast<double>(ranked);
    report.coverage = cov / static_cast<double>(ranked);
    report.map = ap / static_cast<double>(ranked);
  }

  if (!bipartitions.empty()) {
    ConfusionCounts counts(gold.front().label_count());
    for (std::size_t m = 0; m < gold.size(); ++m) counts.add(bipartitions[m], gold[m]);
    report.bipartition = micro_macro(counts);
  }
  return report;
}

// --- serialisation ----------------------------------------------------------

std::string report_csv_header() { return "rankloss,oneError,coverage,MAP,miP,miR,miF,maP,maR,maF,examples,skipped"; }

std::string report_csv_row(const EvaluationReport& r) {
  std::string row = fmt::format("{},{},{},{}", r.rank_loss, r.one_error, r.coverage, r.map);
  if (r.bipartition) {
    const auto& b = *r.bipartition;
    fmt::format_to(std::back_inserter(row), ",{},{},{},{},{},{}", b.micro_precision, b.micro_recall, b.micro_f1,
                   b.macro_precision, b.macro_recall, b.macro_f1);
  } else {
    row += ",,,,,,";
  }
  fmt::format_to(std::back_inserter(row), ",{},{}", r.examples, r.skipped_examples);
  return row;
}

namespace {

template <typename T>
T parse_number(std::string_view cell) {
  T value{};
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size())
    throw ParseError(fmt::format("bad report field '{}'", cell), 2);
  return value;
}

}  // namespace

EvaluationReport parse_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string header, row;
  std::getline(in, header);
  if (header != report_csv_header()) throw ParseError("unexpected report header", 1);
  if (!std::getline(in, row)) throw ParseError("report has no data row", 2);

  std::vector<std::string_view> cells;
  std::string_view view = row;
  while (true) {
    const auto comma = view.find(',');
    cells.push_back(view.substr(0, comma));
    if (comma == std::string_view::npos) break;
    view.remove_prefix(comma + 1);
  }
  if (cells.size() != 12) throw ParseError(fmt::format("report row has {} fields, expected 12", cells.size()), 2);

  EvaluationReport r;
  r.rank_loss = parse_number<double>(cells[0]);
  r.one_error = parse_number<double>(cells[1]);
  r.coverage = parse_number<double>(cells[2]);
  r.map = parse_number<double>(cells[3]);
  const bool absent = std::all_of(cells.begin() + 4, cells.begin() + 10, [](auto c) { return c.empty(); });
  if (!absent) {
    BipartitionMeasures b;
    b.micro_precision = parse_number<double>(cells[4]);
    b.micro_recall = parse_number<double>(cells[5]);
    b.micro_f1 = parse_number<double>(cells[6]);
    b.macro_precision = parse_number<double>(cells[7]);
    b.macro_recall = parse_number<double>(cells[8]);
    b.macro_f1 = parse_number<double>(cells[9]);
    r.bipartition = b;
  }
  r.examples = parse_number<std::size_t>(cells[10]);
  r.skipped_examples = parse_number<std::size_t>(cells[11]);
  return r;
}

std::string report_text(const EvaluationReport& r) {
  std::string out = fmt::format("rankloss = {}\noneError = {}\ncoverage = {}\nMAP = {}\n", r.rank_loss, r.one_error,
                                r.coverage, r.map);
  if (r.bipartition) {
    const auto& b = *r.bipartition;
    fmt::format_to(std::back_inserter(out), "miP = {}\nmiR = {}\nmiF = {}\nmaP = {}\nmaR = {}\nmaF = {}\n",
                   b.micro_precision, b.micro_recall, b.micro_f1, b.macro_precision, b.macro_recall, b.macro_f1);
  } else {
    out += "bipartition = absent\n";
  }
  fmt::format_to(std::back_inserter(out), "examples = {}\nskipped = {}\n", r.examples, r.skipped_examples);
  return out;
}

}  // namespace mlnn
