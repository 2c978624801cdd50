#include "mlnn/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

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

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename Int>
bool parse_uint(std::string_view s, Int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

struct Header {
  std::optional<std::size_t> dim;
  std::optional<std::size_t> label_count;
};

// Reads `D=<n>` / `L=<n>` directives out of a comment body. Returns false
// when the comment holds no directive at all.
bool read_header_directives(std::string_view comment, Header& header, std::size_t line_no) {
  bool found = false;
  for (auto token : split_ws(comment)) {
    while (!token.empty() && token.front() == '#') token.remove_prefix(1);
    if (token.size() < 3 || token[1] != '=' || (token[0] != 'D' && token[0] != 'L')) continue;
    std::size_t value = 0;
    if (!parse_uint(token.substr(2), value))
      throw ParseError(fmt::format("bad header directive '{}'", token), line_no);
    (token[0] == 'D' ? header.dim : header.label_count) = value;
    found = true;
  }
  return found;
}

std::size_t resolve_dimension(const char* what, std::optional<std::size_t> from_header,
                              std::optional<std::size_t> from_options, std::size_t inferred) {
  if (from_header && from_options && *from_header != *from_options)
    throw DimensionError(fmt::format("file declares {} = {} but {} was expected", what, *from_header, *from_options));
  if (from_header) return *from_header;
  if (from_options) return *from_options;
  return inferred;
}

struct RawInstance {
  std::vector<LabelId> labels;
  std::vector<SparseEntry> features;
  std::size_t line;
};

Dataset parse_svmlight(std::istream& in, const ParseOptions& options) {
  Header header;
  std::vector<RawInstance> raw;
  std::size_t max_feature_plus_one = 0;
  std::size_t max_label_plus_one = 0;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    const auto hash = view.find('#');
    if (hash != std::string_view::npos) {
      const bool directive = read_header_directives(view.substr(hash), header, line_no);
      if (directive && !raw.empty()) throw ParseError("header directive after the first instance", line_no);
      view = view.substr(0, hash);
    }
    const auto tokens = split_ws(view);
    if (tokens.empty()) continue;

    RawInstance inst{{}, {}, line_no};
    std::size_t first_feature = 0;
    if (tokens[0] == "-") {
      first_feature = 1;
    } else if (tokens[0].find(':') == std::string_view::npos) {
      first_feature = 1;
      for (auto piece : split_on(tokens[0], ',')) {
        LabelId id = 0;
        if (!parse_uint(piece, id)) throw ParseError(fmt::format("bad label id '{}'", piece), line_no);
        inst.labels.push_back(id);
        max_label_plus_one = std::max<std::size_t>(max_label_plus_one, std::size_t{id} + 1);
      }
    }
    for (std::size_t t = first_feature; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      FeatureId index = 0;
      double value = 0.0;
      if (colon == std::string_view::npos || !parse_uint(tokens[t].substr(0, colon), index) ||
          !parse_real(tokens[t].substr(colon + 1), value))
        throw ParseError(fmt::format("bad feature token '{}'", tokens[t]), line_no);
      inst.features.push_back({index, value});
      max_feature_plus_one = std::max<std::size_t>(max_feature_plus_one, std::size_t{index} + 1);
    }
    raw.push_back(std::move(inst));
  }
  if (raw.empty()) throw ParseError("file contains no instances", 0);

  const std::size_t dim = resolve_dimension("D", header.dim, options.dim, max_feature_plus_one);
  const std::size_t labels = resolve_dimension("L", header.label_count, options.label_count, max_label_plus_one);

  std::vector<Instance> instances;
  instances.reserve(raw.size());
  for (auto& r : raw) {
    for (LabelId id : r.labels)
      if (id >= labels) throw ParseError(fmt::format("label id {} >= L = {}", id, labels), r.line);
    for (const auto& e : r.features)
      if (e.index >= dim) throw ParseError(fmt::format("feature index {} >= D = {}", e.index, dim), r.line);
    try {
      instances.push_back({SparseVector::from_unsorted(dim, std::move(r.features)),
                           LabelSet(labels, std::move(r.labels))});
    } catch (const DimensionError& e) {
      throw ParseError(e.what(), r.line);
    }
  }
  return Dataset(dim, labels, std::move(instances));
}

Dataset parse_dense_csv(std::istream& in, const ParseOptions& options) {
  Header header;
  std::vector<std::pair<std::vector<double>, std::size_t>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    const auto hash = view.find('#');
    if (hash != std::string_view::npos) {
      const bool directive = read_header_directives(view.substr(hash), header, line_no);
      if (directive && !rows.empty()) throw ParseError("header directive after the first instance", line_no);
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    std::vector<double> values;
    for (auto cell : split_on(view, ',')) {
      double v = 0.0;
      if (!parse_real(trim(cell), v)) throw ParseError(fmt::format("bad numeric cell '{}'", trim(cell)), line_no);
      values.push_back(v);
    }
    if (!rows.empty() && values.size() != rows.front().first.size())
      throw ParseError(fmt::format("row has {} columns, expected {}", values.size(), rows.front().first.size()),
                       line_no);
    rows.emplace_back(std::move(values), line_no);
  }
  if (rows.empty()) throw ParseError("file contains no instances", 0);

  if (!header.label_count && !options.label_count)
    throw ParseError("dense-csv needs the label count from a #L= header or the caller", 0);
  const std::size_t labels = resolve_dimension("L", header.label_count, options.label_count, 0);
  const std::size_t columns = rows.front().first.size();
  if (columns < labels) throw ParseError(fmt::format("{} columns cannot hold {} targets", columns, labels), 0);
  const std::size_t dim = resolve_dimension("D", header.dim, options.dim, columns - labels);
  if (dim != columns - labels)
    throw DimensionError(fmt::format("dense-csv rows carry {} features but D = {}", columns - labels, dim));

  std::vector<Instance> instances;
  instances.reserve(rows.size());
  for (const auto& [values, row_line] : rows) {
    std::vector<LabelId> relevant;
    for (std::size_t l = 0; l < labels; ++l) {
      if (values[l] == 1.0) {
        relevant.push_back(static_cast<LabelId>(l));
      } else if (values[l] != 0.0) {
        throw ParseError(fmt::format("target column {} must be 0 or 1", l), row_line);
      }
    }
    std::vector<SparseEntry> entries;
    for (std::size_t j = 0; j < dim; ++j)
      if (values[labels + j] != 0.0) entries.push_back({static_cast<FeatureId>(j), values[labels + j]});
    instances.push_back({SparseVector(dim, std::move(entries)), LabelSet(labels, std::move(relevant))});
  }
  return Dataset(dim, labels, std::move(instances));
}

}  // namespace

FileFormat parse_file_format(std::string_view name) {
  if (name == "svmlight-multilabel" || name == "svmlight") return FileFormat::svmlight_multilabel;
  if (name == "dense-csv" || name == "csv") return FileFormat::dense_csv;
  throw ConfigError(fmt::format("unknown file format '{}'", name));
}

std::string_view to_string(FileFormat format) {
  return format == FileFormat::svmlight_multilabel ? "svmlight-multilabel" : "dense-csv";
}

Dataset parse_multilabel(std::istream& in, FileFormat format, const ParseOptions& options) {
  return format == FileFormat::svmlight_multilabel ? parse_svmlight(in, options) : parse_dense_csv(in, options);
}

Dataset parse_multilabel_file(const std::filesystem::path& path, FileFormat format, const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  return parse_multilabel(in, format, options);
}

void write_svmlight(std::ostream& out, const Dataset& dataset) {
  out << fmt::format("#D={} #L={}\n", dataset.dim(), dataset.label_count());
  std::string line;
  for (const auto& inst : dataset) {
    line.clear();
    const auto labels = inst.labels.relevant();
    for (std::size_t k = 0; k < labels.size(); ++k) {
      if (k > 0) line += ',';
      fmt::format_to(std::back_inserter(line), "{}", labels[k]);
    }
    if (labels.empty() && inst.features.empty()) line += '-';
    for (const auto& e : inst.features.entries()) {
      if (!line.empty()) line += ' ';
      fmt::format_to(std::back_inserter(line), "{}:{}", e.index, e.value);
    }
    line += '\n';
    out << line;
  }
}

void write_svmlight_file(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  write_svmlight(out, dataset);
}

std::vector<std::string> read_label_names(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) names.emplace_back(trim(line));
  while (!names.empty() && names.back().empty()) names.pop_back();
  return names;
}

void write_label_names(const std::filesystem::path& path, const std::vector<std::string>& names) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  for (const auto& n : names) out << n << '\n';
}

}  // namespace mlnn
