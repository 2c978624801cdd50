#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlnn/dataset.hpp"

namespace mlnn {

enum class FileFormat { svmlight_multilabel, dense_csv };

FileFormat parse_file_format(std::string_view name);
std::string_view to_string(FileFormat format);

/// Dimensions that apply when the file carries no `#D=`/`#L=` header.
/// A header that disagrees with a value given here is a DimensionError.
struct ParseOptions {
  std::optional<std::size_t> dim;
  std::optional<std::size_t> label_count;
};

/// svmlight-multilabel:
///
///     #D=<dim> #L=<labels>
///     <label>[,<label>...] <idx>:<val> ...
///
/// Labels and feature indices are 0-based. `#` starts a comment, blank lines
/// are skipped. A line whose first token holds a ':' has no labels; a lone `-`
/// in the label position is an explicit empty label set (lets an instance with
/// neither labels nor features survive a round trip). Without a header (or
/// options) the dimensions are inferred as max id + 1.
///
/// dense-csv: one row per instance, the first L columns are 0/1 targets and the
/// rest are feature values. L comes from a `#L=` header line or the options.
Dataset parse_multilabel(std::istream& in, FileFormat format, const ParseOptions& options = {});
Dataset parse_multilabel_file(const std::filesystem::path& path, FileFormat format,
                              const ParseOptions& options = {});

/// Writes a header line and one line per instance; values use shortest
/// round-trip formatting, so parse(write(d)) == d.
void write_svmlight(std::ostream& out, const Dataset& dataset);
void write_svmlight_file(const std::filesystem::path& path, const Dataset& dataset);

/// Label-name sidecar: one name per line, the line index is the label id.
std::vector<std::string> read_label_names(const std::filesystem::path& path);
void write_label_names(const std::filesystem::path& path, const std::vector<std::string>& names);

}  // namespace mlnn
