#include "mlnn/dataset.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mlnn/errors.hpp"
#include "mlnn/random.hpp"

namespace mlnn {

SparseVector::SparseVector(std::size_t dim, std::vector<SparseEntry> entries)
    : dim_(dim), entries_(std::move(entries)) {
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const auto& e = entries_[k];
    if (e.index >= dim_)
      throw DimensionError(fmt::format("feature index {} out of range for dimension {}", e.index, dim_));
    if (k > 0 && entries_[k - 1].index >= e.index)
      throw DimensionError("sparse indices must be strictly increasing");
    if (e.value == 0.0) throw DimensionError("sparse vector stores an explicit zero");
    if (!std::isfinite(e.value)) throw DimensionError("sparse vector value is not finite");
  }
}

SparseVector SparseVector::from_unsorted(std::size_t dim, std::vector<SparseEntry> entries) {
  std::erase_if(entries, [](const SparseEntry& e) { return e.value == 0.0; });
  std::sort(entries.begin(), entries.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  auto dup = std::adjacent_find(entries.begin(), entries.end(),
                                [](const SparseEntry& a, const SparseEntry& b) { return a.index == b.index; });
  if (dup != entries.end()) throw DimensionError(fmt::format("duplicate feature index {}", dup->index));
  return SparseVector(dim, std::move(entries));
}

double SparseVector::dot(std::span<const double> dense) const {
  if (dense.size() != dim_) throw DimensionError("dot: dimension mismatch");
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.value * dense[e.index];
  return sum;
}

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.value * e.value;
  return sum;
}

SparseVector SparseVector::widened(std::size_t new_dim) const {
  if (new_dim < dim_) throw DimensionError("cannot shrink a sparse vector");
  SparseVector out = *this;
  out.dim_ = new_dim;
  return out;
}

LabelSet::LabelSet(std::size_t label_count, std::vector<LabelId> relevant)
    : label_count_(label_count), relevant_(std::move(relevant)) {
  std::sort(relevant_.begin(), relevant_.end());
  relevant_.erase(std::unique(relevant_.begin(), relevant_.end()), relevant_.end());
  if (!relevant_.empty() && relevant_.back() >= label_count_)
    throw DimensionError(fmt::format("label id {} out of range for {} labels", relevant_.back(), label_count_));
}

bool LabelSet::contains(LabelId l) const { return std::binary_search(relevant_.begin(), relevant_.end(), l); }

std::vector<LabelId> LabelSet::irrelevant() const {
  std::vector<LabelId> out;
  out.reserve(irrelevant_size());
  auto it = relevant_.begin();
  for (LabelId l = 0; l < label_count_; ++l) {
    if (it != relevant_.end() && *it == l) {
      ++it;
    } else {
      out.push_back(l);
    }
  }
  return out;
}

std::vector<double> LabelSet::indicator() const {
  std::vector<double> out(label_count_, 0.0);
  for (LabelId l : relevant_) out[l] = 1.0;
  return out;
}

LabelSet LabelSet::widened(std::size_t new_label_count) const {
  if (new_label_count < label_count_) throw DimensionError("cannot shrink a label set");
  LabelSet out = *this;
  out.label_count_ = new_label_count;
  return out;
}

Dataset::Dataset(std::size_t dim, std::size_t label_count, std::vector<Instance> instances)
    : dim_(dim), label_count_(label_count), instances_(std::move(instances)) {
  if (instances_.empty()) throw DimensionError("dataset must contain at least one instance");
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    const auto& inst = instances_[i];
    if (inst.features.dim() != dim_ || inst.labels.label_count() != label_count_)
      throw DimensionError(fmt::format("instance {} has shape ({}, {}), dataset expects ({}, {})", i,
                                       inst.features.dim(), inst.labels.label_count(), dim_, label_count_));
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<Instance> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(instances_.at(i));
  return Dataset(dim_, label_count_, std::move(out));
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ConfigError(fmt::format("split fraction {} must lie in (0, 1)", fraction));
  const std::size_t m = dataset.size();
  if (m < 2) throw ConfigError("split needs at least two instances");

  std::vector<std::size_t> perm(m);
  for (std::size_t i = 0; i < m; ++i) perm[i] = i;
  Rng rng(derive_seed(seed, 0x5b117));
  for (std::size_t i = m - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);

  auto first_size = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(m)));
  first_size = std::clamp<std::size_t>(first_size, 1, m - 1);

  std::vector<std::size_t> first(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(first_size));
  std::vector<std::size_t> second(perm.begin() + static_cast<std::ptrdiff_t>(first_size), perm.end());
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  return {dataset.subset(first), dataset.subset(second)};
}

}  // namespace mlnn
