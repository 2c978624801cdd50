#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace mlnn {

using FeatureId = std::uint32_t;
using LabelId = std::uint32_t;

struct SparseEntry {
  FeatureId index;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sparse feature vector: indices strictly increasing, all < dim, no stored zeros.
class SparseVector {
 public:
  SparseVector() = default;
  explicit SparseVector(std::size_t dim) : dim_(dim) {}
  /// Validates the invariants; throws DimensionError on violation.
  SparseVector(std::size_t dim, std::vector<SparseEntry> entries);

  /// Builds from unsorted (index, value) pairs; zero values are dropped, duplicates rejected.
  static SparseVector from_unsorted(std::size_t dim, std::vector<SparseEntry> entries);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::span<const SparseEntry> entries() const noexcept { return entries_; }

  double dot(std::span<const double> dense) const;
  double squared_norm() const;

  /// Same entries, larger ambient dimension.
  SparseVector widened(std::size_t new_dim) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<SparseEntry> entries_;
};

/// Relevant labels of one instance; the irrelevant set is the complement in [0, label_count).
class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(std::size_t label_count) : label_count_(label_count) {}
  /// Sorts and deduplicates `relevant`; throws DimensionError if any id >= label_count.
  LabelSet(std::size_t label_count, std::vector<LabelId> relevant);

  std::size_t label_count() const noexcept { return label_count_; }
  std::span<const LabelId> relevant() const noexcept { return relevant_; }
  std::size_t size() const noexcept { return relevant_.size(); }
  std::size_t irrelevant_size() const noexcept { return label_count_ - relevant_.size(); }
  bool contains(LabelId l) const;
  std::vector<LabelId> irrelevant() const;
  /// 0/1 indicator vector of length label_count.
  std::vector<double> indicator() const;
  /// Both sides nonempty, so pairwise normalizers are defined.
  bool has_pairs() const noexcept { return !relevant_.empty() && relevant_.size() < label_count_; }

  LabelSet widened(std::size_t new_label_count) const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::size_t label_count_ = 0;
  std::vector<LabelId> relevant_;
};

struct Instance {
  SparseVector features;
  LabelSet labels;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Immutable corpus. Every instance shares dim and label_count; at least one instance.
class Dataset {
 public:
  Dataset(std::size_t dim, std::size_t label_count, std::vector<Instance> instances);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t label_count() const noexcept { return label_count_; }
  std::size_t size() const noexcept { return instances_.size(); }
  const Instance& operator[](std::size_t i) const { return instances_[i]; }
  std::span<const Instance> instances() const noexcept { return instances_; }

  auto begin() const noexcept { return instances_.begin(); }
  auto end() const noexcept { return instances_.end(); }

  /// Subset in the given index order.
  Dataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t dim_;
  std::size_t label_count_;
  std::vector<Instance> instances_;
};

/// Random partition into (first, second) with round(fraction * M) instances in
/// `first` (clamped so both parts are nonempty). Each part keeps the original
/// relative order. The permutation depends on input order, so reordering the
/// input with the same seed may select different instances.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double fraction, std::uint64_t seed);

}  // namespace mlnn
