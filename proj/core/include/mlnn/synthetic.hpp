#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "mlnn/dataset.hpp"

namespace mlnn::synthetic {

/// Two real features, three labels, each label a half-plane test with a
/// margin: l0: x0 > 0, l1: x1 > 0, l2: x0 + x1 > 0.
Dataset separable_2d(std::size_t instances, std::uint64_t seed, double margin = 0.1);

/// Bag-of-words documents over a vocabulary of "w<i>" tokens. Every label owns
/// `signature_words` tokens; a document draws 1..max_labels labels from a
/// Zipf-like prior, then `doc_length` tokens, each a signature word of one of
/// its labels with probability `signal_fraction` and uniform noise otherwise.
/// Each label of each document is then flipped with probability `label_noise`.
struct TopicCorpusSpec {
  std::size_t vocabulary = 1000;
  std::size_t labels = 10;
  std::size_t signature_words = 6;
  std::size_t doc_length = 30;
  std::size_t max_labels = 3;
  double signal_fraction = 0.3;
  double label_noise = 0.05;
  std::uint64_t seed = 1;
};

/// Generates train and test documents from one source, fits tf-idf on the
/// training part only and returns the two vectorised datasets.
std::pair<Dataset, Dataset> topic_corpus(const TopicCorpusSpec& spec, std::size_t train_size, std::size_t test_size);

}  // namespace mlnn::synthetic
