#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlnn/dataset.hpp"

namespace mlnn {

using TokenList = std::vector<std::string>;

/// Fitted tf-idf vocabulary. Feature ids follow lexicographic token order.
///
/// Weight of token t in document d:
///     tf(t, d) * (ln((1 + N) / (1 + df(t))) + 1)
/// with tf the raw count and N the number of documents seen at fit time;
/// the vector is then scaled to unit Euclidean norm.
struct VectorizerModel {
  std::vector<std::string> tokens;           // feature id -> token
  std::unordered_map<std::string, FeatureId> vocabulary;
  std::vector<std::size_t> doc_freq;         // per feature, >= 1
  std::size_t corpus_size = 0;

  std::size_t dim() const noexcept { return tokens.size(); }
  double idf(FeatureId id) const;
};

/// Keeps the `max_features` tokens with the highest corpus term count (ties by
/// token order); nullopt keeps all. Throws ConfigError on an empty corpus.
VectorizerModel fit_tfidf(std::span<const TokenList> docs, std::optional<std::size_t> max_features = std::nullopt);

/// Out-of-vocabulary tokens are dropped; a document with none left maps to the empty vector.
SparseVector transform_tfidf(const VectorizerModel& model, const TokenList& doc);

/// Text form: a `#N=<corpus_size>` line, then `token<TAB>df` per feature in id order.
void save_vectorizer(const std::filesystem::path& path, const VectorizerModel& model);
VectorizerModel load_vectorizer(const std::filesystem::path& path);

}  // namespace mlnn
