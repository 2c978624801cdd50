#include "mlnn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "mlnn/errors.hpp"
#include "mlnn/random.hpp"
#include "mlnn/tfidf.hpp"

namespace mlnn::synthetic {

Dataset separable_2d(std::size_t instances, std::uint64_t seed, double margin) {
  Rng rng(derive_seed(seed, 0x2d));
  std::vector<Instance> out;
  out.reserve(instances);
  while (out.size() < instances) {
    const double x0 = rng.uniform(-1.0, 1.0);
    const double x1 = rng.uniform(-1.0, 1.0);
    if (std::abs(x0) < margin || std::abs(x1) < margin || std::abs(x0 + x1) < margin) continue;
    std::vector<LabelId> relevant;
    if (x0 > 0) relevant.push_back(0);
    if (x1 > 0) relevant.push_back(1);
    if (x0 + x1 > 0) relevant.push_back(2);
    out.push_back({SparseVector(2, {{0, x0}, {1, x1}}), LabelSet(3, std::move(relevant))});
  }
  return Dataset(2, 3, std::move(out));
}

namespace {

struct Document {
  TokenList tokens;
  std::vector<LabelId> labels;
};

Document draw_document(const TopicCorpusSpec& spec, const std::vector<double>& prior_cdf, Rng& rng) {
  Document doc;
  const std::size_t count = 1 + rng.index(spec.max_labels);
  while (doc.labels.size() < count) {
    const double u = rng.uniform01();
    const auto l = static_cast<LabelId>(std::lower_bound(prior_cdf.begin(), prior_cdf.end(), u) - prior_cdf.begin());
    const LabelId label = std::min<LabelId>(l, static_cast<LabelId>(spec.labels - 1));
    if (std::find(doc.labels.begin(), doc.labels.end(), label) == doc.labels.end()) doc.labels.push_back(label);
  }
  for (std::size_t t = 0; t < spec.doc_length; ++t) {
    std::size_t word;
    if (rng.bernoulli(spec.signal_fraction)) {
      const LabelId label = doc.labels[rng.index(doc.labels.size())];
      word = label * spec.signature_words + rng.index(spec.signature_words);
    } else {
      word = rng.index(spec.vocabulary);
    }
    doc.tokens.push_back("w" + std::to_string(word));
  }
  std::vector<LabelId> noisy;
  for (LabelId l = 0; l < spec.labels; ++l) {
    const bool relevant = std::find(doc.labels.begin(), doc.labels.end(), l) != doc.labels.end();
    if (relevant != rng.bernoulli(spec.label_noise)) noisy.push_back(l);
  }
  doc.labels = std::move(noisy);
  return doc;
}

}  // namespace

std::pair<Dataset, Dataset> topic_corpus(const TopicCorpusSpec& spec, std::size_t train_size, std::size_t test_size) {
  if (spec.labels == 0 || spec.max_labels == 0 || spec.labels * spec.signature_words > spec.vocabulary)
    throw ConfigError("topic corpus: inconsistent spec");
  std::vector<double> prior_cdf(spec.labels);
  double total = 0.0;
  for (std::size_t l = 0; l < spec.labels; ++l) total += 1.0 / static_cast<double>(l + 1);
  double acc = 0.0;
  for (std::size_t l = 0; l < spec.labels; ++l) {
    acc += 1.0 / static_cast<double>(l + 1) / total;
    prior_cdf[l] = acc;
  }

  Rng rng(derive_seed(spec.seed, 0x70f1c));
  std::vector<Document> docs;
  docs.reserve(train_size + test_size);
  for (std::size_t i = 0; i < train_size + test_size; ++i) docs.push_back(draw_document(spec, prior_cdf, rng));

  std::vector<TokenList> train_tokens;
  train_tokens.reserve(train_size);
  for (std::size_t i = 0; i < train_size; ++i) train_tokens.push_back(docs[i].tokens);
  const VectorizerModel vectorizer = fit_tfidf(train_tokens);

  auto build = [&](std::size_t from, std::size_t to) {
    std::vector<Instance> out;
    out.reserve(to - from);
    for (std::size_t i = from; i < to; ++i)
      out.push_back({transform_tfidf(vectorizer, docs[i].tokens), LabelSet(spec.labels, docs[i].labels)});
    return Dataset(vectorizer.dim(), spec.labels, std::move(out));
  };
  return {build(0, train_size), build(train_size, train_size + test_size)};
}

}  // namespace mlnn::synthetic
