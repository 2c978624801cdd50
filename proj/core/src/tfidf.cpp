#include "mlnn/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "mlnn/errors.hpp"

namespace mlnn {

double VectorizerModel::idf(FeatureId id) const {
  const auto n = static_cast<double>(corpus_size);
  const auto df = static_cast<double>(doc_freq.at(id));
  return std::log((1.0 + n) / (1.0 + df)) + 1.0;
}

VectorizerModel fit_tfidf(std::span<const TokenList> docs, std::optional<std::size_t> max_features) {
  if (docs.empty()) throw ConfigError("fit_tfidf needs at least one document");

  struct Stats {
    std::size_t term_count = 0;
    std::size_t doc_freq = 0;
    std::size_t last_doc = ~std::size_t{0};
  };
  std::map<std::string, Stats> stats;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& token : docs[d]) {
      auto& s = stats[token];
      ++s.term_count;
      if (s.last_doc != d) {
        s.last_doc = d;
        ++s.doc_freq;
      }
    }
  }

  std::vector<std::map<std::string, Stats>::const_iterator> kept;
  kept.reserve(stats.size());
  for (auto it = stats.cbegin(); it != stats.cend(); ++it) kept.push_back(it);
  if (max_features && *max_features < kept.size()) {
    std::stable_sort(kept.begin(), kept.end(),
                     [](const auto& a, const auto& b) { return a->second.term_count > b->second.term_count; });
    kept.resize(*max_features);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a->first < b->first; });
  }

  VectorizerModel model;
  model.corpus_size = docs.size();
  for (const auto& it : kept) {
    const auto id = static_cast<FeatureId>(model.tokens.size());
    model.tokens.push_back(it->first);
    model.vocabulary.emplace(it->first, id);
    model.doc_freq.push_back(it->second.doc_freq);
  }
  return model;
}

SparseVector transform_tfidf(const VectorizerModel& model, const TokenList& doc) {
  std::map<FeatureId, double> tf;
  for (const auto& token : doc) {
    auto it = model.vocabulary.find(token);
    if (it != model.vocabulary.end()) tf[it->second] += 1.0;
  }
  std::vector<SparseEntry> entries;
  entries.reserve(tf.size());
  double sq = 0.0;
  for (const auto& [id, count] : tf) {
    const double w = count * model.idf(id);
    entries.push_back({id, w});
    sq += w * w;
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (auto& e : entries) e.value *= inv;
  }
  return SparseVector(model.dim(), std::move(entries));
}

void save_vectorizer(const std::filesystem::path& path, const VectorizerModel& model) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << "#N=" << model.corpus_size << '\n';
  for (std::size_t i = 0; i < model.tokens.size(); ++i) out << model.tokens[i] << '\t' << model.doc_freq[i] << '\n';
}

VectorizerModel load_vectorizer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  VectorizerModel model;
  std::string line;
  std::size_t line_no = 0;
  bool have_n = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("#N=", 0) == 0) {
      model.corpus_size = std::stoull(line.substr(3));
      have_n = true;
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected 'token<TAB>df'", line_no);
    const std::string token = line.substr(0, tab);
    const std::size_t df = std::stoull(line.substr(tab + 1));
    if (df == 0) throw ParseError("document frequency must be >= 1", line_no);
    if (!model.vocabulary.emplace(token, static_cast<FeatureId>(model.tokens.size())).second)
      throw ParseError(fmt::format("duplicate token '{}'", token), line_no);
    model.tokens.push_back(token);
    model.doc_freq.push_back(df);
  }
  if (!have_n) throw ParseError("missing #N= line", 0);
  return model;
}

}  // namespace mlnn
