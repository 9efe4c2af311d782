#ifndef MSR_TEXTSTATS_HPP
#define MSR_TEXTSTATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "msr/common.hpp"

namespace msr {

struct TokenConfig {
  bool lowercase = true;
  std::set<std::string> stopwords;
  size_t min_token_len = 2;
};

/// Splits on non-alphanumeric runs, lowercases, drops short tokens and
/// stopwords; keeps order.
inline std::vector<std::string> tokenize(const std::string& message,
                                         const TokenConfig& cfg = {}) {
  std::vector<std::string> out;
  std::string token;
  auto flush = [&] {
    if (token.size() >= cfg.min_token_len && !cfg.stopwords.count(token))
      out.push_back(token);
    token.clear();
  };
  for (char ch : message) {
    if (is_ascii_alnum(ch)) {
      token += cfg.lowercase
                   ? static_cast<char>(std::tolower(static_cast<unsigned char>(ch)))
                   : ch;
    } else {
      flush();
    }
  }
  flush();
  return out;
}

/// tf is the raw in-document count; idf = ln((1+N)/(1+df)) + 1; the
/// weight is their plain product, no further normalization.
struct TermWeights {
  std::vector<std::string> terms;  // sorted vocabulary
  std::vector<std::int64_t> doc_freq;
  std::vector<double> idf;
  std::vector<std::string> doc_ids;
  // per document: (term index, tf*idf), sorted by term index
  std::vector<std::vector<std::pair<std::int32_t, double>>> doc_weights;
};

inline TermWeights compute_tfidf(const std::vector<std::vector<std::string>>& docs,
                                 std::vector<std::string> doc_ids = {}) {
  if (doc_ids.empty())
    for (size_t i = 0; i < docs.size(); ++i) doc_ids.push_back(std::to_string(i));
  if (doc_ids.size() != docs.size())
    throw Error(Errc::out_of_range, "doc id count != document count");

  std::set<std::string> vocab_set;
  for (const auto& d : docs)
    for (const auto& t : d) vocab_set.insert(t);
  if (vocab_set.empty()) throw Error(Errc::empty_corpus, "no non-empty document");

  TermWeights w;
  w.terms.assign(vocab_set.begin(), vocab_set.end());
  w.doc_ids = std::move(doc_ids);
  std::map<std::string, std::int32_t> term_index;
  for (size_t i = 0; i < w.terms.size(); ++i)
    term_index[w.terms[i]] = static_cast<std::int32_t>(i);

  w.doc_freq.assign(w.terms.size(), 0);
  std::vector<std::map<std::int32_t, std::int64_t>> tf(docs.size());
  for (size_t d = 0; d < docs.size(); ++d) {
    for (const auto& t : docs[d]) tf[d][term_index[t]] += 1;
    for (const auto& [idx, _] : tf[d]) w.doc_freq[static_cast<size_t>(idx)] += 1;
  }

  const double n_docs = static_cast<double>(docs.size());
  w.idf.resize(w.terms.size());
  for (size_t i = 0; i < w.terms.size(); ++i)
    w.idf[i] = std::log((1.0 + n_docs) /
                        (1.0 + static_cast<double>(w.doc_freq[i]))) + 1.0;

  w.doc_weights.resize(docs.size());
  for (size_t d = 0; d < docs.size(); ++d) {
    for (const auto& [idx, count] : tf[d])
      w.doc_weights[d].emplace_back(
          idx, static_cast<double>(count) * w.idf[static_cast<size_t>(idx)]);
  }
  return w;
}

/// Terms ranked by summed weight over the selected documents,
/// descending, ties broken lexicographically; at most k entries.
inline std::vector<std::pair<std::string, double>> top_terms(
    const TermWeights& w, const std::set<std::string>& doc_subset, size_t k) {
  if (k < 1) throw Error(Errc::out_of_range, "k must be >= 1");
  std::map<std::string, size_t> doc_index;
  for (size_t i = 0; i < w.doc_ids.size(); ++i) doc_index[w.doc_ids[i]] = i;

  std::vector<double> sums(w.terms.size(), 0.0);
  for (const auto& id : doc_subset) {
    auto it = doc_index.find(id);
    if (it == doc_index.end()) throw Error(Errc::unknown_document, id);
    for (const auto& [idx, weight] : w.doc_weights[it->second])
      sums[static_cast<size_t>(idx)] += weight;
  }

  std::vector<size_t> order(w.terms.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (sums[a] != sums[b]) return sums[a] > sums[b];
    return w.terms[a] < w.terms[b];
  });

  std::vector<std::pair<std::string, double>> out;
  for (size_t i = 0; i < order.size() && i < k; ++i)
    out.emplace_back(w.terms[order[i]], sums[order[i]]);
  return out;
}

}  // namespace msr

#endif  // MSR_TEXTSTATS_HPP
