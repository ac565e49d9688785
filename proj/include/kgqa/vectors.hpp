#ifndef KGQA_VECTORS_HPP
#define KGQA_VECTORS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace kgqa {

/// Pretrained word vectors keyed by normalized token.
struct EmbeddingTable {
  int dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  /// Vector for a normalized token, or nullptr when absent.
  const std::vector<double>* find(const std::string& normalized_token) const;
};

/// Document frequencies of a fitted corpus.
struct TfIdfModel {
  std::int64_t doc_count = 0;
  std::unordered_map<std::string, std::int64_t> df;
  std::map<std::string, int> vocab;  // term -> index, assigned in sorted term order

  /// Smoothed inverse document frequency: ln((1+N)/(1+df)) + 1. Unseen terms
  /// use df = 0.
  double idf(const std::string& term) const;
};

/// TF-IDF weights keyed by normalized term. Entries are never zero.
struct SparseVector {
  std::map<std::string, double> entries;

  bool empty() const { return entries.empty(); }
};

/// Parses the embeddings format: header "<count> <dim>", then one
/// "<token> <c1> ... <c_dim>" row per line. Tokens are stored normalized and
/// a later duplicate overwrites the earlier entry. The header count is
/// advisory. Throws DimensionMismatch / ParseFailure.
EmbeddingTable load_embeddings(std::istream& in);

/// a.b / (|a||b|); 0 when either norm is 0. Throws LengthMismatch.
double cosine(const std::vector<double>& a, const std::vector<double>& b);

/// Sparse counterpart; both vectors must come from the same model.
double cosine(const SparseVector& a, const SparseVector& b);

/// Document frequencies over normalized terms. Throws EmptyCorpus.
TfIdfModel fit_tfidf(const std::vector<std::vector<std::string>>& corpus);

/// Raw term frequency times smoothed idf, L2-normalized. Empty token list
/// yields an empty vector. Unseen terms are weighted with df = 0.
SparseVector tfidf_vector(const TfIdfModel& m, const std::vector<std::string>& tokens);

/// TF-IDF-weighted mean of the embeddings of in-vocabulary tokens. Returns
/// the zero vector when every token is out of vocabulary or the list is
/// empty.
std::vector<double> question_embedding(const TfIdfModel& m, const EmbeddingTable& tbl,
                                       const std::vector<std::string>& tokens);

}  // namespace kgqa

#endif  // KGQA_VECTORS_HPP
