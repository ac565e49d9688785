#include "kgqa/vectors.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <set>
#include <sstream>

#include "kgqa/errors.hpp"
#include "kgqa/text.hpp"

namespace kgqa {
namespace {

double parse_double(const std::string& field, std::size_t line_no) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ParseFailure("line " + std::to_string(line_no) + ": bad float '" + field + "'");
  }
  return value;
}

std::vector<std::string> split_on_spaces(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string f;
  while (ss >> f) fields.push_back(std::move(f));
  return fields;
}

}  // namespace

const std::vector<double>* EmbeddingTable::find(const std::string& normalized_token) const {
  const auto it = vectors.find(normalized_token);
  return it == vectors.end() ? nullptr : &it->second;
}

double TfIdfModel::idf(const std::string& term) const {
  const auto it = df.find(term);
  const std::int64_t n = it == df.end() ? 0 : it->second;
  return std::log(static_cast<double>(1 + doc_count) / static_cast<double>(1 + n)) + 1.0;
}

EmbeddingTable load_embeddings(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseFailure("empty embeddings stream");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_on_spaces(line);
  if (header.size() != 2) throw ParseFailure("header must be '<count> <dim>'");
  {
    // advisory (dedup can shrink the table), but it still has to be a number
    const std::string& f = header[0];
    std::int64_t declared = 0;
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), declared);
    if (ec != std::errc{} || ptr != f.data() + f.size() || declared < 0) {
      throw ParseFailure("bad vector count '" + f + "'");
    }
  }
  int dim = 0;
  {
    const std::string& f = header[1];
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), dim);
    if (ec != std::errc{} || ptr != f.data() + f.size() || dim <= 0) {
      throw ParseFailure("bad dimension '" + f + "'");
    }
  }

  EmbeddingTable table;
  table.dim = dim;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_on_spaces(line);
    if (fields.size() != static_cast<std::size_t>(dim) + 1) {
      throw DimensionMismatch("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(dim) + " components, got " +
                              std::to_string(fields.size() - 1));
    }
    std::vector<double> v(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
      v[static_cast<std::size_t>(i)] = parse_double(fields[static_cast<std::size_t>(i) + 1], line_no);
    }
    table.vectors[normalize(fields[0])] = std::move(v);
  }
  if (in.bad()) throw IoFailure("stream error while loading embeddings");
  return table;
}

namespace {

// dot / (|a||b|), with the Cauchy-Schwarz equality case (parallel vectors)
// answered exactly so self-similarity is 1.0, not 1.0 - epsilon.
double cosine_of(double dot, double na, double nb) {
  if (na == 0.0 || nb == 0.0) return 0.0;
  if (dot * dot == na * nb) return dot > 0.0 ? 1.0 : -1.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw LengthMismatch("cosine over lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return cosine_of(dot, na, nb);
}

double cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, w] : a.entries) na += w * w;
  for (const auto& [t, w] : b.entries) nb += w * w;
  const SparseVector& small = a.entries.size() <= b.entries.size() ? a : b;
  const SparseVector& large = a.entries.size() <= b.entries.size() ? b : a;
  for (const auto& [t, w] : small.entries) {
    const auto it = large.entries.find(t);
    if (it != large.entries.end()) dot += w * it->second;
  }
  return cosine_of(dot, na, nb);
}

TfIdfModel fit_tfidf(const std::vector<std::vector<std::string>>& corpus) {
  if (corpus.empty()) throw EmptyCorpus("tf-idf fit over an empty corpus");
  TfIdfModel m;
  m.doc_count = static_cast<std::int64_t>(corpus.size());
  for (const auto& doc : corpus) {
    std::set<std::string> seen;
    for (const std::string& t : doc) seen.insert(normalize(t));
    for (const std::string& t : seen) ++m.df[t];
  }
  int index = 0;
  std::set<std::string> terms;
  for (const auto& [t, n] : m.df) terms.insert(t);
  for (const std::string& t : terms) m.vocab.emplace(t, index++);
  return m;
}

SparseVector tfidf_vector(const TfIdfModel& m, const std::vector<std::string>& tokens) {
  SparseVector v;
  std::map<std::string, std::int64_t> tf;
  for (const std::string& t : tokens) ++tf[normalize(t)];
  double norm_sq = 0.0;
  for (const auto& [t, n] : tf) {
    const double w = static_cast<double>(n) * m.idf(t);
    if (w != 0.0) {
      v.entries.emplace(t, w);
      norm_sq += w * w;
    }
  }
  if (norm_sq > 0.0) {
    const double norm = std::sqrt(norm_sq);
    for (auto& [t, w] : v.entries) w /= norm;
  }
  return v;
}

std::vector<double> question_embedding(const TfIdfModel& m, const EmbeddingTable& tbl,
                                       const std::vector<std::string>& tokens) {
  std::vector<double> acc(static_cast<std::size_t>(tbl.dim), 0.0);
  const SparseVector weights = tfidf_vector(m, tokens);
  double total = 0.0;
  for (const auto& [t, w] : weights.entries) {
    const std::vector<double>* v = tbl.find(t);
    if (v == nullptr) continue;
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * (*v)[i];
    total += w;
  }
  if (total > 0.0) {
    for (double& c : acc) c /= total;
  } else {
    std::fill(acc.begin(), acc.end(), 0.0);
  }
  return acc;
}

}  // namespace kgqa
