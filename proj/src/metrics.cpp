#include "kgqa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kgqa/errors.hpp"
#include "kgqa/text.hpp"

namespace kgqa {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
  return s.substr(b, e - b);
}

std::string canon(const std::string& s) { return normalize(trim(s)); }

std::set<std::string> canon_set(const std::vector<std::string>& items) {
  std::set<std::string> out;
  for (const std::string& s : items) out.insert(canon(s));
  return out;
}

using Ngram = std::vector<std::string>;

std::map<Ngram, std::size_t> ngram_counts(const std::vector<std::string>& tokens, std::size_t n) {
  std::map<Ngram, std::size_t> counts;
  if (tokens.size() < n || n == 0) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[Ngram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

double precision(const ConfusionCounts& c) {
  if (c.tp + c.fp == 0) throw UndefinedMetric("precision needs tp + fp > 0");
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
}

double recall(const ConfusionCounts& c) {
  if (c.tp + c.fn == 0) throw UndefinedMetric("recall needs tp + fn > 0");
  return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double f1(double pre, double rec) {
  if (pre + rec == 0.0) return 0.0;
  return 2.0 * pre * rec / (pre + rec);
}

double f1(const ConfusionCounts& c) {
  const double pre = c.tp + c.fp > 0 ? precision(c) : 0.0;
  const double rec = c.tp + c.fn > 0 ? recall(c) : 0.0;
  return f1(pre, rec);
}

ConfusionCounts count_sets(const std::vector<std::string>& predicted,
                           const std::vector<std::string>& gold) {
  const std::set<std::string> p = canon_set(predicted);
  const std::set<std::string> g = canon_set(gold);
  ConfusionCounts c;
  for (const std::string& x : p) {
    if (g.contains(x)) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  for (const std::string& x : g) {
    if (!p.contains(x)) ++c.fn;
  }
  return c;
}

double exact_match(const std::vector<std::string>& predicted,
                   const std::vector<std::string>& gold) {
  if (predicted.empty()) return 0.0;
  return canon_set(gold).contains(canon(predicted.front())) ? 1.0 : 0.0;
}

double reciprocal_rank(const std::vector<std::string>& ranked,
                       const std::vector<std::string>& gold) {
  const std::set<std::string> g = canon_set(gold);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (g.contains(canon(ranked[i]))) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double bleu(const std::vector<std::string>& candidate,
            const std::vector<std::vector<std::string>>& references, std::size_t max_n,
            bool smooth) {
  if (candidate.empty()) throw EmptyCandidate("bleu candidate must be non-empty");
  if (references.empty()) throw NoReferences("bleu needs at least one reference");

  const std::size_t c = candidate.size();
  // Closest reference length; ties go to the shorter reference.
  std::size_t r = references.front().size();
  for (const auto& ref : references) {
    const std::size_t len = ref.size();
    const auto dist = [&](std::size_t x) {
      return x > c ? x - c : c - x;
    };
    if (dist(len) < dist(r) || (dist(len) == dist(r) && len < r)) r = len;
  }

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const auto cand_counts = ngram_counts(candidate, n);
    std::size_t total = c >= n ? c - n + 1 : 0;
    std::size_t clipped = 0;
    for (const auto& [gram, count] : cand_counts) {
      std::size_t best = 0;
      for (const auto& ref : references) {
        const auto ref_counts = ngram_counts(ref, n);
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) best = std::max(best, it->second);
      }
      clipped += std::min(count, best);
    }
    double p;
    if (smooth && n >= 2) {
      p = static_cast<double>(clipped + 1) / static_cast<double>(total + 1);
    } else {
      if (clipped == 0 || total == 0) return 0.0;
      p = static_cast<double>(clipped) / static_cast<double>(total);
    }
    log_sum += std::log(p);
  }
  const double bp = c >= r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return bp * std::exp(log_sum / static_cast<double>(max_n));
}

double rouge_n(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference, std::size_t n) {
  if (n == 0 || reference.size() < n) {
    throw ReferenceTooShort("rouge-" + std::to_string(n) + " needs a reference of at least " +
                            std::to_string(n) + " tokens");
  }
  const auto ref_counts = ngram_counts(reference, n);
  const auto cand_counts = ngram_counts(candidate, n);
  std::size_t clipped = 0;
  std::size_t total = 0;
  for (const auto& [gram, count] : ref_counts) total += count;
  for (const auto& [gram, count] : cand_counts) {
    const auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) clipped += std::min(count, it->second);
  }
  return static_cast<double>(clipped) / static_cast<double>(total);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = 0;  // dp[i-1][j-1]
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = a[i - 1] == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference) {
  if (reference.empty()) throw EmptyReference("rouge-l needs a non-empty reference");
  return static_cast<double>(lcs_length(candidate, reference)) /
         static_cast<double>(reference.size());
}

std::vector<EvalRecord> load_eval_records(std::istream& in) {
  std::vector<EvalRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseFailure("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("question") || !j["question"].is_string() ||
        !j.contains("gold") || !j["gold"].is_array() || j["gold"].empty()) {
      throw ParseFailure("line " + std::to_string(line_no) +
                         ": record needs a question string and a non-empty gold array");
    }
    EvalRecord r;
    r.question = j["question"].get<std::string>();
    for (const auto& g : j["gold"]) {
      if (!g.is_string()) {
        throw ParseFailure("line " + std::to_string(line_no) + ": gold entries must be strings");
      }
      r.gold.push_back(g.get<std::string>());
    }
    if (j.contains("reference_text")) {
      if (!j["reference_text"].is_string()) {
        throw ParseFailure("line " + std::to_string(line_no) + ": reference_text must be a string");
      }
      r.reference_text = j["reference_text"].get<std::string>();
    }
    records.push_back(std::move(r));
  }
  if (in.bad()) throw IoFailure("stream error while loading eval records");
  return records;
}

RecordScore score_record(const std::vector<std::string>& predicted, const std::string& answer_text,
                         const EvalRecord& record) {
  RecordScore s;
  s.em = exact_match(predicted, record.gold);
  s.counts = count_sets(predicted, record.gold);
  s.rr = reciprocal_rank(predicted, record.gold);
  if (record.reference_text) {
    const std::vector<std::string> cand = token_texts(tokenize(answer_text));
    const std::vector<std::string> ref = token_texts(tokenize(*record.reference_text));
    if (!cand.empty() && !ref.empty()) {
      s.bleu = bleu(cand, {ref}, 4, true);
      s.rouge_l = rouge_l(cand, ref);
      if (ref.size() >= 2) s.rouge2 = rouge_n(cand, ref, 2);
    }
  }
  return s;
}

MetricReport aggregate(const std::vector<RecordScore>& scores) {
  if (scores.empty()) throw EmptyDataset("no records to aggregate");
  MetricReport r;
  r.records = scores.size();
  ConfusionCounts total;
  double bleu_sum = 0.0, rouge2_sum = 0.0, rouge_l_sum = 0.0;
  std::size_t bleu_n = 0, rouge2_n = 0, rouge_l_n = 0;
  for (const RecordScore& s : scores) {
    r.em += s.em;
    r.mrr += s.rr;
    total.tp += s.counts.tp;
    total.fp += s.counts.fp;
    total.fn += s.counts.fn;
    if (s.bleu) {
      bleu_sum += *s.bleu;
      ++bleu_n;
    }
    if (s.rouge2) {
      rouge2_sum += *s.rouge2;
      ++rouge2_n;
    }
    if (s.rouge_l) {
      rouge_l_sum += *s.rouge_l;
      ++rouge_l_n;
    }
  }
  const double n = static_cast<double>(scores.size());
  r.em /= n;
  r.mrr /= n;
  r.precision = total.tp + total.fp > 0 ? precision(total) : 0.0;
  r.recall = total.tp + total.fn > 0 ? recall(total) : 0.0;
  r.f1 = f1(r.precision, r.recall);
  if (bleu_n > 0) r.bleu = bleu_sum / static_cast<double>(bleu_n);
  if (rouge2_n > 0) r.rouge2 = rouge2_sum / static_cast<double>(rouge2_n);
  if (rouge_l_n > 0) r.rouge_l = rouge_l_sum / static_cast<double>(rouge_l_n);
  return r;
}

void print_report(std::ostream& out, const MetricReport& report) {
  const auto line = [&](const std::string& name, double value) {
    std::ostringstream v;
    v << std::fixed << std::setprecision(6) << value;
    out << "metric=" << name << " value=" << v.str() << '\n';
  };
  out << "records: " << report.records << '\n';
  line("em", report.em);
  line("precision", report.precision);
  line("recall", report.recall);
  line("f1", report.f1);
  line("mrr", report.mrr);
  if (report.bleu) line("bleu", *report.bleu);
  if (report.rouge2) line("rouge2", *report.rouge2);
  if (report.rouge_l) line("rougeL", *report.rouge_l);
}

}  // namespace kgqa
