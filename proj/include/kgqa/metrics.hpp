#ifndef KGQA_METRICS_HPP
#define KGQA_METRICS_HPP

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kgqa {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
/// Harmonic mean; 0 when pre + rec = 0.
double f1(double pre, double rec);
double f1(const ConfusionCounts& c);

/// Compares predicted vs gold answer sets (both normalized before matching).
ConfusionCounts count_sets(const std::vector<std::string>& predicted,
                           const std::vector<std::string>& gold);

/// 1 if the normalized top prediction appears in the normalized gold set.
double exact_match(const std::vector<std::string>& predicted,
                   const std::vector<std::string>& gold);

/// Reciprocal of the 1-based rank of the first gold hit; 0 when absent.
double reciprocal_rank(const std::vector<std::string>& ranked,
                       const std::vector<std::string>& gold);

/// BLEU-N with uniform weights, clipped modified n-gram precision and
/// brevity penalty. Any zero p_n yields 0 unless `smooth` (add-one on the
/// clipped counts for n >= 2).
double bleu(const std::vector<std::string>& candidate,
            const std::vector<std::vector<std::string>>& references,
            std::size_t max_n = 4, bool smooth = false);

/// Clipped n-gram recall against a single reference.
double rouge_n(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference, std::size_t n);

/// LCS length over tokens divided by reference length.
double rouge_l(const std::vector<std::string>& candidate,
               const std::vector<std::string>& reference);

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct EvalRecord {
  std::string question;
  std::vector<std::string> gold;
  std::optional<std::string> reference_text;
};

/// JSONL loader: one {"question": ..., "gold": [...]} object per line,
/// optional "reference_text". Throws ParseFailure with a line number.
std::vector<EvalRecord> load_eval_records(std::istream& in);

struct RecordScore {
  double em = 0.0;
  ConfusionCounts counts;
  double rr = 0.0;
  std::optional<double> bleu;
  std::optional<double> rouge2;
  std::optional<double> rouge_l;
};

struct MetricReport {
  std::size_t records = 0;
  double em = 0.0;
  double precision = 0.0;  // micro-averaged
  double recall = 0.0;
  double f1 = 0.0;
  double mrr = 0.0;
  // Present when at least one record carries reference text; averaged over
  // those records only.
  std::optional<double> bleu;
  std::optional<double> rouge2;
  std::optional<double> rouge_l;
};

RecordScore score_record(const std::vector<std::string>& predicted, const std::string& answer_text,
                         const EvalRecord& record);

/// Aggregates per-record scores: macro-averaged EM/MRR, micro-averaged
/// precision/recall/F1, text metrics averaged over records with references.
MetricReport aggregate(const std::vector<RecordScore>& scores);

void print_report(std::ostream& out, const MetricReport& report);

}  // namespace kgqa

#endif  // KGQA_METRICS_HPP
