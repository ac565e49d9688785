#ifndef KGQA_NER_HPP
#define KGQA_NER_HPP

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgqa/kg.hpp"
#include "kgqa/text.hpp"

namespace kgqa {

/// Ordered BIO tag inventory plus the two virtual transition states.
/// Indices 0..k-1 address real labels; start_index() = k, stop_index() = k+1.
class LabelSet {
 public:
  /// Labels must be distinct, non-empty, and each non-O label of the form
  /// B-X or I-X.
  explicit LabelSet(std::vector<std::string> labels);

  int size() const { return static_cast<int>(labels_.size()); }
  int start_index() const { return size(); }
  int stop_index() const { return size() + 1; }
  const std::string& label(int index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const { return labels_; }
  /// Index of a label; -1 when absent.
  int index(const std::string& label) const;

  static bool is_outside(const std::string& label) { return label == "O"; }
  static bool is_begin(const std::string& label);
  static bool is_inside(const std::string& label);
  /// Entity type of a B-X / I-X label ("" for O).
  static std::string entity_type(const std::string& label);

 private:
  std::vector<std::string> labels_;
  std::map<std::string, int> index_;
};

/// (k+2) x (k+2) transition scores including the start/stop states.
/// Entries are finite or forbidden() (negative infinity).
class TransitionMatrix {
 public:
  explicit TransitionMatrix(int label_count);

  static double forbidden();

  int label_count() const { return k_; }
  int dim() const { return k_ + 2; }
  double at(int from, int to) const { return scores_[index(from, to)]; }
  void set(int from, int to, double score) { scores_[index(from, to)] = score; }
  void add(int from, int to, double delta) { scores_[index(from, to)] += delta; }

 private:
  std::size_t index(int from, int to) const;

  int k_;
  std::vector<double> scores_;
};

/// Per-token label compatibility scores, shape n x k.
class EmissionScores {
 public:
  EmissionScores(int length, int label_count);

  int length() const { return n_; }
  int label_count() const { return k_; }
  double at(int t, int j) const { return scores_[static_cast<std::size_t>(t) * k_ + j]; }
  void set(int t, int j, double score) { scores_[static_cast<std::size_t>(t) * k_ + j] = score; }
  void add(int t, int j, double delta) { scores_[static_cast<std::size_t>(t) * k_ + j] += delta; }

 private:
  int n_;
  int k_;
  std::vector<double> scores_;
};

/// A decoded label path. Indices address LabelSet labels only (never
/// start/stop); score is the full path score including start/stop
/// transitions.
struct TagSequence {
  std::vector<int> tags;
  double score = 0.0;
};

struct EntityMention {
  std::string text;   // covered tokens joined by single spaces
  std::string label;  // entity type
  std::pair<int, int> token_span{0, 0};  // first and last token index, inclusive
  std::string entity_id;  // bound by the gazetteer; empty for CRF mentions

  bool operator==(const EntityMention&) const = default;
};

/// Dictionary of normalized entity-name token sequences. On duplicate
/// surface forms the lexicographically smallest entity id wins.
class Gazetteer {
 public:
  Gazetteer() = default;
  explicit Gazetteer(const KnowledgeGraph& g);

  /// Leftmost-longest, non-overlapping matches over the token sequence.
  std::vector<EntityMention> tag(const std::vector<Token>& tokens) const;

  /// Entity types whose dictionary contains the single token, sorted.
  std::vector<std::string> types_of_token(const std::string& normalized_token) const;

  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::vector<std::string>, std::pair<std::string, std::string>> entries_;
  std::size_t max_len_ = 0;
};

/// Leftmost-longest dictionary matches of token spans against entity names
/// in g, labeled with the matched entity's type.
std::vector<EntityMention> gazetteer_tag(const std::vector<Token>& tokens,
                                         const KnowledgeGraph& g);

/// Feature-weight map feeding the CRF layer; replaces a learned emission
/// network. Scores are sums of per-feature weights, so identical sentences
/// always produce identical matrices.
struct EmissionModel {
  std::unordered_map<std::string, std::vector<double>> weights;  // feature -> per-label
  std::shared_ptr<const Gazetteer> gazetteer;  // optional context for gaz features

  double weight(const std::string& feature, int label) const;
  void update(const std::string& feature, int label, double delta, int label_count);
};

/// Per-position feature strings: token identity, shape, neighbors, and
/// gazetteer membership per entity type when a gazetteer is supplied.
std::vector<std::vector<std::string>> extract_features(const std::vector<std::string>& tokens,
                                                       const Gazetteer* gazetteer);

EmissionScores score_emissions(const EmissionModel& m, const std::vector<std::string>& tokens,
                               const LabelSet& ls);

/// Max-score path under emission + transition scores with the start/stop
/// augmentation. Ties resolve to the lexicographically smallest index
/// sequence. Throws NoFeasiblePath when every complete path is forbidden.
TagSequence viterbi(const EmissionScores& e, const TransitionMatrix& a, const LabelSet& ls);

/// Copy of a with forbidden() written to every illegal BIO transition:
/// START->I-X, O->I-X, and B-Y/I-Y->I-X for Y != X.
TransitionMatrix constrain_bio(const TransitionMatrix& a, const LabelSet& ls);

/// Maximal B-X (I-X)* runs become mentions. Throws InvalidBioSequence on an
/// I tag without a compatible predecessor.
std::vector<EntityMention> decode_mentions(const std::vector<std::string>& tokens,
                                           const TagSequence& ts, const LabelSet& ls);

/// Inverse of decode_mentions for non-overlapping ordered spans.
TagSequence bio_encode(const std::vector<EntityMention>& mentions, int length,
                       const LabelSet& ls);

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
};

/// Reads the "<token>\t<tag>" one-per-line format, blank line between
/// sentences.
std::vector<TaggedSentence> load_ner_corpus(std::istream& in);

/// Sorted distinct tag inventory of a corpus.
LabelSet label_set_from_corpus(const std::vector<TaggedSentence>& corpus);

struct NerModel {
  LabelSet labels;
  EmissionModel emissions;
  TransitionMatrix transitions;
};

/// Structured-perceptron training: decode under BIO constraints, then add
/// gold-path counts and subtract predicted-path counts when they differ.
/// Sentences are presented in corpus order every epoch; the result is the
/// parameter state after the final epoch.
NerModel train_perceptron(const std::vector<TaggedSentence>& corpus, const LabelSet& ls,
                          int epochs,
                          std::shared_ptr<const Gazetteer> gazetteer = nullptr);

/// Mention-level F1 of constrained decoding against a corpus's gold
/// mentions (exact span + label). 1.0 when neither side has any mention.
double mention_f1(const NerModel& model, const std::vector<TaggedSentence>& corpus);

/// Text serialization with sorted feature order (byte-stable).
void save_ner_model(std::ostream& out, const NerModel& model);
NerModel load_ner_model(std::istream& in,
                        std::shared_ptr<const Gazetteer> gazetteer = nullptr);

}  // namespace kgqa

#endif  // KGQA_NER_HPP
