#include "kgqa/ner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "kgqa/errors.hpp"

namespace kgqa {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string shape_of(const std::string& token) {
  std::string shape;
  shape.reserve(token.size());
  for (char c : token) {
    if (c >= 'A' && c <= 'Z') {
      shape.push_back('X');
    } else if (c >= 'a' && c <= 'z') {
      shape.push_back('x');
    } else if (c >= '0' && c <= '9') {
      shape.push_back('d');
    } else {
      shape.push_back('.');
    }
  }
  return shape;
}

void validate_bio(const std::vector<int>& tags, const LabelSet& ls) {
  for (std::size_t t = 0; t < tags.size(); ++t) {
    const std::string& label = ls.label(tags[t]);
    if (!LabelSet::is_inside(label)) continue;
    const std::string type = LabelSet::entity_type(label);
    if (t == 0) {
      throw InvalidBioSequence("sentence starts with '" + label + "'");
    }
    const std::string& prev = ls.label(tags[t - 1]);
    if (LabelSet::is_outside(prev) || LabelSet::entity_type(prev) != type) {
      throw InvalidBioSequence("'" + label + "' follows '" + prev + "'");
    }
  }
}

std::string format_weight(double w) {
  if (w == kNegInf) return "-inf";
  std::ostringstream ss;
  ss << std::setprecision(17) << w;
  return ss.str();
}

double parse_weight(const std::string& field) {
  if (field == "-inf") return kNegInf;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseFailure("bad weight '" + field + "'");
  }
  return value;
}

}  // namespace

LabelSet::LabelSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw InvalidBioSequence("label set must not be empty");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const std::string& l = labels_[i];
    if (!is_outside(l) && !((is_begin(l) || is_inside(l)) && !entity_type(l).empty())) {
      throw InvalidBioSequence("label '" + l + "' is not O, B-<type>, or I-<type>");
    }
    if (!index_.emplace(l, static_cast<int>(i)).second) {
      throw InvalidBioSequence("duplicate label '" + l + "'");
    }
  }
}

int LabelSet::index(const std::string& label) const {
  const auto it = index_.find(label);
  return it == index_.end() ? -1 : it->second;
}

bool LabelSet::is_begin(const std::string& label) { return label.rfind("B-", 0) == 0; }

bool LabelSet::is_inside(const std::string& label) { return label.rfind("I-", 0) == 0; }

std::string LabelSet::entity_type(const std::string& label) {
  if (is_begin(label) || is_inside(label)) return label.substr(2);
  return "";
}

TransitionMatrix::TransitionMatrix(int label_count)
    : k_(label_count),
      scores_(static_cast<std::size_t>(label_count + 2) * static_cast<std::size_t>(label_count + 2),
              0.0) {}

double TransitionMatrix::forbidden() { return kNegInf; }

std::size_t TransitionMatrix::index(int from, int to) const {
  return static_cast<std::size_t>(from) * static_cast<std::size_t>(k_ + 2) +
         static_cast<std::size_t>(to);
}

EmissionScores::EmissionScores(int length, int label_count)
    : n_(length),
      k_(label_count),
      scores_(static_cast<std::size_t>(length) * static_cast<std::size_t>(label_count), 0.0) {}

TagSequence viterbi(const EmissionScores& e, const TransitionMatrix& a, const LabelSet& ls) {
  if (e.label_count() != a.label_count() || a.label_count() != ls.size()) {
    throw LengthMismatch("emission/transition/label-set sizes disagree");
  }
  const int n = e.length();
  const int k = ls.size();
  if (n == 0) return {};

  // suffix[t][j]: best score of the path fragment that labels positions
  // t..n-1 starting with label j, including e[t][j] and the closing
  // transition into STOP.
  std::vector<std::vector<double>> suffix(static_cast<std::size_t>(n),
                                          std::vector<double>(static_cast<std::size_t>(k)));
  for (int j = 0; j < k; ++j) {
    suffix[n - 1][j] = e.at(n - 1, j) + a.at(j, ls.stop_index());
  }
  for (int t = n - 2; t >= 0; --t) {
    for (int j = 0; j < k; ++j) {
      double best = kNegInf;
      for (int nxt = 0; nxt < k; ++nxt) {
        best = std::max(best, a.at(j, nxt) + suffix[t + 1][nxt]);
      }
      suffix[t][j] = e.at(t, j) + best;
    }
  }

  // Greedy front-to-back: at each step take the smallest label index whose
  // continuation still attains the global optimum. This yields the
  // lexicographically smallest argmax sequence.
  TagSequence out;
  out.tags.resize(static_cast<std::size_t>(n));
  double best_total = kNegInf;
  for (int j = 0; j < k; ++j) {
    best_total = std::max(best_total, a.at(ls.start_index(), j) + suffix[0][j]);
  }
  if (best_total == kNegInf) throw NoFeasiblePath("every complete path is forbidden");
  out.score = best_total;

  int prev = ls.start_index();
  for (int t = 0; t < n; ++t) {
    double step_best = kNegInf;
    for (int j = 0; j < k; ++j) {
      step_best = std::max(step_best, a.at(prev, j) + suffix[t][j]);
    }
    for (int j = 0; j < k; ++j) {
      if (a.at(prev, j) + suffix[t][j] == step_best) {
        out.tags[static_cast<std::size_t>(t)] = j;
        prev = j;
        break;
      }
    }
  }
  return out;
}

TransitionMatrix constrain_bio(const TransitionMatrix& a, const LabelSet& ls) {
  TransitionMatrix out = a;
  for (int to = 0; to < ls.size(); ++to) {
    const std::string& to_label = ls.label(to);
    if (!LabelSet::is_inside(to_label)) continue;
    const std::string type = LabelSet::entity_type(to_label);
    out.set(ls.start_index(), to, TransitionMatrix::forbidden());
    for (int from = 0; from < ls.size(); ++from) {
      const std::string& from_label = ls.label(from);
      if (LabelSet::is_outside(from_label) || LabelSet::entity_type(from_label) != type) {
        out.set(from, to, TransitionMatrix::forbidden());
      }
    }
  }
  return out;
}

std::vector<EntityMention> decode_mentions(const std::vector<std::string>& tokens,
                                           const TagSequence& ts, const LabelSet& ls) {
  if (tokens.size() != ts.tags.size()) {
    throw LengthMismatch("token/tag lengths disagree");
  }
  validate_bio(ts.tags, ls);
  std::vector<EntityMention> mentions;
  const int n = static_cast<int>(tokens.size());
  int t = 0;
  while (t < n) {
    const std::string& label = ls.label(ts.tags[static_cast<std::size_t>(t)]);
    if (!LabelSet::is_begin(label)) {
      ++t;
      continue;
    }
    const std::string type = LabelSet::entity_type(label);
    int last = t;
    while (last + 1 < n) {
      const std::string& nxt = ls.label(ts.tags[static_cast<std::size_t>(last) + 1]);
      if (!LabelSet::is_inside(nxt) || LabelSet::entity_type(nxt) != type) break;
      ++last;
    }
    std::string text = tokens[static_cast<std::size_t>(t)];
    for (int i = t + 1; i <= last; ++i) {
      text += ' ';
      text += tokens[static_cast<std::size_t>(i)];
    }
    mentions.push_back({std::move(text), type, {t, last}, ""});
    t = last + 1;
  }
  return mentions;
}

TagSequence bio_encode(const std::vector<EntityMention>& mentions, int length, const LabelSet& ls) {
  TagSequence out;
  const int o = ls.index("O");
  if (o < 0) throw InvalidBioSequence("label set lacks 'O'");
  out.tags.assign(static_cast<std::size_t>(length), o);
  int prev_end = -1;
  for (const EntityMention& m : mentions) {
    const auto [first, last] = m.token_span;
    if (first <= prev_end || first > last || last >= length) {
      throw InvalidBioSequence("mention spans must be ordered, disjoint, and in range");
    }
    const int b = ls.index("B-" + m.label);
    const int i = ls.index("I-" + m.label);
    if (b < 0 || (last > first && i < 0)) {
      throw InvalidBioSequence("no BIO labels for entity type '" + m.label + "'");
    }
    out.tags[static_cast<std::size_t>(first)] = b;
    for (int t = first + 1; t <= last; ++t) out.tags[static_cast<std::size_t>(t)] = i;
    prev_end = last;
  }
  return out;
}

Gazetteer::Gazetteer(const KnowledgeGraph& g) {
  for (const auto& [id, e] : g.entities()) {
    const std::vector<std::string> key = normalized_texts(tokenize(e.name));
    if (key.empty()) continue;
    max_len_ = std::max(max_len_, key.size());
    const auto it = entries_.find(key);
    if (it == entries_.end() || id < it->second.first) {
      entries_[key] = {id, e.etype};
    }
  }
}

std::vector<EntityMention> Gazetteer::tag(const std::vector<Token>& tokens) const {
  std::vector<EntityMention> mentions;
  const std::size_t n = tokens.size();
  std::vector<std::string> norm(n);
  for (std::size_t i = 0; i < n; ++i) norm[i] = normalize(tokens[i].text);

  std::size_t pos = 0;
  while (pos < n) {
    std::size_t matched = 0;
    const std::pair<std::string, std::string>* hit = nullptr;
    const std::size_t cap = std::min(max_len_, n - pos);
    for (std::size_t len = cap; len >= 1; --len) {
      const std::vector<std::string> key(norm.begin() + static_cast<std::ptrdiff_t>(pos),
                                         norm.begin() + static_cast<std::ptrdiff_t>(pos + len));
      const auto it = entries_.find(key);
      if (it != entries_.end()) {
        matched = len;
        hit = &it->second;
        break;
      }
    }
    if (matched == 0) {
      ++pos;
      continue;
    }
    std::string text = tokens[pos].text;
    for (std::size_t i = pos + 1; i < pos + matched; ++i) {
      text += ' ';
      text += tokens[i].text;
    }
    mentions.push_back({std::move(text),
                        hit->second,
                        {static_cast<int>(pos), static_cast<int>(pos + matched - 1)},
                        hit->first});
    pos += matched;
  }
  return mentions;
}

std::vector<std::string> Gazetteer::types_of_token(const std::string& normalized_token) const {
  std::set<std::string> types;
  for (const auto& [key, value] : entries_) {
    for (const std::string& part : key) {
      if (part == normalized_token) {
        types.insert(value.second);
        break;
      }
    }
  }
  return {types.begin(), types.end()};
}

std::vector<EntityMention> gazetteer_tag(const std::vector<Token>& tokens,
                                         const KnowledgeGraph& g) {
  return Gazetteer(g).tag(tokens);
}

double EmissionModel::weight(const std::string& feature, int label) const {
  const auto it = weights.find(feature);
  if (it == weights.end()) return 0.0;
  return it->second[static_cast<std::size_t>(label)];
}

void EmissionModel::update(const std::string& feature, int label, double delta, int label_count) {
  auto& row = weights[feature];
  if (row.empty()) row.assign(static_cast<std::size_t>(label_count), 0.0);
  row[static_cast<std::size_t>(label)] += delta;
}

std::vector<std::vector<std::string>> extract_features(const std::vector<std::string>& tokens,
                                                       const Gazetteer* gazetteer) {
  const std::size_t n = tokens.size();
  std::vector<std::string> norm(n);
  for (std::size_t i = 0; i < n; ++i) norm[i] = normalize(tokens[i]);

  std::vector<std::vector<std::string>> features(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::vector<std::string>& f = features[t];
    f.push_back("w=" + norm[t]);
    f.push_back("shape=" + shape_of(tokens[t]));
    f.push_back("prev=" + (t > 0 ? norm[t - 1] : std::string("<s>")));
    f.push_back("next=" + (t + 1 < n ? norm[t + 1] : std::string("</s>")));
    if (gazetteer != nullptr) {
      for (const std::string& type : gazetteer->types_of_token(norm[t])) {
        f.push_back("gaz=" + type);
      }
    }
  }
  return features;
}

EmissionScores score_emissions(const EmissionModel& m, const std::vector<std::string>& tokens,
                               const LabelSet& ls) {
  EmissionScores scores(static_cast<int>(tokens.size()), ls.size());
  const auto features = extract_features(tokens, m.gazetteer.get());
  for (std::size_t t = 0; t < features.size(); ++t) {
    for (const std::string& f : features[t]) {
      const auto it = m.weights.find(f);
      if (it == m.weights.end()) continue;
      for (int j = 0; j < ls.size(); ++j) {
        scores.add(static_cast<int>(t), j, it->second[static_cast<std::size_t>(j)]);
      }
    }
  }
  return scores;
}

std::vector<TaggedSentence> load_ner_corpus(std::istream& in) {
  std::vector<TaggedSentence> corpus;
  TaggedSentence current;
  std::string line;
  std::size_t line_no = 0;
  const auto flush = [&] {
    if (!current.tokens.empty()) {
      corpus.push_back(std::move(current));
      current = {};
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw ParseFailure("line " + std::to_string(line_no) + ": expected '<token>\\t<tag>'");
    }
    current.tokens.push_back(line.substr(0, tab));
    current.tags.push_back(line.substr(tab + 1));
  }
  flush();
  if (in.bad()) throw IoFailure("stream error while loading tagged corpus");
  return corpus;
}

LabelSet label_set_from_corpus(const std::vector<TaggedSentence>& corpus) {
  std::set<std::string> tags;
  for (const TaggedSentence& s : corpus) {
    tags.insert(s.tags.begin(), s.tags.end());
  }
  return LabelSet({tags.begin(), tags.end()});
}

NerModel train_perceptron(const std::vector<TaggedSentence>& corpus, const LabelSet& ls,
                          int epochs, std::shared_ptr<const Gazetteer> gazetteer) {
  if (corpus.empty()) throw EmptyCorpus("perceptron training needs at least one sentence");

  std::vector<std::vector<int>> gold(corpus.size());
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const TaggedSentence& sent = corpus[s];
    if (sent.tokens.size() != sent.tags.size()) {
      throw LengthMismatch("sentence " + std::to_string(s) + ": token/tag lengths disagree");
    }
    gold[s].reserve(sent.tags.size());
    for (const std::string& tag : sent.tags) {
      const int idx = ls.index(tag);
      if (idx < 0) throw InvalidBioSequence("tag '" + tag + "' not in label set");
      gold[s].push_back(idx);
    }
    validate_bio(gold[s], ls);
  }

  NerModel model{ls, EmissionModel{{}, std::move(gazetteer)}, TransitionMatrix(ls.size())};
  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t s = 0; s < corpus.size(); ++s) {
      const TaggedSentence& sent = corpus[s];
      const EmissionScores e = score_emissions(model.emissions, sent.tokens, ls);
      const TagSequence predicted = viterbi(e, constrain_bio(model.transitions, ls), ls);
      if (predicted.tags == gold[s]) continue;

      const auto features = extract_features(sent.tokens, model.emissions.gazetteer.get());
      for (std::size_t t = 0; t < features.size(); ++t) {
        for (const std::string& f : features[t]) {
          model.emissions.update(f, gold[s][t], 1.0, ls.size());
          model.emissions.update(f, predicted.tags[t], -1.0, ls.size());
        }
      }
      const auto bump = [&](const std::vector<int>& path, double delta) {
        int prev = ls.start_index();
        for (int tag : path) {
          model.transitions.add(prev, tag, delta);
          prev = tag;
        }
        model.transitions.add(prev, ls.stop_index(), delta);
      };
      bump(gold[s], 1.0);
      bump(predicted.tags, -1.0);
    }
  }
  return model;
}

double mention_f1(const NerModel& model, const std::vector<TaggedSentence>& corpus) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const TaggedSentence& sent : corpus) {
    TagSequence gold;
    gold.tags.reserve(sent.tags.size());
    for (const std::string& tag : sent.tags) {
      const int idx = model.labels.index(tag);
      if (idx < 0) throw InvalidBioSequence("tag '" + tag + "' not in label set");
      gold.tags.push_back(idx);
    }
    const auto want = decode_mentions(sent.tokens, gold, model.labels);

    const EmissionScores e = score_emissions(model.emissions, sent.tokens, model.labels);
    const TagSequence predicted =
        viterbi(e, constrain_bio(model.transitions, model.labels), model.labels);
    const auto got = decode_mentions(sent.tokens, predicted, model.labels);

    std::set<std::pair<std::pair<int, int>, std::string>> want_keys, got_keys;
    for (const EntityMention& m : want) want_keys.insert({m.token_span, m.label});
    for (const EntityMention& m : got) got_keys.insert({m.token_span, m.label});
    for (const auto& k : got_keys) {
      if (want_keys.contains(k)) {
        ++tp;
      } else {
        ++fp;
      }
    }
    for (const auto& k : want_keys) {
      if (!got_keys.contains(k)) ++fn;
    }
  }
  if (tp + fp + fn == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) /
         (2.0 * static_cast<double>(tp) + static_cast<double>(fp) + static_cast<double>(fn));
}

void save_ner_model(std::ostream& out, const NerModel& model) {
  const int k = model.labels.size();
  out << "ner-model 1\n";
  out << "labels " << k << '\n';
  for (int j = 0; j < k; ++j) out << model.labels.label(j) << '\n';
  out << "transitions " << model.transitions.dim() << '\n';
  for (int from = 0; from < model.transitions.dim(); ++from) {
    for (int to = 0; to < model.transitions.dim(); ++to) {
      if (to > 0) out << ' ';
      out << format_weight(model.transitions.at(from, to));
    }
    out << '\n';
  }
  std::vector<std::string> features;
  features.reserve(model.emissions.weights.size());
  for (const auto& [f, row] : model.emissions.weights) features.push_back(f);
  std::sort(features.begin(), features.end());
  out << "features " << features.size() << '\n';
  for (const std::string& f : features) {
    out << f << '\t';
    const auto& row = model.emissions.weights.at(f);
    for (int j = 0; j < k; ++j) {
      if (j > 0) out << ' ';
      out << format_weight(row[static_cast<std::size_t>(j)]);
    }
    out << '\n';
  }
  if (!out) throw IoFailure("stream error while saving tagger model");
}

NerModel load_ner_model(std::istream& in, std::shared_ptr<const Gazetteer> gazetteer) {
  std::string line;
  const auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) throw ParseFailure("truncated tagger model");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  const auto expect_header = [&](const std::string& keyword) -> std::size_t {
    std::istringstream ss(next_line());
    std::string word;
    std::size_t count = 0;
    if (!(ss >> word >> count) || word != keyword) {
      throw ParseFailure("expected '" + keyword + " <count>', got '" + line + "'");
    }
    return count;
  };

  if (next_line() != "ner-model 1") throw ParseFailure("not a tagger model file");
  const std::size_t k = expect_header("labels");
  std::vector<std::string> labels;
  labels.reserve(k);
  for (std::size_t j = 0; j < k; ++j) labels.push_back(next_line());
  LabelSet ls(labels);

  const std::size_t dim = expect_header("transitions");
  if (dim != k + 2) throw ParseFailure("transition matrix dimension disagrees with label count");
  TransitionMatrix a(static_cast<int>(k));
  for (std::size_t from = 0; from < dim; ++from) {
    std::istringstream ss(next_line());
    std::string field;
    for (std::size_t to = 0; to < dim; ++to) {
      if (!(ss >> field)) throw ParseFailure("short transition row");
      a.set(static_cast<int>(from), static_cast<int>(to), parse_weight(field));
    }
  }

  const std::size_t m = expect_header("features");
  EmissionModel emissions{{}, std::move(gazetteer)};
  for (std::size_t i = 0; i < m; ++i) {
    const std::string& row = next_line();
    const std::size_t tab = row.find('\t');
    if (tab == std::string::npos) throw ParseFailure("feature row lacks a tab");
    const std::string feature = row.substr(0, tab);
    std::istringstream ss(row.substr(tab + 1));
    std::vector<double> weights;
    weights.reserve(k);
    std::string field;
    while (ss >> field) weights.push_back(parse_weight(field));
    if (weights.size() != k) throw ParseFailure("feature '" + feature + "' weight count is off");
    emissions.weights.emplace(feature, std::move(weights));
  }
  return {std::move(ls), std::move(emissions), std::move(a)};
}

}  // namespace kgqa
