#include "kgqa/matcher.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <optional>
#include <set>

#include "kgqa/errors.hpp"

namespace kgqa {
namespace {

bool is_comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == '\r') continue;
    return c == '#';
  }
  return true;
}

std::optional<std::array<std::string, 6>> split_record(const std::string& line) {
  std::array<std::string, 6> fields;
  std::size_t start = 0;
  std::size_t idx = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (idx >= fields.size()) return std::nullopt;
    fields[idx++] = line.substr(start, tab == std::string::npos ? std::string::npos : tab - start);
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  if (idx != fields.size()) return std::nullopt;
  return fields;
}

// The single <TYPE> slot of a template text, or nullopt.
std::optional<std::string> slot_type(const std::string& text) {
  std::optional<std::string> found;
  for (const Token& tok : tokenize(text)) {
    if (tok.text.size() < 3 || tok.text.front() != '<' || tok.text.back() != '>') continue;
    if (found) return std::nullopt;  // more than one slot
    found = tok.text.substr(1, tok.text.size() - 2);
  }
  return found;
}

}  // namespace

std::vector<Template> load_templates(std::istream& in) {
  std::vector<Template> templates;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_comment_or_blank(line)) continue;

    const auto fields = split_record(line);
    if (!fields) {
      throw MalformedTemplate("line " + std::to_string(line_no) + ": expected 6 tab-separated fields");
    }
    for (std::size_t i = 0; i < fields->size(); ++i) {
      if ((*fields)[i].empty()) {
        throw MalformedTemplate("line " + std::to_string(line_no) + ": empty field");
      }
    }
    Template t;
    t.id = (*fields)[0];
    t.relation = (*fields)[1];
    t.subject_type = (*fields)[2];
    t.text = (*fields)[4];
    t.answer_surface = (*fields)[5];
    const std::string& dir = (*fields)[3];
    if (dir == "forward") {
      t.direction = Direction::forward;
    } else if (dir == "reverse") {
      t.direction = Direction::reverse;
    } else {
      throw MalformedTemplate("line " + std::to_string(line_no) + ": direction must be forward or reverse");
    }
    const auto slot = slot_type(t.text);
    if (!slot) {
      throw MalformedTemplate("line " + std::to_string(line_no) +
                              ": template text needs exactly one <TYPE> slot");
    }
    if (*slot != t.subject_type) {
      throw MalformedTemplate("line " + std::to_string(line_no) + ": slot <" + *slot +
                              "> disagrees with subject type '" + t.subject_type + "'");
    }
    if (!ids.insert(t.id).second) {
      throw DuplicateTemplateId("template id '" + t.id + "' appears twice");
    }
    templates.push_back(std::move(t));
  }
  if (in.bad()) throw IoFailure("stream error while loading templates");
  return templates;
}

std::vector<std::string> abstract_question(const std::vector<Token>& tokens,
                                           const std::vector<EntityMention>& mentions) {
  std::vector<EntityMention> ordered = mentions;
  std::sort(ordered.begin(), ordered.end(), [](const EntityMention& x, const EntityMention& y) {
    return x.token_span < y.token_span;
  });
  std::vector<std::string> out;
  out.reserve(tokens.size());
  std::size_t m = 0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (m < ordered.size() && static_cast<int>(t) == ordered[m].token_span.first) {
      out.push_back("<" + ordered[m].label + ">");
      t = static_cast<std::size_t>(ordered[m].token_span.second);
      ++m;
      continue;
    }
    out.push_back(tokens[t].text);
  }
  return out;
}

TfIdfModel fit_template_tfidf(const std::vector<Template>& templates) {
  std::vector<std::vector<std::string>> corpus;
  corpus.reserve(templates.size());
  for (const Template& t : templates) {
    corpus.push_back(token_texts(tokenize(t.text)));
  }
  return fit_tfidf(corpus);
}

double score_template(const std::vector<std::string>& q_abstract, const Template& t,
                      const TfIdfModel& tfidf, const EmbeddingTable& emb, double alpha) {
  const std::vector<std::string> t_tokens = token_texts(tokenize(t.text));
  const double lexical = cosine(tfidf_vector(tfidf, q_abstract), tfidf_vector(tfidf, t_tokens));
  if (alpha == 1.0) return lexical;
  const double semantic =
      cosine(question_embedding(tfidf, emb, q_abstract), question_embedding(tfidf, emb, t_tokens));
  if (alpha == 0.0) return semantic;
  return alpha * lexical + (1.0 - alpha) * semantic;
}

MatchResult best_template(const std::vector<std::string>& q_abstract,
                          const std::vector<Template>& templates, const TfIdfModel& tfidf,
                          const EmbeddingTable& emb, double alpha, double threshold) {
  if (templates.empty()) throw NoTemplates("cannot match against an empty template set");
  const Template* best = nullptr;
  double best_score = 0.0;
  for (const Template& t : templates) {
    const double score = score_template(q_abstract, t, tfidf, emb, alpha);
    if (best == nullptr || score > best_score ||
        (score == best_score && t.id < best->id)) {
      best = &t;
      best_score = score;
    }
  }
  return {best->id, best_score, best_score >= threshold};
}

}  // namespace kgqa
