#ifndef KGQA_MATCHER_HPP
#define KGQA_MATCHER_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "kgqa/ner.hpp"
#include "kgqa/text.hpp"
#include "kgqa/vectors.hpp"

namespace kgqa {

enum class Direction { forward, reverse };

/// A question pattern with exactly one entity slot of the form <TYPE>.
struct Template {
  std::string id;
  std::string relation;
  std::string subject_type;  // entity type expected in the slot
  Direction direction = Direction::forward;
  std::string text;            // pattern with the slot token
  std::string answer_surface;  // sentence with {entity} and {list} holes
};

struct MatchResult {
  std::string template_id;
  double score = 0.0;
  bool passed = false;  // score >= threshold
};

/// Parses the tab-separated templates format
/// (id, relation, subject_type, direction, template_text, answer_surface).
/// Throws DuplicateTemplateId / MalformedTemplate.
std::vector<Template> load_templates(std::istream& in);

/// Replaces each mention's token span with the single slot token <etype>.
/// Mentions must be non-overlapping and within bounds.
std::vector<std::string> abstract_question(const std::vector<Token>& tokens,
                                           const std::vector<EntityMention>& mentions);

/// TF-IDF model over the template set, one document per tokenized template
/// text.
TfIdfModel fit_template_tfidf(const std::vector<Template>& templates);

/// alpha * tfidf-cosine + (1 - alpha) * embedding-cosine between the
/// abstracted question and the template text. Slot tokens participate as
/// ordinary terms.
double score_template(const std::vector<std::string>& q_abstract, const Template& t,
                      const TfIdfModel& tfidf, const EmbeddingTable& emb, double alpha);

/// Highest-scoring template; ties break to the lexicographically smallest
/// id. Throws NoTemplates on an empty template list.
MatchResult best_template(const std::vector<std::string>& q_abstract,
                          const std::vector<Template>& templates, const TfIdfModel& tfidf,
                          const EmbeddingTable& emb, double alpha, double threshold);

}  // namespace kgqa

#endif  // KGQA_MATCHER_HPP
