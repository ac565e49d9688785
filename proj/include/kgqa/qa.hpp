#ifndef KGQA_QA_HPP
#define KGQA_QA_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kgqa/kg.hpp"
#include "kgqa/matcher.hpp"
#include "kgqa/ner.hpp"
#include "kgqa/text.hpp"
#include "kgqa/vectors.hpp"

namespace kgqa {

struct EngineConfig {
  double alpha = 0.5;
  double threshold = 0.35;
  bool use_crf = false;
};

/// Immutable state shared by all questions: graph, gazetteer, templates,
/// fitted TF-IDF model, embeddings, and an optional trained NER model.
struct EngineState {
  KnowledgeGraph graph;
  std::shared_ptr<const Gazetteer> gazetteer;
  std::vector<Template> templates;
  TfIdfModel tfidf;
  EmbeddingTable embeddings;
  std::optional<NerModel> ner;
  EngineConfig config;
};

/// Assembles an engine: builds the gazetteer and fits TF-IDF on the
/// template set.
EngineState make_engine(KnowledgeGraph graph, std::vector<Template> templates,
                        EmbeddingTable embeddings, EngineConfig config = {},
                        std::optional<NerModel> ner = std::nullopt);

/// Gazetteer mentions, augmented (when configured) with non-overlapping
/// CRF mentions. Gazetteer matches win on conflicts.
std::vector<EntityMention> recognize(const EngineState& s, const std::vector<Token>& tokens);

enum class AnswerStatus { answered, no_results, no_entity, no_template_match };

std::string to_string(AnswerStatus status);

struct Answer {
  std::vector<std::string> entity_names;  // sorted; empty unless answered
  std::string text;                       // never empty
  AnswerStatus status = AnswerStatus::answered;
};

struct ParsedQuestion {
  std::string source;
  std::vector<Token> tokens;
  std::vector<EntityMention> mentions;
  MatchResult match;
  Template matched_template;
  std::string resolved_entity;   // entity id bound to the template slot
  std::string resolved_surface;  // the mention's surface text
};

/// tokenize -> recognize -> abstract -> match; binds the first mention whose
/// type equals the winning template's slot type and that resolves in the
/// graph. Throws NoEntityFound / NoTemplateMatch.
ParsedQuestion parse_question(const std::string& question, const EngineState& s);

/// One-hop lookup in the template's direction; results deduplicated and
/// sorted by (name, id).
std::vector<Entity> execute(const ParsedQuestion& p, const KnowledgeGraph& g);

/// Renders the template's answer surface, joining names as "a, b and c".
/// Empty results produce the fixed no-results sentence.
Answer generate_answer(const ParsedQuestion& p, const std::vector<Entity>& results);

/// parse -> execute -> generate; pipeline failures map to fixed-sentence
/// statuses instead of propagating. Total over valid state.
Answer answer(const std::string& question, const EngineState& s);

}  // namespace kgqa

#endif  // KGQA_QA_HPP
