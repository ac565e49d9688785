#include "kgqa/qa.hpp"

#include <algorithm>

#include "kgqa/errors.hpp"

namespace kgqa {
namespace {

bool spans_overlap(std::pair<int, int> a, std::pair<int, int> b) {
  return a.first <= b.second && b.first <= a.second;
}

// "a", "a and b", "a, b and c" — no Oxford comma.
std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) out += (i + 1 == names.size()) ? " and " : ", ";
    out += names[i];
  }
  return out;
}

std::string substitute(std::string text, const std::string& hole, const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(hole, pos)) != std::string::npos) {
    text.replace(pos, hole.size(), value);
    pos += value.size();
  }
  return text;
}

}  // namespace

std::string to_string(AnswerStatus status) {
  switch (status) {
    case AnswerStatus::answered:
      return "answered";
    case AnswerStatus::no_results:
      return "no-results";
    case AnswerStatus::no_entity:
      return "no-entity";
    case AnswerStatus::no_template_match:
      return "no-template-match";
  }
  return "unknown";
}

EngineState make_engine(KnowledgeGraph graph, std::vector<Template> templates,
                        EmbeddingTable embeddings, EngineConfig config,
                        std::optional<NerModel> ner) {
  if (templates.empty()) throw NoTemplates("the engine needs at least one template");
  EngineState s;
  s.graph = std::move(graph);
  s.templates = std::move(templates);
  s.embeddings = std::move(embeddings);
  s.ner = std::move(ner);
  s.config = config;
  s.tfidf = fit_template_tfidf(s.templates);
  s.gazetteer = std::make_shared<Gazetteer>(s.graph);
  if (s.ner && !s.ner->emissions.gazetteer) s.ner->emissions.gazetteer = s.gazetteer;
  return s;
}

std::vector<EntityMention> recognize(const EngineState& s, const std::vector<Token>& tokens) {
  if (tokens.empty()) return {};
  std::vector<EntityMention> mentions = s.gazetteer->tag(tokens);
  if (s.config.use_crf && s.ner) {
    const std::vector<std::string> texts = token_texts(tokens);
    const EmissionScores e = score_emissions(s.ner->emissions, texts, s.ner->labels);
    const TagSequence ts = viterbi(e, constrain_bio(s.ner->transitions, s.ner->labels), s.ner->labels);
    for (EntityMention& m : decode_mentions(texts, ts, s.ner->labels)) {
      const bool clashes = std::any_of(mentions.begin(), mentions.end(), [&](const EntityMention& g) {
        return spans_overlap(g.token_span, m.token_span);
      });
      if (clashes) continue;  // dictionary matches are authoritative
      if (const auto id = s.graph.canonical_id(m.text, m.label)) m.entity_id = *id;
      mentions.push_back(std::move(m));
    }
    std::sort(mentions.begin(), mentions.end(), [](const EntityMention& a, const EntityMention& b) {
      return a.token_span < b.token_span;
    });
  }
  return mentions;
}

ParsedQuestion parse_question(const std::string& question, const EngineState& s) {
  ParsedQuestion p;
  p.source = question;
  p.tokens = tokenize(question);
  p.mentions = recognize(s, p.tokens);
  if (p.mentions.empty()) {
    throw NoEntityFound("no known entity in '" + question + "'");
  }
  const std::vector<std::string> abstracted = abstract_question(p.tokens, p.mentions);
  p.match = best_template(abstracted, s.templates, s.tfidf, s.embeddings, s.config.alpha,
                          s.config.threshold);
  if (!p.match.passed) {
    throw NoTemplateMatch("best template " + p.match.template_id + " scored below threshold");
  }
  const auto it = std::find_if(s.templates.begin(), s.templates.end(),
                               [&](const Template& t) { return t.id == p.match.template_id; });
  p.matched_template = *it;

  bool type_seen = false;
  for (const EntityMention& m : p.mentions) {
    if (m.label != p.matched_template.subject_type) continue;
    type_seen = true;
    std::string id = m.entity_id;
    if (id.empty()) {
      if (const auto resolved = s.graph.canonical_id(m.text, m.label)) id = *resolved;
    }
    if (id.empty()) continue;
    p.resolved_entity = id;
    p.resolved_surface = m.text;
    break;
  }
  if (p.resolved_entity.empty()) {
    if (type_seen) {
      throw NoEntityFound("mention of type '" + p.matched_template.subject_type +
                          "' does not resolve to a stored entity");
    }
    throw NoTemplateMatch("no mention matches the template slot type '" +
                          p.matched_template.subject_type + "'");
  }
  return p;
}

std::vector<Entity> execute(const ParsedQuestion& p, const KnowledgeGraph& g) {
  const std::vector<std::string> ids =
      p.matched_template.direction == Direction::forward
          ? g.objects_of(p.resolved_entity, p.matched_template.relation)
          : g.subjects_of(p.resolved_entity, p.matched_template.relation);
  std::vector<Entity> out;
  out.reserve(ids.size());
  for (const std::string& id : ids) out.push_back(*g.find_entity(id));
  std::sort(out.begin(), out.end(), [](const Entity& a, const Entity& b) {
    return std::tie(a.name, a.id) < std::tie(b.name, b.id);
  });
  return out;
}

Answer generate_answer(const ParsedQuestion& p, const std::vector<Entity>& results) {
  Answer a;
  if (results.empty()) {
    a.status = AnswerStatus::no_results;
    a.text = "I found no " + p.matched_template.relation + " information for " +
             p.resolved_surface + " in the knowledge graph.";
    return a;
  }
  a.status = AnswerStatus::answered;
  for (const Entity& e : results) a.entity_names.push_back(e.name);
  a.text = substitute(substitute(p.matched_template.answer_surface, "{entity}", p.resolved_surface),
                      "{list}", join_names(a.entity_names));
  return a;
}

Answer answer(const std::string& question, const EngineState& s) {
  ParsedQuestion p;
  try {
    p = parse_question(question, s);
  } catch (const NoEntityFound&) {
    return {{}, "I could not find a known entity in that question.", AnswerStatus::no_entity};
  } catch (const NoTemplateMatch&) {
    return {{},
            "I could not match that question to any known question pattern.",
            AnswerStatus::no_template_match};
  }
  return generate_answer(p, execute(p, s.graph));
}

}  // namespace kgqa
