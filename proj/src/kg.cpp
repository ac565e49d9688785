#include "kgqa/kg.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>
#include <sstream>

#include "kgqa/errors.hpp"
#include "kgqa/text.hpp"

namespace kgqa {
namespace {

std::pair<std::string, std::string> dedup_key(const Entity& e) {
  return {normalize(e.name), e.etype};
}

// Splits a record line into exactly `n` TAB-separated fields; nullopt when
// the count is off or any field is empty.
std::optional<std::array<std::string, 7>> split_record(const std::string& line) {
  std::array<std::string, 7> fields;
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
  for (const std::string& f : fields) {
    if (f.empty()) return std::nullopt;
  }
  return fields;
}

bool is_comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == '\r') continue;
    return c == '#';
  }
  return true;
}

}  // namespace

bool KnowledgeGraph::conflicts(const Entity& e) const {
  const auto it = entities_.find(e.id);
  return it != entities_.end() && dedup_key(it->second) != dedup_key(e);
}

bool KnowledgeGraph::add_entity(const Entity& e) {
  if (conflicts(e)) {
    throw ConflictingId("entity id '" + e.id + "' already bound to ('" +
                        entities_.at(e.id).name + "', '" + entities_.at(e.id).etype + "')");
  }
  const auto key = dedup_key(e);
  if (dedup_.contains(key)) return false;
  entities_.emplace(e.id, e);
  dedup_.emplace(key, e.id);
  auto& ids = name_index_[key.first];
  ids.insert(std::lower_bound(ids.begin(), ids.end(), e.id), e.id);
  return true;
}

bool KnowledgeGraph::add_triple(const Triple& t) {
  if (!entities_.contains(t.subject)) {
    throw UnknownEntity("triple subject id '" + t.subject + "' not in graph");
  }
  if (!entities_.contains(t.object)) {
    throw UnknownEntity("triple object id '" + t.object + "' not in graph");
  }
  if (!triples_.insert(t).second) return false;
  index_sr_[{t.subject, t.relation}].insert(t.object);
  index_or_[{t.object, t.relation}].insert(t.subject);
  return true;
}

ImportReport KnowledgeGraph::import_tsv(std::istream& in) {
  ImportReport report;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_comment_or_blank(line)) continue;

    const auto fields = split_record(line);
    if (!fields) {
      ++report.malformed_lines;
      continue;
    }
    const Entity subject{(*fields)[0], (*fields)[1], (*fields)[2]};
    const Entity object{(*fields)[4], (*fields)[5], (*fields)[6]};
    const std::string& relation = (*fields)[3];
    // A row whose id is already bound to a different entity cannot be
    // applied; count it malformed rather than aborting the load.
    if (conflicts(subject) || conflicts(object)) {
      ++report.malformed_lines;
      continue;
    }

    for (const Entity& e : {subject, object}) {
      if (add_entity(e)) {
        ++report.entities_added;
      } else {
        ++report.duplicate_entities_skipped;
      }
    }
    // Endpoints re-home onto the surviving id for their dedup key.
    const Triple t{*canonical_id(subject.name, subject.etype), relation,
                   *canonical_id(object.name, object.etype)};
    if (add_triple(t)) {
      ++report.triples_added;
    } else {
      ++report.duplicate_triples_skipped;
    }
  }
  if (in.bad()) throw IoFailure("stream error while importing triples");
  return report;
}

void KnowledgeGraph::export_tsv(std::ostream& out) const {
  for (const Triple& t : triples_) {
    const Entity& s = entities_.at(t.subject);
    const Entity& o = entities_.at(t.object);
    out << s.id << '\t' << s.name << '\t' << s.etype << '\t' << t.relation << '\t' << o.id << '\t'
        << o.name << '\t' << o.etype << '\n';
  }
  if (!out) throw IoFailure("stream error while exporting triples");
}

std::vector<Triple> KnowledgeGraph::query(const std::optional<std::string>& subject_name,
                                          const std::optional<std::string>& relation,
                                          const std::optional<std::string>& object_name) const {
  const auto resolve = [&](const std::string& name) {
    std::vector<std::string> ids = ids_for_name(name);
    if (ids.empty()) throw UnknownName("no entity named '" + name + "'");
    return ids;
  };
  std::optional<std::vector<std::string>> subject_ids;
  std::optional<std::vector<std::string>> object_ids;
  if (subject_name) subject_ids = resolve(*subject_name);
  if (object_name) object_ids = resolve(*object_name);

  const auto id_ok = [](const std::optional<std::vector<std::string>>& ids, const std::string& id) {
    return !ids || std::binary_search(ids->begin(), ids->end(), id);
  };

  std::vector<Triple> out;
  if (subject_ids && relation) {
    for (const std::string& sid : *subject_ids) {
      const auto it = index_sr_.find({sid, *relation});
      if (it == index_sr_.end()) continue;
      for (const std::string& oid : it->second) {
        if (id_ok(object_ids, oid)) out.push_back({sid, *relation, oid});
      }
    }
  } else if (object_ids && relation) {
    for (const std::string& oid : *object_ids) {
      const auto it = index_or_.find({oid, *relation});
      if (it == index_or_.end()) continue;
      for (const std::string& sid : it->second) {
        out.push_back({sid, *relation, oid});
      }
    }
  } else {
    for (const Triple& t : triples_) {
      if (!id_ok(subject_ids, t.subject)) continue;
      if (relation && t.relation != *relation) continue;
      if (!id_ok(object_ids, t.object)) continue;
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

GraphStats KnowledgeGraph::stats() const {
  GraphStats s;
  s.entity_count = static_cast<std::int64_t>(entities_.size());
  s.triple_count = static_cast<std::int64_t>(triples_.size());
  std::set<std::string> etypes;
  for (const auto& [id, e] : entities_) etypes.insert(e.etype);
  s.entity_type_count = static_cast<std::int64_t>(etypes.size());
  std::set<std::string> relations;
  for (const Triple& t : triples_) relations.insert(t.relation);
  s.relation_type_count = static_cast<std::int64_t>(relations.size());
  return s;
}

const Entity* KnowledgeGraph::find_entity(const std::string& id) const {
  const auto it = entities_.find(id);
  return it == entities_.end() ? nullptr : &it->second;
}

std::optional<std::string> KnowledgeGraph::canonical_id(const std::string& name,
                                                        const std::string& etype) const {
  const auto it = dedup_.find({normalize(name), etype});
  if (it == dedup_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> KnowledgeGraph::ids_for_name(const std::string& name) const {
  const auto it = name_index_.find(normalize(name));
  if (it == name_index_.end()) return {};
  return it->second;
}

std::vector<std::string> KnowledgeGraph::objects_of(const std::string& subject_id,
                                                    const std::string& relation) const {
  const auto it = index_sr_.find({subject_id, relation});
  if (it == index_sr_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<std::string> KnowledgeGraph::subjects_of(const std::string& object_id,
                                                     const std::string& relation) const {
  const auto it = index_or_.find({object_id, relation});
  if (it == index_or_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::pair<KnowledgeGraph, ImportReport> merge(const KnowledgeGraph& g1, const KnowledgeGraph& g2) {
  KnowledgeGraph out = g1;
  ImportReport report;
  for (const auto& [id, e] : g2.entities()) {
    if (out.canonical_id(e.name, e.etype)) {
      ++report.duplicate_entities_skipped;
      continue;
    }
    // Ids are only unique per source graph. When g2 reuses an id that g1
    // bound to a different entity, keep the entity under a fresh suffixed
    // id; triples re-home through the dedup key either way.
    Entity insert = e;
    for (int k = 2; out.find_entity(insert.id) != nullptr; ++k) {
      insert.id = e.id + "_" + std::to_string(k);
    }
    out.add_entity(insert);
    ++report.entities_added;
  }
  for (const Triple& t : g2.triples()) {
    const Entity& s = *g2.find_entity(t.subject);
    const Entity& o = *g2.find_entity(t.object);
    const Triple rehomed{*out.canonical_id(s.name, s.etype), t.relation,
                         *out.canonical_id(o.name, o.etype)};
    if (out.add_triple(rehomed)) {
      ++report.triples_added;
    } else {
      ++report.duplicate_triples_skipped;
    }
  }
  return {std::move(out), report};
}

}  // namespace kgqa
