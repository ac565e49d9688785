#ifndef KGQA_KG_HPP
#define KGQA_KG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kgqa {

struct Entity {
  std::string id;
  std::string name;
  std::string etype;

  bool operator==(const Entity&) const = default;
};

struct Triple {
  std::string subject;   // entity id
  std::string relation;  // relation-type label
  std::string object;    // entity id

  auto operator<=>(const Triple&) const = default;
};

struct ImportReport {
  std::int64_t entities_added = 0;
  std::int64_t triples_added = 0;
  std::int64_t duplicate_entities_skipped = 0;
  std::int64_t duplicate_triples_skipped = 0;
  std::int64_t malformed_lines = 0;
};

struct GraphStats {
  std::int64_t entity_count = 0;
  std::int64_t triple_count = 0;
  std::int64_t entity_type_count = 0;
  std::int64_t relation_type_count = 0;

  bool operator==(const GraphStats&) const = default;
};

/// In-memory triple store. Entities are deduplicated by (normalized name,
/// entity type); the id of the first inserted entity for a key survives.
/// Build single-writer, then share freely: queries never mutate.
class KnowledgeGraph {
 public:
  /// Inserts e unless an entity with the same dedup key exists (returns
  /// false). Throws ConflictingId when e.id is already bound to a different
  /// (name, etype).
  bool add_entity(const Entity& e);

  /// Inserts t; returns false on duplicate. Both endpoints must already be
  /// present (UnknownEntity otherwise).
  bool add_triple(const Triple& t);

  /// Bulk-loads the tab-separated triples format. Malformed rows are counted
  /// and skipped; only stream failure aborts (IoFailure, partial state kept).
  ImportReport import_tsv(std::istream& in);

  /// Writes the same format, records sorted by (subject id, relation,
  /// object id).
  void export_tsv(std::ostream& out) const;

  /// All triples matching every bound field. Names are resolved through the
  /// normalized-name index; a bound name with no entity raises UnknownName,
  /// while a resolvable name with no matching triples yields an empty list.
  /// Output is sorted by (subject id, relation, object id).
  std::vector<Triple> query(const std::optional<std::string>& subject_name,
                            const std::optional<std::string>& relation,
                            const std::optional<std::string>& object_name) const;

  GraphStats stats() const;

  // Lookups used by the answering pipeline.
  const Entity* find_entity(const std::string& id) const;
  std::optional<std::string> canonical_id(const std::string& name,
                                          const std::string& etype) const;
  /// Ids of entities whose normalized name equals normalize(name), sorted.
  std::vector<std::string> ids_for_name(const std::string& name) const;
  std::vector<std::string> objects_of(const std::string& subject_id,
                                      const std::string& relation) const;
  std::vector<std::string> subjects_of(const std::string& object_id,
                                       const std::string& relation) const;

  const std::map<std::string, Entity>& entities() const { return entities_; }
  const std::set<Triple>& triples() const { return triples_; }

 private:
  bool conflicts(const Entity& e) const;

  std::map<std::string, Entity> entities_;  // id -> entity
  std::set<Triple> triples_;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> index_sr_;
  std::map<std::pair<std::string, std::string>, std::set<std::string>> index_or_;
  std::unordered_map<std::string, std::vector<std::string>> name_index_;
  std::map<std::pair<std::string, std::string>, std::string> dedup_;
};

/// Union of two graphs under the entity dedup key and the triple key.
/// Triples of g2 are re-homed onto surviving entity ids.
std::pair<KnowledgeGraph, ImportReport> merge(const KnowledgeGraph& g1,
                                              const KnowledgeGraph& g2);

}  // namespace kgqa

#endif  // KGQA_KG_HPP
