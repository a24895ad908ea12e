#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coherency {

inline constexpr std::string_view kSubjectSlot = "[X]";
inline constexpr std::string_view kObjectSlot = "[Y]";

enum class RelType { OneToOne, NToOne, NToM };
enum class Direction { PredictSubject, PredictObject };

std::string_view to_string(RelType t);   // "1-1", "N-1", "N-M"
RelType parse_rel_type(std::string_view s);
std::string_view to_string(Direction d);

struct Relation {
  std::string id;
  std::string template_text;
  RelType rel_type = RelType::NToM;
  bool symmetric = false;
  std::optional<std::string> optimized_template;
  std::vector<std::string> paraphrases;
  std::optional<std::string> ar_object_last;
  std::optional<std::string> ar_subject_last;
};

using RelationSet = std::map<std::string, Relation>;

struct Triple {
  std::string subject;
  std::string object;
  std::string relation_id;
  std::optional<std::string> evidence;
};

struct LoadReport {
  std::size_t lines_read = 0;
  std::size_t duplicates = 0;
  std::size_t unknown_relation = 0;
};

// Relations plus their triples, grouped by relation id (ordered by id; triples
// keep file order within a relation). Immutable once built.
struct Corpus {
  RelationSet relations;
  std::map<std::string, std::vector<Triple>> triples;
  LoadReport report;

  std::size_t instance_count() const;
  // Relation ids that have at least one triple, in id order.
  std::vector<std::string> evaluable_relations() const;
  const Relation& relation(const std::string& id) const;

  // Adds a triple unless an equal (normalized) one is already present.
  // Returns false for duplicates.
  bool add(Triple t);

 private:
  std::set<std::string> seen_;
};

// Slot invariant for manual/optimized/paraphrase templates.
void validate_cloze_template(std::string_view tmpl, std::string_view what);
void validate_relation(const Relation& r);

Relation relation_from_json_line(std::string_view line);
std::string relation_to_json_line(const Relation& r);

RelationSet load_relations(const std::filesystem::path& path);

// triples_path may be a single line-delimited JSON file or a directory of
// per-relation files named <relation-id>.jsonl.
Corpus load_corpus(const std::filesystem::path& triples_path,
                   const std::filesystem::path& relations_path);

void write_triples(const Corpus& corpus, const std::filesystem::path& path);
void write_relations(const Corpus& corpus, const std::filesystem::path& path);

using EntitySet = std::set<std::string>;

class AnswerIndex {
 public:
  AnswerIndex() = default;
  explicit AnswerIndex(const Corpus& corpus);

  // Subjects s with (s, relation, object) in the corpus.
  const EntitySet& subjects_of(const std::string& relation_id, std::string_view object) const;
  // Objects o with (subject, relation, o) in the corpus.
  const EntitySet& objects_of(const std::string& relation_id, std::string_view subject) const;

 private:
  using Key = std::pair<std::string, std::string>;
  std::map<Key, EntitySet> by_object_;
  std::map<Key, EntitySet> by_subject_;
};

AnswerIndex build_answer_index(const Corpus& corpus);

// Entities the index marks correct for the query, minus `keep`
// (compared case-insensitively).
EntitySet exclusions(const AnswerIndex& index, const std::string& relation_id,
                     std::string_view query_entity, Direction direction,
                     std::string_view keep);

using EntityPredicate = std::function<bool(const std::string&)>;

// Keeps triples whose subject and object both pass. Relations that end up
// empty stay in the relation set but have no triples.
Corpus apply_entity_filter(const Corpus& corpus, const EntityPredicate& keep);

// Relation ids that had triples in `before` but none in `after`.
std::vector<std::string> emptied_relations(const Corpus& before, const Corpus& after);

// Materialized entity acceptance table. Entities missing from the table are rejected.
class EntityFilter {
 public:
  EntityFilter() = default;
  explicit EntityFilter(std::map<std::string, bool> table) : table_(std::move(table)) {}

  bool operator()(const std::string& entity) const;
  EntityPredicate predicate() const;
  const std::map<std::string, bool>& table() const { return table_; }

  void save(const std::filesystem::path& path) const;
  static EntityFilter load(const std::filesystem::path& path);

  bool operator==(const EntityFilter&) const = default;

 private:
  std::map<std::string, bool> table_;
};

std::vector<std::string> all_entities(const Corpus& corpus);

}  // namespace coherency
