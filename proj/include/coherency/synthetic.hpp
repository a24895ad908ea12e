#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "coherency/backend.hpp"
#include "coherency/corpus.hpp"

namespace coherency {

enum class BehaviorKind { Perfect, ReversalCursed, Echo, FixedAnswer, UniformRandom };

struct Behavior {
  BehaviorKind kind = BehaviorKind::Perfect;
  std::string fixed_entity;  // FixedAnswer only

  bool operator==(const Behavior&) const = default;
};

std::string_view to_string(BehaviorKind k);
nlohmann::json to_json(const Behavior& b);
Behavior behavior_from_json(const nlohmann::json& j);

// A generated fact base plus the answering policy of the synthetic backend.
//
// Perfect        answers both directions from the facts, counterparts in
//                lexicographic order (so it is order-biased on N-1/N-M).
// ReversalCursed answers object queries from the facts and subject queries
//                uniformly from the relation's non-banned subject pool.
// Echo           answers object queries from the facts and returns the query
//                entity for subject queries.
// FixedAnswer    always returns one entity.
// UniformRandom  uniform over the non-banned slot pool in both directions.
//
// Prompts rendered from a template listed in poisoned_templates are answered
// with Echo semantics regardless of behavior.
struct SyntheticKB {
  Corpus facts;
  Behavior behavior;
  std::uint64_t seed = 0;
  BackendCapabilities capabilities;
  std::vector<std::string> poisoned_templates;
};

struct SyntheticRelationSpec {
  std::string id;
  RelType rel_type = RelType::OneToOne;
  bool symmetric = false;
  int facts = 10;     // 1-1: pairs; N-M: edges; symmetric: unordered pairs
  int fan_in = 5;     // N-1: subjects per object
  int objects = 4;    // N-1: distinct objects
  int subjects = 0;   // N-M pool sizes (0 = derive from facts)
  int object_pool = 0;
  int entities = 0;   // symmetric pool size (0 = derive)
};

struct SyntheticKBConfig {
  std::uint64_t seed = 0;
  Behavior behavior;
  BackendCapabilities capabilities;
  std::vector<SyntheticRelationSpec> relations;
  int paraphrases = 2;
  bool optimized = true;
  bool autoregressive = true;
  bool evidence = true;
  std::vector<std::string> poisoned_templates;
};

SyntheticKBConfig synthetic_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticKBConfig& c);

// Deterministic in config.seed. Throws ConfigError for infeasible cardinalities.
SyntheticKB generate_synthetic(const SyntheticKBConfig& config);

nlohmann::json to_json(const SyntheticKB& kb);
SyntheticKB synthetic_kb_from_json(const nlohmann::json& j);
void save_kb(const SyntheticKB& kb, const std::filesystem::path& path);
// Accepts either a KB file or a generator config.
SyntheticKB load_kb(const std::filesystem::path& path);

// In-process backend answering from a SyntheticKB. Randomness per request is
// derived from (seed, request fingerprint), so results do not depend on call order.
class SyntheticBackend final : public Backend {
 public:
  explicit SyntheticBackend(std::shared_ptr<const SyntheticKB> kb);

  BackendCapabilities capabilities() const override { return kb_->capabilities; }
  std::vector<Prediction> predict(const PredictRequest& request) const override;
  std::vector<double> score(std::string_view prompt_prefix,
                            std::span<const std::string> candidates) const override;
  int token_count(std::string_view text) const override;
  std::string identity() const override;

  const SyntheticKB& kb() const { return *kb_; }

  struct Query {
    std::string relation_id;
    Direction direction = Direction::PredictObject;
    std::string entity;
    bool poisoned = false;
  };
  // Recovers (relation, direction, known entity) from a rendered prompt.
  std::optional<Query> parse_cloze(std::string_view text, std::string_view marker) const;
  std::optional<Query> parse_prefix(std::string_view text) const;

 private:
  struct Pattern {
    std::string relation_id;
    Direction direction;
    bool poisoned;
    bool known_first;   // known entity precedes the unknown slot
    std::string head;   // text before the first slot
    std::string middle; // text between the slots
    std::string tail;   // text after the second slot (empty for prefixes)
  };

  std::optional<Query> choose(std::vector<std::pair<const Pattern*, std::string>>& found) const;
  std::vector<std::string> counterparts(const Query& q) const;
  const std::vector<std::string>& pool(const Query& q) const;
  BehaviorKind effective(const Query& q) const;

  std::shared_ptr<const SyntheticKB> kb_;
  std::vector<Pattern> cloze_;
  std::vector<Pattern> prefixes_;
  std::unordered_set<std::string> entities_;
  std::map<std::string, std::vector<std::string>> subject_pool_, object_pool_;
  AnswerIndex index_;
};

}  // namespace coherency
