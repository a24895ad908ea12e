#pragma once

#include <atomic>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "coherency/backend.hpp"
#include "coherency/corpus.hpp"
#include "coherency/prompting.hpp"
#include "coherency/rational.hpp"

namespace coherency {

// How the filtered setting picks the entities banned in each round's second query.
enum class ExclusionMode {
  Pivot,  // keyed by the model's first answer (the entity actually queried)
  Gold,   // keyed by the gold counterpart
  None,   // no banning
};

std::string_view to_string(ExclusionMode m);
ExclusionMode parse_exclusion_mode(std::string_view s);

// Typed-querying candidate set.
enum class CandidateScope { Relation, Corpus };

std::string_view to_string(CandidateScope s);
CandidateScope parse_candidate_scope(std::string_view s);

// Per-relation/per-direction entity lists used for typed querying.
class CandidatePools {
 public:
  CandidatePools(const Corpus& corpus, CandidateScope scope);
  const std::vector<std::string>& get(const std::string& relation_id, Direction d) const;

 private:
  CandidateScope scope_;
  std::map<std::string, std::vector<std::string>> subjects_, objects_;
  std::vector<std::string> all_;
};

struct EvalOptions {
  PromptMode mode = PromptMode::manual();
  int n_best = 10;
  bool use_evidence = false;
  EvidencePlacement evidence_placement = EvidencePlacement::AfterPrompt;
  ExclusionMode exclusion = ExclusionMode::Pivot;
  CandidateScope candidate_scope = CandidateScope::Relation;
  int parallelism = 0;  // 0: OpenMP default
  // Paraphrase index per relation; overrides mode.paraphrase_index.
  std::map<std::string, std::size_t> paraphrase_choice;
  std::shared_ptr<const CandidatePools> candidates;  // built on demand when null
  const std::atomic<bool>* cancel = nullptr;
};

struct StepRecord {
  std::string prompt;
  std::string query_entity;
  std::optional<std::string> answer;  // empty optional: no prediction
  int rank = 0;
  std::size_t banned = 0;  // size of the banned set for this query

  bool no_prediction() const { return !answer.has_value(); }
  bool operator==(const StepRecord&) const = default;
};

struct RoundRecord {
  StepRecord first;
  StepRecord second;
  bool coherent = false;

  bool operator==(const RoundRecord&) const = default;
};

struct InstanceResult {
  std::string relation_id;
  std::size_t triple_index = 0;
  std::string subject;
  std::string object;
  RoundRecord round1;  // subject -> O' -> S'
  RoundRecord round2;  // object -> S' -> O'
  bool c1 = false;
  bool c2 = false;
  bool all_correct = false;

  bool operator==(const InstanceResult&) const = default;
};

struct Counts {
  std::size_t instances = 0;
  std::size_t round1 = 0;
  std::size_t round2 = 0;
  std::size_t c1 = 0;
  std::size_t c2 = 0;
  std::size_t all_correct = 0;

  void add(const InstanceResult& r);
  bool operator==(const Counts&) const = default;
};

struct RelationScore {
  std::string relation_id;
  RelType rel_type = RelType::NToM;
  bool symmetric = false;
  Counts counts;

  Rational round1() const;
  Rational round2() const;
  Rational avg() const;
  Rational c1() const;
  Rational c2() const;
  Rational all_correct() const;
};

struct TypeAggregate {
  std::string label;  // "1-1", "N-1", "N-M", "symmetric", "All"
  std::size_t relations = 0;
  std::size_t instances = 0;
  Rational round1, round2, avg;  // macro over the type's relations
};

struct SkipCounts {
  std::size_t missing_template = 0;
  std::size_t missing_evidence = 0;

  bool operator==(const SkipCounts&) const = default;
};

struct CoherencyReport {
  std::vector<RelationScore> relations;  // id order; only relations with instances
  Rational round1, round2, avg;
  Rational c1, c2, all_correct;
  std::vector<TypeAggregate> per_type;   // 1-1, N-1, N-M, symmetric, All
  std::size_t total_instances = 0;
  SkipCounts skipped;
  nlohmann::json fingerprint;
};

struct EvaluationResult {
  CoherencyReport report;
  std::vector<InstanceResult> instances;  // sorted by (relation_id, triple_index)
};

// One instance through both rounds. Throws DataError if the relation lacks the
// template the mode needs or evidence is required but absent.
InstanceResult evaluate_instance(const Backend& backend, const Relation& relation,
                                 const Triple& triple, std::size_t triple_index,
                                 const AnswerIndex& index, const EvalOptions& options);

// Instances run in parallel (OpenMP, bounded by options.parallelism).
// Throws EmptyResultError when no relation has an evaluable instance.
EvaluationResult evaluate_corpus(const Backend& backend, const Corpus& corpus,
                                 const AnswerIndex& index, const EvalOptions& options);

// Single-threaded reference; same results as evaluate_corpus.
EvaluationResult evaluate_corpus_serial(const Backend& backend, const Corpus& corpus,
                                        const AnswerIndex& index, const EvalOptions& options);

// Deterministic fold of instance results into a report.
CoherencyReport aggregate(const Corpus& corpus, std::span<const InstanceResult> instances,
                          SkipCounts skipped = {});

// Macro, per-type and total rows from per-relation counts.
CoherencyReport summarize_relations(std::vector<RelationScore> relations, SkipCounts skipped = {});

// Macro mean of a per-relation quantity.
template <class F>
Rational macro_mean(std::span<const RelationScore> rels, F f) {
  Rational sum = 0;
  if (rels.empty()) return sum;
  for (const auto& r : rels) sum += f(r);
  return sum / static_cast<long long>(rels.size());
}

// ---------------------------------------------------------------- sweep

struct SweepRelation {
  std::string relation_id;
  std::vector<std::size_t> template_index;  // per run
  std::vector<Counts> counts;               // per run
  Rational min, avg, max;                   // over runs of the per-run average coherency
  double stddev = 0.0;                      // population
};

struct SweepReport {
  std::size_t runs = 0;
  std::uint64_t seed = 0;
  std::size_t instances_per_run = 0;
  std::vector<SweepRelation> relations;
  Rational macro_min, macro_avg, macro_max;  // macro over per-relation min/avg/max
  std::vector<Rational> run_macro;           // macro avg coherency of each run
  Rational run_min, run_avg, run_max;        // over run_macro
  std::vector<std::string> excluded_relations;  // no paraphrases
  nlohmann::json fingerprint;
};

SweepReport paraphrase_sweep(const Backend& backend, const Corpus& corpus,
                             const AnswerIndex& index, std::size_t runs, std::uint64_t seed,
                             EvalOptions options = {});

// Recomputes min/avg/max/stddev and the macro rows from the per-run counts.
void finalize_sweep(SweepReport& report);

}  // namespace coherency
