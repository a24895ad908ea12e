#include "coherency/engine.hpp"

#include <algorithm>
#include <exception>
#include <mutex>

#include <omp.h>

#include "coherency/errors.hpp"
#include "coherency/text.hpp"

namespace coherency {

std::string_view to_string(ExclusionMode m) {
  switch (m) {
    case ExclusionMode::Pivot: return "pivot";
    case ExclusionMode::Gold: return "gold";
    case ExclusionMode::None: return "none";
  }
  return "?";
}

ExclusionMode parse_exclusion_mode(std::string_view s) {
  if (s == "pivot") return ExclusionMode::Pivot;
  if (s == "gold") return ExclusionMode::Gold;
  if (s == "none") return ExclusionMode::None;
  throw ConfigError("unknown exclusion mode '" + std::string(s) + "' (pivot, gold, none)");
}

std::string_view to_string(CandidateScope s) {
  return s == CandidateScope::Relation ? "relation" : "corpus";
}

CandidateScope parse_candidate_scope(std::string_view s) {
  if (s == "relation") return CandidateScope::Relation;
  if (s == "corpus") return CandidateScope::Corpus;
  throw ConfigError("unknown candidate scope '" + std::string(s) + "' (relation, corpus)");
}

std::string format_percent(const Rational& value) {
  using boost::multiprecision::cpp_int;
  // half-up: floor(value * 10000 + 1/2)
  const Rational scaled = value * 10000 + Rational(1, 2);
  cpp_int n = boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
  if (scaled < 0 && n * boost::multiprecision::denominator(scaled) != boost::multiprecision::numerator(scaled))
    n -= 1;
  const bool negative = n < 0;
  if (negative) n = -n;
  const cpp_int whole = n / 100, frac = n % 100;
  std::string f = frac.str();
  if (f.size() < 2) f.insert(0, 2 - f.size(), '0');
  return (negative ? "-" : "") + whole.str() + "." + f;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

CandidatePools::CandidatePools(const Corpus& corpus, CandidateScope scope) : scope_(scope) {
  std::set<std::string> all;
  for (const auto& [id, ts] : corpus.triples) {
    std::set<std::string> subs, objs;
    for (const auto& t : ts) {
      subs.insert(t.subject);
      objs.insert(t.object);
      all.insert(t.subject);
      all.insert(t.object);
    }
    subjects_[id].assign(subs.begin(), subs.end());
    objects_[id].assign(objs.begin(), objs.end());
  }
  all_.assign(all.begin(), all.end());
}

const std::vector<std::string>& CandidatePools::get(const std::string& relation_id, Direction d) const {
  static const std::vector<std::string> kEmpty;
  if (scope_ == CandidateScope::Corpus) return all_;
  const auto& m = d == Direction::PredictSubject ? subjects_ : objects_;
  auto it = m.find(relation_id);
  return it == m.end() ? kEmpty : it->second;
}

// ---------------------------------------------------------------- instance

namespace {

PromptMode mode_for(const Relation& relation, const EvalOptions& options) {
  PromptMode mode = options.mode;
  if (mode.kind == PromptKind::Paraphrase) {
    if (auto it = options.paraphrase_choice.find(relation.id); it != options.paraphrase_choice.end())
      mode.paraphrase_index = it->second;
  }
  return mode;
}

bool relation_supports(const Relation& relation, const EvalOptions& options) {
  const PromptMode mode = mode_for(relation, options);
  return template_for(relation, mode, Direction::PredictObject) != nullptr &&
         template_for(relation, mode, Direction::PredictSubject) != nullptr;
}

class InstanceRunner {
 public:
  InstanceRunner(const Backend& backend, const Relation& relation, const Triple& triple,
                 const AnswerIndex& index, const EvalOptions& options)
      : backend_(backend),
        caps_(backend.capabilities()),
        relation_(relation),
        triple_(triple),
        index_(index),
        options_(options),
        mode_(mode_for(relation, options)) {
    if (!relation_supports(relation, options))
      throw DataError("relation " + relation.id + " has no " + describe(mode_) + " template");
    if (options.use_evidence && !triple.evidence)
      throw DataError("triple (" + triple.subject + ", " + relation.id + ", " + triple.object +
                      ") has no evidence");
    if (mode_.kind == PromptKind::Autoregressive && !options.candidates)
      throw ConfigError("typed querying needs candidate pools");
    if (mode_.kind != PromptKind::Autoregressive && caps_.kind == BackendKind::Autoregressive)
      throw ConfigError("autoregressive backends are queried with autoregressive prompts only");
  }

  StepRecord step(const std::string& known, Direction direction, const EntitySet& banned) const {
    StepRecord rec;
    rec.query_entity = known;
    rec.banned = banned.size();
    const bool typed = mode_.kind == PromptKind::Autoregressive;
    RenderedPrompt prompt = render(relation_, known, direction, typed ? "" : caps_.mask_marker, mode_);
    if (options_.use_evidence) prompt = attach_evidence(std::move(prompt), *triple_.evidence,
                                                        options_.evidence_placement);
    rec.prompt = prompt.text;

    if (typed) {
      std::set<std::string> banned_keys;
      for (const auto& b : banned) banned_keys.insert(normalize_entity(b));
      std::vector<std::string> cands;
      for (const auto& c : options_.candidates->get(relation_.id, direction))
        if (!banned_keys.count(normalize_entity(c))) cands.push_back(c);
      if (cands.empty()) return rec;
      const auto scored = score_candidates(backend_, prompt, cands);
      std::size_t best = 0;
      for (std::size_t i = 1; i < scored.size(); ++i)
        if (scored[i].second > scored[best].second) best = i;
      rec.answer = clean_prediction(scored[best].first);
      rec.rank = 1;
    } else {
      const auto preds = predict(backend_, prompt, banned, options_.n_best);
      for (const auto& p : preds) {
        std::string a = clean_prediction(p.text);
        if (a.empty()) continue;
        rec.answer = std::move(a);
        rec.rank = p.rank;
        break;
      }
    }
    if (rec.answer && rec.answer->empty()) rec.answer.reset();
    return rec;
  }

  EntitySet banned_for(const std::string& pivot, const std::string& gold_counterpart,
                       Direction second_direction, const std::string& keep) const {
    switch (options_.exclusion) {
      case ExclusionMode::Pivot:
        return exclusions(index_, relation_.id, pivot, second_direction, keep);
      case ExclusionMode::Gold:
        return exclusions(index_, relation_.id, gold_counterpart, second_direction, keep);
      case ExclusionMode::None:
        return {};
    }
    return {};
  }

  RoundRecord round(const std::string& start, const std::string& gold_start_counterpart,
                    Direction first_direction, const std::string& target) const {
    const Direction second_direction = first_direction == Direction::PredictObject
                                           ? Direction::PredictSubject
                                           : Direction::PredictObject;
    RoundRecord r;
    r.first = step(start, first_direction, {});
    if (!r.first.answer) return r;
    const EntitySet banned =
        banned_for(*r.first.answer, gold_start_counterpart, second_direction, target);
    r.second = step(*r.first.answer, second_direction, banned);
    r.coherent = r.second.answer && partial_match(*r.second.answer, target);
    return r;
  }

  void cancel_check() const {
    if (options_.cancel && options_.cancel->load(std::memory_order_relaxed)) throw Cancelled();
  }

  InstanceResult run(std::size_t triple_index) const {
    cancel_check();
    InstanceResult res;
    res.relation_id = relation_.id;
    res.triple_index = triple_index;
    res.subject = triple_.subject;
    res.object = triple_.object;
    // round 1: S -> O' -> S'; round 2: O -> S' -> O'
    res.round1 = round(triple_.subject, triple_.object, Direction::PredictObject, triple_.subject);
    cancel_check();
    res.round2 = round(triple_.object, triple_.subject, Direction::PredictSubject, triple_.object);
    auto hit = [](const StepRecord& s, const std::string& gold) {
      return s.answer && partial_match(*s.answer, gold);
    };
    res.c1 = hit(res.round1.first, triple_.object);
    res.c2 = hit(res.round2.first, triple_.subject);
    res.all_correct = res.c1 && hit(res.round1.second, triple_.subject) && res.c2 &&
                      hit(res.round2.second, triple_.object);
    return res;
  }

 private:
  const Backend& backend_;
  BackendCapabilities caps_;
  const Relation& relation_;
  const Triple& triple_;
  const AnswerIndex& index_;
  const EvalOptions& options_;
  PromptMode mode_;
};

struct Job {
  const Relation* relation;
  const Triple* triple;
  std::size_t triple_index;
};

EvalOptions with_pools(const Corpus& corpus, EvalOptions options) {
  if (options.mode.kind == PromptKind::Autoregressive && !options.candidates)
    options.candidates = std::make_shared<CandidatePools>(corpus, options.candidate_scope);
  return options;
}

std::vector<Job> plan(const Corpus& corpus, const EvalOptions& options, SkipCounts& skipped) {
  std::vector<Job> jobs;
  for (const auto& [id, ts] : corpus.triples) {
    if (ts.empty()) continue;
    const Relation& rel = corpus.relation(id);
    if (!relation_supports(rel, options)) {
      skipped.missing_template += ts.size();
      continue;
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (options.use_evidence && !ts[i].evidence) {
        ++skipped.missing_evidence;
        continue;
      }
      jobs.push_back({&rel, &ts[i], i});
    }
  }
  if (jobs.empty()) throw EmptyResultError("0 evaluable relations");
  return jobs;
}

}  // namespace

InstanceResult evaluate_instance(const Backend& backend, const Relation& relation,
                                 const Triple& triple, std::size_t triple_index,
                                 const AnswerIndex& index, const EvalOptions& options) {
  return InstanceRunner(backend, relation, triple, index, options).run(triple_index);
}

EvaluationResult evaluate_corpus_serial(const Backend& backend, const Corpus& corpus,
                                        const AnswerIndex& index, const EvalOptions& options_in) {
  const EvalOptions options = with_pools(corpus, options_in);
  SkipCounts skipped;
  const std::vector<Job> jobs = plan(corpus, options, skipped);
  std::vector<InstanceResult> results;
  results.reserve(jobs.size());
  for (const auto& job : jobs)
    results.push_back(evaluate_instance(backend, *job.relation, *job.triple, job.triple_index,
                                        index, options));
  EvaluationResult out;
  out.report = aggregate(corpus, results, skipped);
  out.instances = std::move(results);
  return out;
}

EvaluationResult evaluate_corpus(const Backend& backend, const Corpus& corpus,
                                 const AnswerIndex& index, const EvalOptions& options_in) {
  const EvalOptions options = with_pools(corpus, options_in);
  SkipCounts skipped;
  const std::vector<Job> jobs = plan(corpus, options, skipped);
  // Resolve capabilities once before fanning out.
  backend.capabilities();

  std::vector<InstanceResult> results(jobs.size());
  std::exception_ptr failure;
  std::mutex failure_mu;
  std::atomic<bool> failed{false};
  const int threads = options.parallelism > 0 ? options.parallelism : omp_get_max_threads();
  const long long n = static_cast<long long>(jobs.size());

#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (long long i = 0; i < n; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      const Job& job = jobs[static_cast<std::size_t>(i)];
      results[static_cast<std::size_t>(i)] = evaluate_instance(
          backend, *job.relation, *job.triple, job.triple_index, index, options);
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      failed.store(true);
    }
  }
  if (failure) std::rethrow_exception(failure);

  EvaluationResult out;
  out.report = aggregate(corpus, results, skipped);
  out.instances = std::move(results);
  return out;
}

// ---------------------------------------------------------------- aggregation

void Counts::add(const InstanceResult& r) {
  ++instances;
  round1 += r.round1.coherent;
  round2 += r.round2.coherent;
  c1 += r.c1;
  c2 += r.c2;
  all_correct += r.all_correct;
}

namespace {
Rational ratio(std::size_t num, std::size_t den) {
  if (den == 0) return 0;
  return Rational(static_cast<long long>(num), static_cast<long long>(den));
}
}  // namespace

Rational RelationScore::round1() const { return ratio(counts.round1, counts.instances); }
Rational RelationScore::round2() const { return ratio(counts.round2, counts.instances); }
Rational RelationScore::avg() const { return (round1() + round2()) / 2; }
Rational RelationScore::c1() const { return ratio(counts.c1, counts.instances); }
Rational RelationScore::c2() const { return ratio(counts.c2, counts.instances); }
Rational RelationScore::all_correct() const { return ratio(counts.all_correct, counts.instances); }

CoherencyReport aggregate(const Corpus& corpus, std::span<const InstanceResult> instances,
                          SkipCounts skipped) {
  std::map<std::string, RelationScore> by_rel;
  for (const auto& r : instances) {
    auto [it, inserted] = by_rel.try_emplace(r.relation_id);
    if (inserted) {
      const Relation& rel = corpus.relation(r.relation_id);
      it->second.relation_id = rel.id;
      it->second.rel_type = rel.rel_type;
      it->second.symmetric = rel.symmetric;
    }
    it->second.counts.add(r);
  }
  std::vector<RelationScore> rels;
  for (auto& [_, s] : by_rel) rels.push_back(std::move(s));
  return summarize_relations(std::move(rels), skipped);
}

CoherencyReport summarize_relations(std::vector<RelationScore> relations, SkipCounts skipped) {
  std::erase_if(relations, [](const RelationScore& r) { return r.counts.instances == 0; });
  if (relations.empty()) throw EmptyResultError("0 evaluable relations");
  std::sort(relations.begin(), relations.end(),
            [](const RelationScore& a, const RelationScore& b) { return a.relation_id < b.relation_id; });

  CoherencyReport rep;
  rep.skipped = skipped;
  for (auto& s : relations) {
    rep.total_instances += s.counts.instances;
    rep.relations.push_back(std::move(s));
  }
  const std::span<const RelationScore> rels(rep.relations);
  rep.round1 = macro_mean(rels, [](const RelationScore& r) { return r.round1(); });
  rep.round2 = macro_mean(rels, [](const RelationScore& r) { return r.round2(); });
  rep.avg = (rep.round1 + rep.round2) / 2;
  rep.c1 = macro_mean(rels, [](const RelationScore& r) { return r.c1(); });
  rep.c2 = macro_mean(rels, [](const RelationScore& r) { return r.c2(); });
  rep.all_correct = macro_mean(rels, [](const RelationScore& r) { return r.all_correct(); });

  auto type_row = [&](std::string label, auto pred) {
    std::vector<RelationScore> sel;
    for (const auto& r : rep.relations)
      if (pred(r)) sel.push_back(r);
    TypeAggregate t;
    t.label = std::move(label);
    t.relations = sel.size();
    for (const auto& r : sel) t.instances += r.counts.instances;
    const std::span<const RelationScore> s(sel);
    t.round1 = macro_mean(s, [](const RelationScore& r) { return r.round1(); });
    t.round2 = macro_mean(s, [](const RelationScore& r) { return r.round2(); });
    t.avg = (t.round1 + t.round2) / 2;
    return t;
  };
  rep.per_type.push_back(type_row("1-1", [](const RelationScore& r) { return r.rel_type == RelType::OneToOne; }));
  rep.per_type.push_back(type_row("N-1", [](const RelationScore& r) { return r.rel_type == RelType::NToOne; }));
  rep.per_type.push_back(type_row("N-M", [](const RelationScore& r) { return r.rel_type == RelType::NToM; }));
  rep.per_type.push_back(type_row("symmetric", [](const RelationScore& r) { return r.symmetric; }));
  rep.per_type.push_back(type_row("All", [](const RelationScore&) { return true; }));
  return rep;
}

}  // namespace coherency
