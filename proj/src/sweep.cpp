#include <algorithm>
#include <cmath>
#include <random>

#include "coherency/engine.hpp"
#include "coherency/errors.hpp"

namespace coherency {

SweepReport paraphrase_sweep(const Backend& backend, const Corpus& corpus,
                             const AnswerIndex& index, std::size_t runs, std::uint64_t seed,
                             EvalOptions options) {
  if (runs < 1) throw ConfigError("paraphrase sweep needs runs >= 1");

  SweepReport rep;
  rep.runs = runs;
  rep.seed = seed;
  // Only relations with paraphrases take part; the rest are listed and dropped.
  Corpus covered;
  covered.relations = corpus.relations;
  for (const auto& id : corpus.evaluable_relations()) {
    if (corpus.relation(id).paraphrases.empty()) {
      rep.excluded_relations.push_back(id);
      continue;
    }
    covered.triples[id] = corpus.triples.at(id);
  }
  const std::vector<std::string> ids = covered.evaluable_relations();
  if (ids.empty()) throw EmptyResultError("no paraphrase-covered relations");

  for (const auto& id : ids) rep.relations.push_back({id, {}, {}, 0, 0, 0, 0.0});

  std::mt19937_64 rng(seed);
  options.mode = PromptMode::paraphrase(0);
  for (std::size_t run = 0; run < runs; ++run) {
    options.paraphrase_choice.clear();
    for (auto& rel : rep.relations) {
      const std::size_t k = sample_paraphrase_index(corpus.relation(rel.relation_id), rng);
      options.paraphrase_choice[rel.relation_id] = k;
      rel.template_index.push_back(k);
    }
    const EvaluationResult res = evaluate_corpus(backend, covered, index, options);
    if (run == 0) rep.instances_per_run = res.report.total_instances;
    std::map<std::string, Counts> by_id;
    for (const auto& rs : res.report.relations) by_id[rs.relation_id] = rs.counts;
    for (auto& rel : rep.relations) rel.counts.push_back(by_id[rel.relation_id]);
  }
  finalize_sweep(rep);
  return rep;
}

void finalize_sweep(SweepReport& rep) {
  if (rep.relations.empty()) throw EmptyResultError("nothing to render");
  auto avg_of = [](const Counts& c) {
    RelationScore s;
    s.counts = c;
    return s.avg();
  };
  Rational sum_min = 0, sum_avg = 0, sum_max = 0;
  rep.run_macro.assign(rep.runs, Rational(0));
  for (auto& rel : rep.relations) {
    Rational lo, hi, total = 0;
    std::vector<double> xs;
    for (std::size_t run = 0; run < rel.counts.size(); ++run) {
      const Rational v = avg_of(rel.counts[run]);
      if (run == 0 || v < lo) lo = v;
      if (run == 0 || v > hi) hi = v;
      total += v;
      xs.push_back(to_double(v));
      rep.run_macro[run] += v;
    }
    rel.min = lo;
    rel.max = hi;
    rel.avg = total / static_cast<long long>(rel.counts.size());
    const double mean = to_double(rel.avg);
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    rel.stddev = std::sqrt(ss / static_cast<double>(xs.size()));
    sum_min += rel.min;
    sum_avg += rel.avg;
    sum_max += rel.max;
  }
  const auto n = static_cast<long long>(rep.relations.size());
  rep.macro_min = sum_min / n;
  rep.macro_avg = sum_avg / n;
  rep.macro_max = sum_max / n;
  for (auto& m : rep.run_macro) m /= n;
  rep.run_min = *std::min_element(rep.run_macro.begin(), rep.run_macro.end());
  rep.run_max = *std::max_element(rep.run_macro.begin(), rep.run_macro.end());
  Rational t = 0;
  for (const auto& m : rep.run_macro) t += m;
  rep.run_avg = t / static_cast<long long>(rep.run_macro.size());
}

}  // namespace coherency
