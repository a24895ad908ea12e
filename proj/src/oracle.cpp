#include "coherency/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace coherency {

namespace {

std::string lower_trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out = s.substr(b, e - b);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool contains_either(const std::string& a, const std::string& b) {
  const std::string x = lower_trimmed(a), y = lower_trimmed(b);
  if (x.empty() || y.empty()) return false;
  return x.find(y) != std::string::npos || y.find(x) != std::string::npos;
}

// Fact tables for one relation, built by scanning its triple list.
struct RelationFacts {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::map<std::string, std::vector<std::string>> objects_of, subjects_of;  // lowercase keys, sorted values
  std::vector<std::string> subject_pool, object_pool;
  bool poisoned = false;
};

struct Outcome {
  bool round1 = false;
  bool round2 = false;
};

class Simulator {
 public:
  Simulator(const SyntheticKB& kb, const OracleOptions& options) : kb_(kb), options_(options) {
    const std::set<std::string> poisoned(kb.poisoned_templates.begin(), kb.poisoned_templates.end());
    for (const auto& [id, ts] : kb.facts.triples) {
      if (ts.empty()) continue;
      RelationFacts rf;
      std::set<std::string> subs, objs;
      // Everything is compared case-insensitively, so work on lowercase forms.
      for (const auto& t : ts) {
        const std::string s = lower_trimmed(t.subject), o = lower_trimmed(t.object);
        rf.pairs.emplace_back(s, o);
        rf.objects_of[s].push_back(o);
        rf.subjects_of[o].push_back(s);
        subs.insert(s);
        objs.insert(o);
      }
      for (auto& [_, v] : rf.objects_of) std::sort(v.begin(), v.end());
      for (auto& [_, v] : rf.subjects_of) std::sort(v.begin(), v.end());
      rf.subject_pool.assign(subs.begin(), subs.end());
      rf.object_pool.assign(objs.begin(), objs.end());
      const auto& rel = kb.facts.relations.at(id);
      std::string tmpl = rel.template_text;
      rf.poisoned = poisoned.count(tmpl) > 0;
      rels_.emplace(id, std::move(rf));
    }
  }

  bool random_behavior() const {
    return kb_.behavior.kind == BehaviorKind::ReversalCursed ||
           kb_.behavior.kind == BehaviorKind::UniformRandom;
  }

  const std::map<std::string, RelationFacts>& relations() const { return rels_; }

  // Every gold counterpart on the other side of `entity`, minus `keep`.
  static std::set<std::string> banned(const RelationFacts& rf, const std::string& entity,
                                      bool predict_subject, const std::string& keep) {
    std::set<std::string> out;
    for (const auto& [s, o] : rf.pairs) {
      const std::string& anchor = predict_subject ? o : s;
      const std::string& answer = predict_subject ? s : o;
      if (anchor == entity && answer != keep) out.insert(answer);
    }
    return out;
  }

  // Top answer for one query, or "" when nothing survives the ban.
  std::string answer(const RelationFacts& rf, const std::string& entity, bool predict_subject,
                     const std::set<std::string>& ban, std::mt19937_64& rng) const {
    BehaviorKind kind = rf.poisoned ? BehaviorKind::Echo : kb_.behavior.kind;
    auto allowed = [&](const std::string& e) { return !ban.count(e); };
    auto from_facts = [&]() -> std::string {
      const auto& table = predict_subject ? rf.subjects_of : rf.objects_of;
      auto it = table.find(entity);
      if (it == table.end()) return "";
      for (const auto& e : it->second)
        if (allowed(e)) return e;
      return "";
    };
    auto at_random = [&]() -> std::string {
      const auto& pool = predict_subject ? rf.subject_pool : rf.object_pool;
      std::size_t open = 0;
      for (const auto& e : pool) open += allowed(e);
      if (open == 0) return "";
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      for (;;) {
        const std::string& e = pool[pick(rng)];
        if (allowed(e)) return e;
      }
    };
    switch (kind) {
      case BehaviorKind::Perfect: return from_facts();
      case BehaviorKind::ReversalCursed: return predict_subject ? at_random() : from_facts();
      case BehaviorKind::Echo:
        if (!predict_subject) return from_facts();
        return allowed(entity) ? entity : "";
      case BehaviorKind::FixedAnswer: {
        const std::string fixed = lower_trimmed(kb_.behavior.fixed_entity);
        return allowed(fixed) ? fixed : "";
      }
      case BehaviorKind::UniformRandom: return at_random();
    }
    return "";
  }

  Outcome instance(const RelationFacts& rf, const std::string& s, const std::string& o,
                   std::mt19937_64& rng) const {
    Outcome out;
    const std::set<std::string> none;
    // round 1: predict the object from s, then the subject back from it
    const std::string o1 = answer(rf, s, false, none, rng);
    if (!o1.empty()) {
      const std::string s1 = answer(rf, o1, true, ban_for(rf, o1, o, true, s), rng);
      out.round1 = contains_either(s1, s);
    }
    // round 2: predict the subject from o, then the object back from it
    const std::string s2 = answer(rf, o, true, none, rng);
    if (!s2.empty()) {
      const std::string o2 = answer(rf, s2, false, ban_for(rf, s2, s, false, o), rng);
      out.round2 = contains_either(o2, o);
    }
    return out;
  }

 private:
  std::set<std::string> ban_for(const RelationFacts& rf, const std::string& pivot,
                                const std::string& gold, bool predict_subject,
                                const std::string& keep) const {
    switch (options_.exclusion) {
      case ExclusionMode::Pivot: return banned(rf, pivot, predict_subject, keep);
      case ExclusionMode::Gold: return banned(rf, gold, predict_subject, keep);
      case ExclusionMode::None: return {};
    }
    return {};
  }

  const SyntheticKB& kb_;
  OracleOptions options_;
  std::map<std::string, RelationFacts> rels_;
};

struct RunMacro {
  double round1 = 0, round2 = 0;
};

RunMacro simulate_run(const Simulator& sim, std::mt19937_64& rng) {
  RunMacro m;
  for (const auto& [_, rf] : sim.relations()) {
    double r1 = 0, r2 = 0;
    for (const auto& [s, o] : rf.pairs) {
      const Outcome oc = sim.instance(rf, s, o, rng);
      r1 += oc.round1;
      r2 += oc.round2;
    }
    m.round1 += r1 / static_cast<double>(rf.pairs.size());
    m.round2 += r2 / static_cast<double>(rf.pairs.size());
  }
  const double n = static_cast<double>(sim.relations().size());
  m.round1 /= n;
  m.round2 /= n;
  return m;
}

OracleEstimate summarize(std::vector<double> xs) {
  OracleEstimate e;
  const double n = static_cast<double>(xs.size());
  double sum = 0;
  for (double x : xs) sum += x;
  e.mean = sum / n;
  double ss = 0;
  for (double x : xs) ss += (x - e.mean) * (x - e.mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  const double half = 1.96 * sd / std::sqrt(n);
  e.ci_low = e.mean - half;
  e.ci_high = e.mean + half;
  std::sort(xs.begin(), xs.end());
  auto quantile = [&](double q) {
    const double pos = q * (n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
  };
  e.run_low = quantile(0.025);
  e.run_high = quantile(0.975);
  return e;
}

}  // namespace

OracleResult brute_force_expected_coherency(const SyntheticKB& kb, const OracleOptions& options) {
  Simulator sim(kb, options);
  OracleResult res;
  if (sim.relations().empty()) return res;
  std::mt19937_64 rng(options.seed);
  if (!sim.random_behavior()) {
    const RunMacro m = simulate_run(sim, rng);
    auto point = [](double v) { return OracleEstimate{v, v, v, v, v}; };
    res.exact = true;
    res.samples = 1;
    res.round1 = point(m.round1);
    res.round2 = point(m.round2);
    res.avg = point((m.round1 + m.round2) / 2);
    return res;
  }
  const std::size_t samples = std::max<std::size_t>(options.samples, 10000);
  std::vector<double> r1, r2, avg;
  r1.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const RunMacro m = simulate_run(sim, rng);
    r1.push_back(m.round1);
    r2.push_back(m.round2);
    avg.push_back((m.round1 + m.round2) / 2);
  }
  res.samples = samples;
  res.round1 = summarize(std::move(r1));
  res.round2 = summarize(std::move(r2));
  res.avg = summarize(std::move(avg));
  return res;
}

}  // namespace coherency
