#include "coherency/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "coherency/errors.hpp"
#include "coherency/text.hpp"

namespace coherency {

using nlohmann::json;

std::string_view to_string(BehaviorKind k) {
  switch (k) {
    case BehaviorKind::Perfect: return "perfect";
    case BehaviorKind::ReversalCursed: return "reversal_cursed";
    case BehaviorKind::Echo: return "echo";
    case BehaviorKind::FixedAnswer: return "fixed_answer";
    case BehaviorKind::UniformRandom: return "uniform_random";
  }
  return "?";
}

json to_json(const Behavior& b) {
  json j = {{"kind", std::string(to_string(b.kind))}};
  if (b.kind == BehaviorKind::FixedAnswer) j["entity"] = b.fixed_entity;
  return j;
}

Behavior behavior_from_json(const json& j) {
  const std::string name = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
  Behavior b;
  if (name == "perfect") b.kind = BehaviorKind::Perfect;
  else if (name == "reversal_cursed") b.kind = BehaviorKind::ReversalCursed;
  else if (name == "echo") b.kind = BehaviorKind::Echo;
  else if (name == "uniform_random") b.kind = BehaviorKind::UniformRandom;
  else if (name == "fixed_answer") {
    b.kind = BehaviorKind::FixedAnswer;
    if (!j.is_object() || !j.contains("entity"))
      throw ConfigError("fixed_answer behavior needs an \"entity\"");
    b.fixed_entity = j.at("entity").get<std::string>();
  } else {
    throw ConfigError("unknown synthetic behavior '" + name + "'");
  }
  return b;
}

// ---------------------------------------------------------------- config io

namespace {

BackendCapabilities merge_capabilities(BackendCapabilities base, const json& j) {
  if (j.contains("kind")) {
    base.kind = parse_backend_kind(j.at("kind").get<std::string>());
    if (base.kind == BackendKind::Autoregressive) base.mask_marker.clear();
  }
  if (j.contains("mask_marker")) base.mask_marker = j.at("mask_marker").get<std::string>();
  if (j.contains("single_token_only")) base.single_token_only = j.at("single_token_only").get<bool>();
  if (j.contains("max_n_best")) base.max_n_best = j.at("max_n_best").get<int>();
  if (j.contains("supports_banning")) base.supports_banning = j.at("supports_banning").get<bool>();
  base.validate();
  return base;
}

}  // namespace

SyntheticKBConfig synthetic_config_from_json(const json& j) {
  SyntheticKBConfig c;
  try {
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("behavior")) c.behavior = behavior_from_json(j.at("behavior"));
    if (j.contains("capabilities")) c.capabilities = merge_capabilities(c.capabilities, j.at("capabilities"));
    c.paraphrases = j.value("paraphrases", c.paraphrases);
    c.optimized = j.value("optimized", c.optimized);
    c.autoregressive = j.value("autoregressive", c.autoregressive);
    c.evidence = j.value("evidence", c.evidence);
    if (j.contains("poisoned_templates"))
      c.poisoned_templates = j.at("poisoned_templates").get<std::vector<std::string>>();
    for (const auto& r : j.at("relations")) {
      SyntheticRelationSpec s;
      s.id = r.at("id").get<std::string>();
      s.rel_type = parse_rel_type(r.at("type").get<std::string>());
      s.symmetric = r.value("symmetric", false);
      s.facts = r.value("facts", s.facts);
      s.fan_in = r.value("fan_in", s.fan_in);
      s.objects = r.value("objects", s.objects);
      s.subjects = r.value("subjects", 0);
      s.object_pool = r.value("object_pool", 0);
      s.entities = r.value("entities", 0);
      c.relations.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed synthetic config: ") + e.what());
  } catch (const DataError& e) {
    throw ConfigError(std::string("malformed synthetic config: ") + e.what());
  } catch (const BackendError& e) {
    throw ConfigError(std::string("malformed synthetic config: ") + e.what());
  }
  return c;
}

json to_json(const SyntheticKBConfig& c) {
  json rels = json::array();
  for (const auto& s : c.relations) {
    json r = {{"id", s.id}, {"type", std::string(to_string(s.rel_type))}, {"symmetric", s.symmetric},
              {"facts", s.facts}, {"fan_in", s.fan_in}, {"objects", s.objects},
              {"subjects", s.subjects}, {"object_pool", s.object_pool}, {"entities", s.entities}};
    rels.push_back(std::move(r));
  }
  return {{"seed", c.seed},
          {"behavior", to_json(c.behavior)},
          {"capabilities", to_json(c.capabilities)},
          {"paraphrases", c.paraphrases},
          {"optimized", c.optimized},
          {"autoregressive", c.autoregressive},
          {"evidence", c.evidence},
          {"poisoned_templates", c.poisoned_templates},
          {"relations", rels}};
}

// ---------------------------------------------------------------- generator

namespace {

std::string entity_name(const std::string& rel, char role, int i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*d", role, width, i);
  return rel + "-" + buf;
}

int width_for(int n) {
  int w = 4;
  for (int lim = 10000; n >= lim; lim *= 10) ++w;
  return w;
}

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

Relation make_relation(const SyntheticRelationSpec& s, const SyntheticKBConfig& c) {
  Relation r;
  r.id = s.id;
  r.rel_type = s.rel_type;
  r.symmetric = s.symmetric;
  r.template_text = "[X] relates to [Y] under " + s.id + " .";
  if (c.optimized) r.optimized_template = "[X] " + s.id + " optimized link [Y] .";
  for (int k = 0; k < c.paraphrases; ++k) {
    const std::string tag = s.id + " variant " + std::to_string(k);
    r.paraphrases.push_back(k % 2 == 0 ? "[X] is tied to [Y] by " + tag + " ."
                                       : "Under " + tag + " , [Y] is tied to [X] .");
  }
  if (c.autoregressive) {
    r.ar_object_last = "Under " + s.id + " , [X] relates to [Y]";
    r.ar_subject_last = "Under " + s.id + " , [Y] is related from [X]";
  }
  return r;
}

std::vector<std::pair<std::string, std::string>> make_pairs(const SyntheticRelationSpec& s,
                                                            std::mt19937_64& rng) {
  std::vector<std::pair<std::string, std::string>> pairs;
  auto infeasible = [&](const std::string& why) {
    return ConfigError("infeasible synthetic relation " + s.id + ": " + why);
  };
  switch (s.rel_type) {
    case RelType::OneToOne: {
      if (s.facts < 1) throw infeasible("1-1 needs facts >= 1");
      const int w = width_for(s.facts);
      std::vector<int> perm(s.facts);
      for (int i = 0; i < s.facts; ++i) perm[i] = i;
      shuffle(perm, rng);
      for (int i = 0; i < s.facts; ++i)
        pairs.emplace_back(entity_name(s.id, 's', i, w), entity_name(s.id, 'o', perm[i], w));
      break;
    }
    case RelType::NToOne: {
      if (s.fan_in < 2) throw infeasible("N-1 needs fan_in >= 2");
      if (s.objects < 1) throw infeasible("N-1 needs objects >= 1");
      const int n_subjects = s.objects * s.fan_in;
      const int w = width_for(n_subjects);
      std::vector<int> subj(n_subjects);
      for (int i = 0; i < n_subjects; ++i) subj[i] = i;
      shuffle(subj, rng);
      for (int i = 0; i < n_subjects; ++i)
        pairs.emplace_back(entity_name(s.id, 's', subj[i], w),
                           entity_name(s.id, 'o', i / s.fan_in, w));
      break;
    }
    case RelType::NToM: {
      if (s.symmetric) {
        const int n = s.entities > 0 ? s.entities
                                     : std::max(3, static_cast<int>(std::ceil(std::sqrt(4.0 * s.facts))) + 1);
        if (n < 2) throw infeasible("symmetric relation needs >= 2 entities");
        if (s.facts < 1 || static_cast<long long>(s.facts) > static_cast<long long>(n) * (n - 1) / 2)
          throw infeasible("symmetric facts must be in [1, n(n-1)/2]");
        const int w = width_for(n);
        std::vector<std::pair<int, int>> all;
        for (int a = 0; a < n; ++a)
          for (int b = a + 1; b < n; ++b) all.emplace_back(a, b);
        shuffle(all, rng);
        for (int i = 0; i < s.facts; ++i) {
          const auto [a, b] = all[i];
          pairs.emplace_back(entity_name(s.id, 'e', a, w), entity_name(s.id, 'e', b, w));
          pairs.emplace_back(entity_name(s.id, 'e', b, w), entity_name(s.id, 'e', a, w));
        }
        break;
      }
      const int side = std::max(2, static_cast<int>(std::ceil(std::sqrt(2.0 * s.facts))));
      const int ns = s.subjects > 0 ? s.subjects : side;
      const int no = s.object_pool > 0 ? s.object_pool : side;
      if (s.facts < 1 || static_cast<long long>(s.facts) > static_cast<long long>(ns) * no)
        throw infeasible("N-M facts must be in [1, subjects*objects]");
      const int w = width_for(std::max(ns, no));
      std::vector<std::pair<int, int>> all;
      for (int a = 0; a < ns; ++a)
        for (int b = 0; b < no; ++b) all.emplace_back(a, b);
      shuffle(all, rng);
      for (int i = 0; i < s.facts; ++i)
        pairs.emplace_back(entity_name(s.id, 's', all[i].first, w),
                           entity_name(s.id, 'o', all[i].second, w));
      break;
    }
  }
  return pairs;
}

}  // namespace

SyntheticKB generate_synthetic(const SyntheticKBConfig& config) {
  if (config.relations.empty()) throw ConfigError("synthetic config has no relations");
  std::mt19937_64 rng(config.seed);
  SyntheticKB kb;
  kb.seed = config.seed;
  kb.behavior = config.behavior;
  kb.capabilities = config.capabilities;
  kb.poisoned_templates = config.poisoned_templates;
  for (const auto& spec : config.relations) {
    if (spec.symmetric && spec.rel_type != RelType::NToM)
      throw ConfigError("synthetic relation " + spec.id + ": symmetric requires N-M");
    if (kb.facts.relations.count(spec.id))
      throw ConfigError("duplicate synthetic relation id " + spec.id);
    Relation rel = make_relation(spec, config);
    validate_relation(rel);
    kb.facts.relations.emplace(spec.id, rel);
    kb.facts.triples[spec.id];
    for (auto& [s, o] : make_pairs(spec, rng)) {
      Triple t{s, o, spec.id, std::nullopt};
      if (config.evidence) t.evidence = "Records for " + spec.id + " list " + s + " together with " + o + " .";
      kb.facts.add(std::move(t));
    }
  }
  return kb;
}

// ---------------------------------------------------------------- kb io

json to_json(const SyntheticKB& kb) {
  json rels = json::array();
  for (const auto& [_, r] : kb.facts.relations) rels.push_back(json::parse(relation_to_json_line(r)));
  json triples = json::array();
  for (const auto& [_, ts] : kb.facts.triples)
    for (const auto& t : ts) {
      json jt = {{"sub_label", t.subject}, {"obj_label", t.object}, {"predicate_id", t.relation_id}};
      if (t.evidence) jt["evidence"] = *t.evidence;
      triples.push_back(std::move(jt));
    }
  return {{"format", "coherency-synthetic-kb/1"},
          {"seed", kb.seed},
          {"behavior", to_json(kb.behavior)},
          {"capabilities", to_json(kb.capabilities)},
          {"poisoned_templates", kb.poisoned_templates},
          {"relations", rels},
          {"triples", triples}};
}

SyntheticKB synthetic_kb_from_json(const json& j) {
  SyntheticKB kb;
  try {
    kb.seed = j.at("seed").get<std::uint64_t>();
    kb.behavior = behavior_from_json(j.at("behavior"));
    kb.capabilities = capabilities_from_json(j.at("capabilities"));
    kb.poisoned_templates = j.value("poisoned_templates", std::vector<std::string>{});
    for (const auto& r : j.at("relations")) {
      Relation rel = relation_from_json_line(r.dump());
      std::string id = rel.id;
      kb.facts.relations.emplace(id, std::move(rel));
      kb.facts.triples[id];
    }
    for (const auto& t : j.at("triples")) {
      Triple tr{t.at("sub_label").get<std::string>(), t.at("obj_label").get<std::string>(),
                t.at("predicate_id").get<std::string>(), std::nullopt};
      if (t.contains("evidence")) tr.evidence = t.at("evidence").get<std::string>();
      if (!kb.facts.relations.count(tr.relation_id))
        throw DataError("triple references unknown relation " + tr.relation_id);
      kb.facts.add(std::move(tr));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed synthetic KB: ") + e.what());
  }
  return kb;
}

void save_kb(const SyntheticKB& kb, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json(kb).dump(1) << '\n';
}

SyntheticKB load_kb(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read synthetic KB/config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (j.contains("format")) return synthetic_kb_from_json(j);
  return generate_synthetic(synthetic_config_from_json(j));
}

// ---------------------------------------------------------------- backend

SyntheticBackend::SyntheticBackend(std::shared_ptr<const SyntheticKB> kb)
    : kb_(std::move(kb)), index_(kb_->facts) {
  const std::set<std::string> poisoned(kb_->poisoned_templates.begin(),
                                       kb_->poisoned_templates.end());
  for (const auto& [id, rel] : kb_->facts.relations) {
    std::vector<const std::string*> cloze = {&rel.template_text};
    if (rel.optimized_template) cloze.push_back(&*rel.optimized_template);
    for (const auto& p : rel.paraphrases) cloze.push_back(&p);
    for (const std::string* tp : cloze) {
      const std::string t = trim(*tp);
      const bool is_poisoned = poisoned.count(t) > 0;
      const auto px = t.find(kSubjectSlot), py = t.find(kObjectSlot);
      const auto first = std::min(px, py), second = std::max(px, py);
      const std::string head = t.substr(0, first);
      const std::string middle = t.substr(first + 3, second - first - 3);
      const std::string tail = t.substr(second + 3);
      for (Direction d : {Direction::PredictObject, Direction::PredictSubject}) {
        const auto known_pos = d == Direction::PredictObject ? px : py;
        cloze_.push_back({id, d, is_poisoned, known_pos == first, head, middle, tail});
      }
    }
    auto add_prefix = [&](const std::optional<std::string>& tmpl, Direction d) {
      if (!tmpl) return;
      std::string t = trim(*tmpl);
      t = trim(t.substr(0, t.size() - 3));
      const auto known = t.find(d == Direction::PredictObject ? kSubjectSlot : kObjectSlot);
      if (known == std::string::npos) return;
      prefixes_.push_back({id, d, poisoned.count(trim(*tmpl)) > 0, true, t.substr(0, known),
                           t.substr(known + 3), ""});
    };
    add_prefix(rel.ar_object_last, Direction::PredictObject);
    add_prefix(rel.ar_subject_last, Direction::PredictSubject);
  }
  for (const auto& [id, ts] : kb_->facts.triples) {
    std::set<std::string> subs, objs;
    for (const auto& t : ts) {
      subs.insert(t.subject);
      objs.insert(t.object);
      entities_.insert(t.subject);
      entities_.insert(t.object);
    }
    subject_pool_[id].assign(subs.begin(), subs.end());
    object_pool_[id].assign(objs.begin(), objs.end());
  }
}

std::optional<SyntheticBackend::Query> SyntheticBackend::choose(
    std::vector<std::pair<const Pattern*, std::string>>& found) const {
  if (found.empty()) return std::nullopt;
  // Prefer the longest candidate that names a known entity; evidence text next
  // to the prompt can otherwise leak into an unanchored capture.
  const std::pair<const Pattern*, std::string>* best = nullptr;
  for (const auto& f : found)
    if (entities_.count(f.second) && (best == nullptr || f.second.size() > best->second.size()))
      best = &f;
  if (best == nullptr) best = &found.front();
  return Query{best->first->relation_id, best->first->direction, best->second,
               best->first->poisoned};
}

namespace {

bool at(std::string_view text, std::size_t pos, std::string_view piece) {
  return pos <= text.size() && text.substr(pos, piece.size()) == piece;
}

}  // namespace

std::optional<SyntheticBackend::Query> SyntheticBackend::parse_cloze(std::string_view text,
                                                                     std::string_view marker) const {
  if (marker.empty()) return std::nullopt;
  std::vector<std::pair<const Pattern*, std::string>> found;
  for (auto p = text.find(marker); p != std::string_view::npos; p = text.find(marker, p + 1)) {
    const std::size_t after = p + marker.size();
    for (const auto& pat : cloze_) {
      if (pat.known_first) {
        // head ENTITY middle MARKER tail
        if (p < pat.middle.size() || !at(text, p - pat.middle.size(), pat.middle)) continue;
        if (!at(text, after, pat.tail)) continue;
        const std::size_t end = p - pat.middle.size();
        // default candidate first: closest head occurrence, or the whole prefix
        std::vector<std::size_t> starts;
        for (std::size_t q = end; q-- > 0;)
          if (q >= pat.head.size() && at(text, q - pat.head.size(), pat.head)) starts.push_back(q);
        if (pat.head.empty()) std::reverse(starts.begin(), starts.end());
        for (std::size_t q : starts) {
          std::string e = trim(text.substr(q, end - q));
          if (!e.empty()) found.emplace_back(&pat, std::move(e));
        }
      } else {
        // head MARKER middle ENTITY tail
        if (p < pat.head.size() || !at(text, p - pat.head.size(), pat.head)) continue;
        if (!at(text, after, pat.middle)) continue;
        const std::size_t start = after + pat.middle.size();
        std::vector<std::size_t> ends;
        for (std::size_t e = start + 1; e <= text.size(); ++e)
          if (at(text, e, pat.tail)) ends.push_back(e);
        if (pat.tail.empty()) std::reverse(ends.begin(), ends.end());
        for (std::size_t e : ends) {
          std::string ent = trim(text.substr(start, e - start));
          if (!ent.empty()) found.emplace_back(&pat, std::move(ent));
        }
      }
    }
  }
  return choose(found);
}

std::optional<SyntheticBackend::Query> SyntheticBackend::parse_prefix(std::string_view raw) const {
  const std::string text = trim(raw);
  const std::string_view tv(text);
  std::vector<std::pair<const Pattern*, std::string>> found;
  for (const auto& pat : prefixes_) {
    if (tv.size() < pat.middle.size() || !at(tv, tv.size() - pat.middle.size(), pat.middle)) continue;
    const std::size_t end = tv.size() - pat.middle.size();
    std::vector<std::size_t> starts;
    for (std::size_t q = end; q-- > 0;)
      if (q >= pat.head.size() && at(tv, q - pat.head.size(), pat.head)) starts.push_back(q);
    if (pat.head.empty()) std::reverse(starts.begin(), starts.end());
    for (std::size_t q : starts) {
      std::string e = trim(tv.substr(q, end - q));
      if (!e.empty()) found.emplace_back(&pat, std::move(e));
    }
  }
  return choose(found);
}

BehaviorKind SyntheticBackend::effective(const Query& q) const {
  return q.poisoned ? BehaviorKind::Echo : kb_->behavior.kind;
}

std::vector<std::string> SyntheticBackend::counterparts(const Query& q) const {
  const EntitySet& s = q.direction == Direction::PredictObject
                           ? index_.objects_of(q.relation_id, q.entity)
                           : index_.subjects_of(q.relation_id, q.entity);
  return {s.begin(), s.end()};
}

const std::vector<std::string>& SyntheticBackend::pool(const Query& q) const {
  static const std::vector<std::string> kEmpty;
  const auto& m = q.direction == Direction::PredictSubject ? subject_pool_ : object_pool_;
  auto it = m.find(q.relation_id);
  return it == m.end() ? kEmpty : it->second;
}

std::vector<Prediction> SyntheticBackend::predict(const PredictRequest& request) const {
  if (request.n_best < 1) throw BackendError("n_best must be >= 1");
  const auto q = parse_cloze(request.prompt, request.mask_marker);
  if (!q) return {};

  std::set<std::string> banned;
  if (kb_->capabilities.supports_banning)
    for (const auto& b : request.banned) banned.insert(normalize_entity(b));
  auto allowed = [&](const std::string& e) { return !banned.count(normalize_entity(e)); };

  std::string fp = "predict";
  for (std::string_view part : {std::string_view(request.prompt), std::string_view(request.mask_marker)}) {
    fp += '\0';
    fp += part;
  }
  fp += '\0' + std::to_string(request.n_best);
  for (const auto& b : banned) fp += '\0' + b;
  std::mt19937_64 rng(mix_seed(kb_->seed, fnv1a64(fp)));

  auto random_order = [&]() {
    std::vector<std::string> cands;
    for (const auto& e : pool(*q))
      if (allowed(e)) cands.push_back(e);
    // partial Fisher-Yates for the first n_best positions
    const std::size_t take = std::min<std::size_t>(cands.size(), request.n_best);
    for (std::size_t i = 0; i < take; ++i)
      std::swap(cands[i], cands[i + uniform_index(rng, cands.size() - i)]);
    cands.resize(take);
    return cands;
  };

  std::vector<std::string> answers;
  switch (effective(*q)) {
    case BehaviorKind::Perfect:
      answers = counterparts(*q);
      break;
    case BehaviorKind::ReversalCursed:
      answers = q->direction == Direction::PredictObject ? counterparts(*q) : random_order();
      break;
    case BehaviorKind::Echo:
      answers = q->direction == Direction::PredictObject ? counterparts(*q)
                                                         : std::vector<std::string>{q->entity};
      break;
    case BehaviorKind::FixedAnswer:
      answers = {kb_->behavior.fixed_entity};
      break;
    case BehaviorKind::UniformRandom:
      answers = random_order();
      break;
  }

  std::vector<Prediction> out;
  for (const auto& a : answers) {
    if (!allowed(a)) continue;
    const int rank = static_cast<int>(out.size()) + 1;
    out.push_back({a, -0.25 * rank, rank});
    if (rank == request.n_best) break;
  }
  return out;
}

std::vector<double> SyntheticBackend::score(std::string_view prompt_prefix,
                                            std::span<const std::string> candidates) const {
  constexpr double kMiss = -20.0;
  std::vector<double> scores(candidates.size(), kMiss);
  const auto q = parse_prefix(prompt_prefix);
  if (!q) return scores;

  std::string fp = "score";
  fp += '\0';
  fp += prompt_prefix;
  for (const auto& c : candidates) fp += '\0' + c;
  std::mt19937_64 rng(mix_seed(kb_->seed, fnv1a64(fp)));

  auto from_facts = [&]() {
    const auto facts = counterparts(*q);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      auto it = std::find(facts.begin(), facts.end(), candidates[i]);
      if (it != facts.end()) scores[i] = -0.1 * static_cast<double>(1 + (it - facts.begin()));
    }
  };
  auto matching = [&](const std::string& target) {
    const std::string key = normalize_entity(target);
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (normalize_entity(candidates[i]) == key) scores[i] = -0.1;
  };
  auto random_scores = [&]() {
    for (auto& s : scores) s = -10.0 + uniform_unit(rng);
  };

  switch (effective(*q)) {
    case BehaviorKind::Perfect:
      from_facts();
      break;
    case BehaviorKind::ReversalCursed:
      if (q->direction == Direction::PredictObject) from_facts();
      else random_scores();
      break;
    case BehaviorKind::Echo:
      if (q->direction == Direction::PredictObject) from_facts();
      else matching(q->entity);
      break;
    case BehaviorKind::FixedAnswer:
      matching(kb_->behavior.fixed_entity);
      break;
    case BehaviorKind::UniformRandom:
      random_scores();
      break;
  }
  return scores;
}

int SyntheticBackend::token_count(std::string_view text) const { return count_words(text); }

std::string SyntheticBackend::identity() const {
  return "synthetic:" + std::string(to_string(kb_->behavior.kind)) + ":seed=" +
         std::to_string(kb_->seed);
}

}  // namespace coherency
