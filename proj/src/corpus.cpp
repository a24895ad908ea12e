#include "coherency/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coherency/errors.hpp"
#include "coherency/text.hpp"

namespace coherency {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(RelType t) {
  switch (t) {
    case RelType::OneToOne: return "1-1";
    case RelType::NToOne: return "N-1";
    case RelType::NToM: return "N-M";
  }
  return "?";
}

RelType parse_rel_type(std::string_view s) {
  if (s == "1-1") return RelType::OneToOne;
  if (s == "N-1") return RelType::NToOne;
  if (s == "N-M") return RelType::NToM;
  throw DataError("unknown relation type '" + std::string(s) + "' (expected 1-1, N-1 or N-M)");
}

std::string_view to_string(Direction d) {
  return d == Direction::PredictSubject ? "predict_subject" : "predict_object";
}

namespace {

std::size_t count_occurrences(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

bool ends_with_slot(std::string_view tmpl, std::string_view slot) {
  const std::string t = trim(tmpl);
  return t.size() >= slot.size() && std::string_view(t).substr(t.size() - slot.size()) == slot;
}

std::string key_of(const Triple& t) {
  return normalize_entity(t.subject) + '\x1f' + t.relation_id + '\x1f' + normalize_entity(t.object);
}

void check_entity(const std::string& e, std::size_t line_no) {
  if (e.empty())
    throw DataError("line " + std::to_string(line_no) + ": empty entity label");
  if (e.find(kSubjectSlot) != std::string::npos || e.find(kObjectSlot) != std::string::npos)
    throw DataError("line " + std::to_string(line_no) + ": entity '" + e +
                    "' contains a slot marker");
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) return it->get<std::string>();
  return std::nullopt;
}

}  // namespace

void validate_cloze_template(std::string_view tmpl, std::string_view what) {
  const auto xs = count_occurrences(tmpl, kSubjectSlot);
  const auto ys = count_occurrences(tmpl, kObjectSlot);
  if (xs != 1 || ys != 1)
    throw DataError(std::string(what) + " '" + std::string(tmpl) +
                    "' must contain [X] and [Y] exactly once each");
}

void validate_relation(const Relation& r) {
  if (r.id.empty()) throw DataError("relation with empty id");
  validate_cloze_template(r.template_text, "template of " + r.id);
  if (r.optimized_template)
    validate_cloze_template(*r.optimized_template, "optimized template of " + r.id);
  for (const auto& p : r.paraphrases) validate_cloze_template(p, "paraphrase of " + r.id);
  if (r.ar_object_last) {
    validate_cloze_template(*r.ar_object_last, "ar_object_last of " + r.id);
    if (!ends_with_slot(*r.ar_object_last, kObjectSlot))
      throw DataError("ar_object_last of " + r.id + " must end with [Y]");
  }
  if (r.ar_subject_last) {
    validate_cloze_template(*r.ar_subject_last, "ar_subject_last of " + r.id);
    if (!ends_with_slot(*r.ar_subject_last, kSubjectSlot))
      throw DataError("ar_subject_last of " + r.id + " must end with [X]");
  }
  if (r.symmetric && r.rel_type != RelType::NToM)
    throw DataError("relation " + r.id + " is symmetric but not N-M");
}

Relation relation_from_json_line(std::string_view line) {
  const json j = json::parse(line);
  Relation r;
  r.id = j.at("relation").get<std::string>();
  r.template_text = trim(j.at("template").get<std::string>());
  r.rel_type = parse_rel_type(j.at("type").get<std::string>());
  r.symmetric = j.value("symmetric", false);
  r.optimized_template = opt_string(j, "template_optimized");
  if (auto it = j.find("paraphrases"); it != j.end() && !it->is_null())
    r.paraphrases = it->get<std::vector<std::string>>();
  r.ar_object_last = opt_string(j, "ar_object_last");
  r.ar_subject_last = opt_string(j, "ar_subject_last");
  validate_relation(r);
  return r;
}

std::string relation_to_json_line(const Relation& r) {
  json j = {{"relation", r.id},
            {"template", r.template_text},
            {"type", std::string(to_string(r.rel_type))},
            {"symmetric", r.symmetric}};
  if (r.optimized_template) j["template_optimized"] = *r.optimized_template;
  if (!r.paraphrases.empty()) j["paraphrases"] = r.paraphrases;
  if (r.ar_object_last) j["ar_object_last"] = *r.ar_object_last;
  if (r.ar_subject_last) j["ar_subject_last"] = *r.ar_subject_last;
  return j.dump();
}

RelationSet load_relations(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read relations file " + path.string());
  RelationSet out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      Relation r = relation_from_json_line(line);
      std::string id = r.id;
      out.insert_or_assign(std::move(id), std::move(r));
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::size_t Corpus::instance_count() const {
  std::size_t n = 0;
  for (const auto& [_, ts] : triples) n += ts.size();
  return n;
}

std::vector<std::string> Corpus::evaluable_relations() const {
  std::vector<std::string> ids;
  for (const auto& [id, ts] : triples)
    if (!ts.empty()) ids.push_back(id);
  return ids;
}

const Relation& Corpus::relation(const std::string& id) const {
  auto it = relations.find(id);
  if (it == relations.end()) throw DataError("unknown relation '" + id + "'");
  return it->second;
}

bool Corpus::add(Triple t) {
  if (!seen_.insert(key_of(t)).second) return false;
  std::string id = t.relation_id;
  triples[id].push_back(std::move(t));
  return true;
}

namespace {

void load_triples_file(const fs::path& path, const std::optional<std::string>& implied_relation,
                       Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read triples file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++corpus.report.lines_read;
    Triple t;
    try {
      const json j = json::parse(line);
      t.subject = trim(j.at("sub_label").get<std::string>());
      t.object = trim(j.at("obj_label").get<std::string>());
      if (auto it = j.find("predicate_id"); it != j.end())
        t.relation_id = it->get<std::string>();
      else if (implied_relation)
        t.relation_id = *implied_relation;
      else
        throw DataError("missing predicate_id");
      if (auto it = j.find("evidence"); it != j.end() && it->is_string()) {
        std::string ev = trim(it->get<std::string>());
        if (!ev.empty()) t.evidence = std::move(ev);
      }
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed line: " +
                      e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    check_entity(t.subject, line_no);
    check_entity(t.object, line_no);
    if (!corpus.relations.count(t.relation_id)) {
      ++corpus.report.unknown_relation;
      continue;
    }
    if (!corpus.add(std::move(t))) ++corpus.report.duplicates;
  }
}

}  // namespace

Corpus load_corpus(const fs::path& triples_path, const fs::path& relations_path) {
  Corpus corpus;
  corpus.relations = load_relations(relations_path);
  if (fs::is_directory(triples_path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(triples_path))
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) load_triples_file(f, f.stem().string(), corpus);
  } else {
    load_triples_file(triples_path, std::nullopt, corpus);
  }
  return corpus;
}

void write_triples(const Corpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [id, ts] : corpus.triples) {
    for (const auto& t : ts) {
      json j = {{"sub_label", t.subject}, {"obj_label", t.object}, {"predicate_id", t.relation_id}};
      if (t.evidence) j["evidence"] = *t.evidence;
      out << j.dump() << '\n';
    }
  }
}

void write_relations(const Corpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [_, r] : corpus.relations) out << relation_to_json_line(r) << '\n';
}

AnswerIndex::AnswerIndex(const Corpus& corpus) {
  for (const auto& [id, ts] : corpus.triples) {
    for (const auto& t : ts) {
      by_object_[{id, normalize_entity(t.object)}].insert(t.subject);
      by_subject_[{id, normalize_entity(t.subject)}].insert(t.object);
    }
  }
}

namespace {
const EntitySet& lookup(const std::map<std::pair<std::string, std::string>, EntitySet>& m,
                        const std::string& relation_id, std::string_view entity) {
  static const EntitySet kEmpty;
  auto it = m.find({relation_id, normalize_entity(entity)});
  return it == m.end() ? kEmpty : it->second;
}
}  // namespace

const EntitySet& AnswerIndex::subjects_of(const std::string& relation_id,
                                          std::string_view object) const {
  return lookup(by_object_, relation_id, object);
}

const EntitySet& AnswerIndex::objects_of(const std::string& relation_id,
                                         std::string_view subject) const {
  return lookup(by_subject_, relation_id, subject);
}

AnswerIndex build_answer_index(const Corpus& corpus) { return AnswerIndex(corpus); }

EntitySet exclusions(const AnswerIndex& index, const std::string& relation_id,
                     std::string_view query_entity, Direction direction, std::string_view keep) {
  const EntitySet& correct = direction == Direction::PredictSubject
                                 ? index.subjects_of(relation_id, query_entity)
                                 : index.objects_of(relation_id, query_entity);
  const std::string keep_key = normalize_entity(keep);
  EntitySet out;
  for (const auto& e : correct)
    if (normalize_entity(e) != keep_key) out.insert(e);
  return out;
}

}  // namespace coherency
