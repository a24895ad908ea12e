#include <fstream>

#include <json.hpp>

#include "coherency/corpus.hpp"
#include "coherency/errors.hpp"
#include "coherency/text.hpp"

namespace coherency {

using nlohmann::json;

Corpus apply_entity_filter(const Corpus& corpus, const EntityPredicate& keep) {
  auto passes = [&](const std::string& entity) {
    try {
      return keep(entity);
    } catch (const std::exception& e) {
      throw DataError("entity filter failed for '" + entity + "': " + e.what());
    }
  };
  Corpus out;
  out.relations = corpus.relations;
  out.report = corpus.report;
  for (const auto& [id, ts] : corpus.triples) {
    out.triples[id];  // keep the group so emptied relations stay visible
    for (const auto& t : ts)
      if (passes(t.subject) && passes(t.object)) out.add(t);
  }
  return out;
}

std::vector<std::string> emptied_relations(const Corpus& before, const Corpus& after) {
  std::vector<std::string> out;
  for (const auto& [id, ts] : before.triples) {
    if (ts.empty()) continue;
    auto it = after.triples.find(id);
    if (it == after.triples.end() || it->second.empty()) out.push_back(id);
  }
  return out;
}

bool EntityFilter::operator()(const std::string& entity) const {
  auto it = table_.find(entity);
  return it != table_.end() && it->second;
}

EntityPredicate EntityFilter::predicate() const {
  return [table = table_](const std::string& entity) {
    auto it = table.find(entity);
    return it != table.end() && it->second;
  };
}

void EntityFilter::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [entity, keep] : table_)
    out << json{{"entity", entity}, {"keep", keep}}.dump() << '\n';
}

EntityFilter EntityFilter::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read filter file " + path.string());
  std::map<std::string, bool> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      table[j.at("entity").get<std::string>()] = j.at("keep").get<bool>();
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return EntityFilter(std::move(table));
}

std::vector<std::string> all_entities(const Corpus& corpus) {
  std::set<std::string> s;
  for (const auto& [_, ts] : corpus.triples)
    for (const auto& t : ts) {
      s.insert(t.subject);
      s.insert(t.object);
    }
  return {s.begin(), s.end()};
}

}  // namespace coherency
