#include "coherency/reporting.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "coherency/errors.hpp"

namespace coherency {

using nlohmann::json;

// ---------------------------------------------------------------- json

namespace {

json counts_json(const Counts& c) {
  return {{"instances", c.instances}, {"round1", c.round1}, {"round2", c.round2},
          {"c1", c.c1},           {"c2", c.c2},         {"all_correct", c.all_correct}};
}

Counts counts_from(const json& j) {
  Counts c;
  c.instances = j.at("instances").get<std::size_t>();
  c.round1 = j.at("round1").get<std::size_t>();
  c.round2 = j.at("round2").get<std::size_t>();
  c.c1 = j.at("c1").get<std::size_t>();
  c.c2 = j.at("c2").get<std::size_t>();
  c.all_correct = j.at("all_correct").get<std::size_t>();
  return c;
}

json step_json(const StepRecord& s) {
  return {{"prompt", s.prompt},
          {"query", s.query_entity},
          {"answer", s.answer ? json(*s.answer) : json(nullptr)},
          {"rank", s.rank},
          {"banned", s.banned}};
}

StepRecord step_from(const json& j) {
  StepRecord s;
  s.prompt = j.at("prompt").get<std::string>();
  s.query_entity = j.at("query").get<std::string>();
  if (!j.at("answer").is_null()) s.answer = j.at("answer").get<std::string>();
  s.rank = j.at("rank").get<int>();
  s.banned = j.at("banned").get<std::size_t>();
  return s;
}

json round_json(const RoundRecord& r) {
  return {{"first", step_json(r.first)}, {"second", step_json(r.second)}, {"coherent", r.coherent}};
}

RoundRecord round_from(const json& j) {
  return {step_from(j.at("first")), step_from(j.at("second")), j.at("coherent").get<bool>()};
}

json instance_json(const InstanceResult& r) {
  return {{"relation", r.relation_id}, {"index", r.triple_index}, {"subject", r.subject},
          {"object", r.object},        {"round1", round_json(r.round1)},
          {"round2", round_json(r.round2)}, {"c1", r.c1}, {"c2", r.c2},
          {"all_correct", r.all_correct}};
}

InstanceResult instance_from(const json& j) {
  InstanceResult r;
  r.relation_id = j.at("relation").get<std::string>();
  r.triple_index = j.at("index").get<std::size_t>();
  r.subject = j.at("subject").get<std::string>();
  r.object = j.at("object").get<std::string>();
  r.round1 = round_from(j.at("round1"));
  r.round2 = round_from(j.at("round2"));
  r.c1 = j.at("c1").get<bool>();
  r.c2 = j.at("c2").get<bool>();
  r.all_correct = j.at("all_correct").get<bool>();
  return r;
}

json report_json(const CoherencyReport& rep) {
  json rels = json::array();
  for (const auto& r : rep.relations)
    rels.push_back({{"relation", r.relation_id},
                    {"type", std::string(to_string(r.rel_type))},
                    {"symmetric", r.symmetric},
                    {"counts", counts_json(r.counts)},
                    {"round1", format_percent(r.round1())},
                    {"round2", format_percent(r.round2())},
                    {"avg", format_percent(r.avg())}});
  json types = json::array();
  for (const auto& t : rep.per_type)
    types.push_back({{"type", t.label},
                     {"relations", t.relations},
                     {"instances", t.instances},
                     {"coherency", t.relations ? json(format_percent(t.avg)) : json(nullptr)}});
  return {{"relations", rels},
          {"macro",
           {{"round1", format_percent(rep.round1)},
            {"round2", format_percent(rep.round2)},
            {"avg", format_percent(rep.avg)},
            {"c1", format_percent(rep.c1)},
            {"c2", format_percent(rep.c2)},
            {"all_correct", format_percent(rep.all_correct)}}},
          {"per_type", types},
          {"total_instances", rep.total_instances},
          {"skipped",
           {{"missing_template", rep.skipped.missing_template},
            {"missing_evidence", rep.skipped.missing_evidence}}}};
}

CoherencyReport report_from(const json& j) {
  std::vector<RelationScore> rels;
  for (const auto& r : j.at("relations")) {
    RelationScore s;
    s.relation_id = r.at("relation").get<std::string>();
    s.rel_type = parse_rel_type(r.at("type").get<std::string>());
    s.symmetric = r.at("symmetric").get<bool>();
    s.counts = counts_from(r.at("counts"));
    rels.push_back(std::move(s));
  }
  SkipCounts skipped;
  skipped.missing_template = j.at("skipped").at("missing_template").get<std::size_t>();
  skipped.missing_evidence = j.at("skipped").at("missing_evidence").get<std::size_t>();
  return summarize_relations(std::move(rels), skipped);
}

json sweep_json(const SweepReport& rep) {
  json rels = json::array();
  for (const auto& r : rep.relations) {
    json per_run = json::array();
    for (std::size_t i = 0; i < r.counts.size(); ++i)
      per_run.push_back({{"template", r.template_index[i]}, {"counts", counts_json(r.counts[i])}});
    rels.push_back({{"relation", r.relation_id},
                    {"runs", per_run},
                    {"min", format_percent(r.min)},
                    {"avg", format_percent(r.avg)},
                    {"max", format_percent(r.max)}});
  }
  json run_macro = json::array();
  for (const auto& m : rep.run_macro) run_macro.push_back(format_percent(m));
  return {{"runs", rep.runs},
          {"seed", rep.seed},
          {"instances_per_run", rep.instances_per_run},
          {"relations", rels},
          {"excluded_relations", rep.excluded_relations},
          {"per_relation", {{"min", format_percent(rep.macro_min)},
                            {"avg", format_percent(rep.macro_avg)},
                            {"max", format_percent(rep.macro_max)}}},
          {"run_level", {{"macro", run_macro},
                         {"min", format_percent(rep.run_min)},
                         {"avg", format_percent(rep.run_avg)},
                         {"max", format_percent(rep.run_max)}}}};
}

SweepReport sweep_from(const json& j) {
  SweepReport rep;
  rep.runs = j.at("runs").get<std::size_t>();
  rep.seed = j.at("seed").get<std::uint64_t>();
  rep.instances_per_run = j.at("instances_per_run").get<std::size_t>();
  rep.excluded_relations = j.at("excluded_relations").get<std::vector<std::string>>();
  for (const auto& r : j.at("relations")) {
    SweepRelation s;
    s.relation_id = r.at("relation").get<std::string>();
    for (const auto& run : r.at("runs")) {
      s.template_index.push_back(run.at("template").get<std::size_t>());
      s.counts.push_back(counts_from(run.at("counts")));
    }
    rep.relations.push_back(std::move(s));
  }
  if (!rep.relations.empty()) finalize_sweep(rep);
  return rep;
}

}  // namespace

json to_json(const RunArtifact& a) {
  json j = {{"tool_version", a.tool_version},
            {"kind", a.kind},
            {"label", a.label},
            {"fingerprint", a.fingerprint},
            {"load_report",
             {{"lines_read", a.load_report.lines_read},
              {"duplicates", a.load_report.duplicates},
              {"unknown_relation", a.load_report.unknown_relation}}},
            {"emptied_relations", a.emptied_relations},
            {"audit_retained", a.audit_retained}};
  if (a.report) j["report"] = report_json(*a.report);
  if (a.sweep) j["sweep"] = sweep_json(*a.sweep);
  json inst = json::array();
  for (const auto& r : a.instances) inst.push_back(instance_json(r));
  j["instances"] = std::move(inst);
  return j;
}

RunArtifact artifact_from_json(const json& j) {
  RunArtifact a;
  try {
    a.tool_version = j.at("tool_version").get<std::string>();
    a.kind = j.at("kind").get<std::string>();
    a.label = j.at("label").get<std::string>();
    a.fingerprint = j.at("fingerprint");
    const auto& lr = j.at("load_report");
    a.load_report.lines_read = lr.at("lines_read").get<std::size_t>();
    a.load_report.duplicates = lr.at("duplicates").get<std::size_t>();
    a.load_report.unknown_relation = lr.at("unknown_relation").get<std::size_t>();
    a.emptied_relations = j.at("emptied_relations").get<std::vector<std::string>>();
    a.audit_retained = j.at("audit_retained").get<bool>();
    if (j.contains("report")) a.report = report_from(j.at("report"));
    if (j.contains("sweep")) a.sweep = sweep_from(j.at("sweep"));
    for (const auto& r : j.at("instances")) a.instances.push_back(instance_from(r));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed artifact: ") + e.what());
  }
  return a;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw DataError("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void save_artifact(const RunArtifact& artifact, const std::filesystem::path& path) {
  write_file_atomic(path, to_json(artifact).dump(1) + "\n");
}

RunArtifact load_artifact(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read artifact " + path.string());
  try {
    return artifact_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------- tables

TableFormat parse_table_format(std::string_view s) {
  if (s == "json") return TableFormat::Json;
  if (s == "csv") return TableFormat::Csv;
  if (s == "md" || s == "markdown") return TableFormat::Markdown;
  throw ConfigError("unknown table format '" + std::string(s) + "' (json, csv, markdown)");
}

std::string_view extension(TableFormat f) {
  switch (f) {
    case TableFormat::Json: return "json";
    case TableFormat::Csv: return "csv";
    case TableFormat::Markdown: return "md";
  }
  return "txt";
}

std::vector<Table> build_tables(const RunArtifact& a) {
  std::vector<Table> out;
  const std::string label = a.label.empty() ? "run" : a.label;
  if (a.report) {
    const CoherencyReport& r = *a.report;
    const std::string n = std::to_string(r.total_instances);
    out.push_back({"coherency",
                   {"Model", "Round 1", "Round 2", "Avg.", "#Instances"},
                   {{label, format_percent(r.round1), format_percent(r.round2), format_percent(r.avg), n}}});
    out.push_back({"correctness",
                   {"Model", "c1", "c2", "All correct", "#relations", "#Instances"},
                   {{label, format_percent(r.c1), format_percent(r.c2), format_percent(r.all_correct),
                     std::to_string(r.relations.size()), n}}});
    Table per_type{"per_type", {"Model"}, {{label}}};
    for (const auto& t : r.per_type) {
      per_type.header.push_back(t.label + " Coherency");
      per_type.header.push_back(t.label + " #Instances");
      per_type.rows[0].push_back(t.relations ? format_percent(t.avg) : "-");
      per_type.rows[0].push_back(std::to_string(t.instances));
    }
    out.push_back(std::move(per_type));
    Table rels{"relations",
               {"Relation", "Type", "Symmetric", "Round 1", "Round 2", "Avg.", "c1", "c2",
                "All correct", "#Instances"},
               {}};
    for (const auto& s : r.relations)
      rels.rows.push_back({s.relation_id, std::string(to_string(s.rel_type)), s.symmetric ? "yes" : "no",
                           format_percent(s.round1()), format_percent(s.round2()),
                           format_percent(s.avg()), format_percent(s.c1()), format_percent(s.c2()),
                           format_percent(s.all_correct()), std::to_string(s.counts.instances)});
    out.push_back(std::move(rels));
  }
  if (a.sweep) {
    const SweepReport& s = *a.sweep;
    if (s.relations.empty()) throw EmptyResultError("nothing to render");
    out.push_back({"sweep",
                   {"Model", "Min.", "Avg.", "Max.", "#Instances"},
                   {{label, format_percent(s.macro_min), format_percent(s.macro_avg),
                     format_percent(s.macro_max), std::to_string(s.instances_per_run)}}});
    out.push_back({"sweep_runs",
                   {"Model", "Min.", "Avg.", "Max.", "#Runs"},
                   {{label, format_percent(s.run_min), format_percent(s.run_avg),
                     format_percent(s.run_max), std::to_string(s.runs)}}});
  }
  if (out.empty()) throw EmptyResultError("nothing to render");
  return out;
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string render_table(const Table& table, TableFormat format) {
  std::ostringstream os;
  switch (format) {
    case TableFormat::Markdown: {
      auto row = [&](const std::vector<std::string>& cells) {
        os << '|';
        for (const auto& c : cells) os << ' ' << c << " |";
        os << '\n';
      };
      row(table.header);
      os << '|';
      for (std::size_t i = 0; i < table.header.size(); ++i) os << (i == 0 ? " --- |" : " ---: |");
      os << '\n';
      for (const auto& r : table.rows) row(r);
      break;
    }
    case TableFormat::Csv: {
      auto row = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << csv_cell(cells[i]);
        os << '\n';
      };
      row(table.header);
      for (const auto& r : table.rows) row(r);
      break;
    }
    case TableFormat::Json: {
      // Rows keep column order.
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (const auto& r : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < table.header.size() && i < r.size(); ++i) obj[table.header[i]] = r[i];
        rows.push_back(std::move(obj));
      }
      nlohmann::ordered_json doc;
      doc["table"] = table.name;
      doc["columns"] = table.header;
      doc["rows"] = std::move(rows);
      os << doc.dump(1) << '\n';
      break;
    }
  }
  return os.str();
}

std::vector<RenderedDocument> emit_tables(const RunArtifact& artifact, TableFormat format) {
  std::vector<RenderedDocument> docs;
  for (const auto& t : build_tables(artifact))
    docs.push_back({t.name + "." + std::string(extension(format)), render_table(t, format)});
  return docs;
}

// ---------------------------------------------------------------- series

std::vector<SeriesPoint> emit_relation_series(const RunArtifact& artifact) {
  if (!artifact.sweep) throw ConfigError("relation series needs a sweep artifact");
  std::vector<SeriesPoint> out;
  for (const auto& r : artifact.sweep->relations)
    out.push_back({r.relation_id, to_double(r.avg), r.stddev, r.counts.size()});
  return out;
}

std::string series_csv(const std::vector<SeriesPoint>& series) {
  std::ostringstream os;
  os << "relation,mean,stddev,samples\n";
  char buf[64];
  for (const auto& p : series) {
    os << csv_cell(p.relation_id);
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,", 100.0 * p.mean, 100.0 * p.stddev);
    os << buf << p.samples << '\n';
  }
  return os.str();
}

}  // namespace coherency
