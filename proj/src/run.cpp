#include "coherency/run.hpp"

#include <cstdlib>
#include <fstream>

#include "coherency/errors.hpp"
#include "coherency/http.hpp"
#include "coherency/synthetic.hpp"

namespace coherency {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kEvaluateModes = {"manual", "optimized", "evidence", "autoregressive"};

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (v == o) return true;
  return false;
}

PromptMode prompt_mode(const std::string& mode) {
  if (mode == "optimized") return PromptMode::optimized();
  if (mode == "autoregressive") return PromptMode::autoregressive();
  if (mode == "paraphrase-sweep") return PromptMode::paraphrase(0);
  return PromptMode::manual();
}

EvalOptions eval_options(const RunConfig& c, const std::atomic<bool>* cancel) {
  EvalOptions o;
  o.mode = prompt_mode(c.mode);
  o.n_best = c.n_best;
  o.use_evidence = c.mode == "evidence";
  o.evidence_placement =
      c.evidence_placement == "before" ? EvidencePlacement::BeforePrompt : EvidencePlacement::AfterPrompt;
  o.exclusion = parse_exclusion_mode(c.exclusion);
  o.candidate_scope = parse_candidate_scope(c.candidates);
  o.parallelism = c.parallelism;
  o.cancel = cancel;
  return o;
}

struct Prepared {
  std::shared_ptr<const Backend> backend;
  Corpus full;    // as loaded; feeds the answer index
  Corpus corpus;  // after entity filtering
  std::vector<std::string> emptied;
  EvalOptions options;
  std::string run_id;
};

Corpus load_inputs(const RunConfig& c) {
  if (!c.triples.empty() || !c.relations.empty()) {
    if (c.triples.empty() || c.relations.empty())
      throw ConfigError("--triples and --relations must be given together");
    return load_corpus(c.triples, c.relations);
  }
  const std::string prefix = "synthetic:";
  if (c.backend.rfind(prefix, 0) == 0) return load_kb(c.backend.substr(prefix.size())).facts;
  throw ConfigError("no dataset: pass --triples and --relations");
}

// Everything that needs the backend happens after the local checks.
Prepared prepare(const RunConfig& c, bool sweep, const std::atomic<bool>* cancel) {
  c.validate(sweep);
  Prepared p;
  p.run_id = c.run_id.empty() ? (sweep ? std::string("sweep") : "evaluate-" + c.mode) : c.run_id;
  p.options = eval_options(c, cancel);
  p.full = load_inputs(c);
  p.corpus = p.full;

  if (!c.filter.empty()) {
    const EntityFilter f = EntityFilter::load(c.filter);
    p.corpus = apply_entity_filter(p.corpus, f.predicate());
  }

  // Local evaluability check before any network traffic.
  std::size_t evaluable = 0;
  for (const auto& id : p.corpus.evaluable_relations()) {
    const Relation& rel = p.corpus.relation(id);
    const PromptKind kind = sweep ? PromptKind::Paraphrase : p.options.mode.kind;
    if (!supports_mode(rel, kind)) continue;
    if (p.options.use_evidence) {
      const auto& ts = p.corpus.triples.at(id);
      if (std::none_of(ts.begin(), ts.end(), [](const Triple& t) { return t.evidence.has_value(); }))
        continue;
    }
    ++evaluable;
  }
  if (evaluable == 0)
    throw EmptyResultError(sweep ? "no paraphrase-covered relations" : "0 evaluable relations");

  fs::create_directories(c.out);
  p.backend = make_backend(c.backend);
  const BackendCapabilities caps = p.backend->capabilities();
  if (caps.kind == BackendKind::Autoregressive && p.options.mode.kind != PromptKind::Autoregressive)
    throw ConfigError("autoregressive backends need --mode autoregressive (typed querying)");
  if (p.options.mode.kind != PromptKind::Autoregressive && c.n_best > caps.max_n_best)
    throw ConfigError("--n-best " + std::to_string(c.n_best) + " exceeds the backend's max_n_best " +
                      std::to_string(caps.max_n_best));

  const bool single = c.single_token == "on" || (c.single_token == "auto" && caps.single_token_only);
  if (single || c.export_filter) {
    const EntityFilter f = export_filter(*p.backend, p.corpus);
    if (c.export_filter) {
      f.save(fs::path(c.out) / (p.run_id + ".filter.jsonl"));
    }
    if (single) p.corpus = apply_entity_filter(p.corpus, f.predicate());
  }
  p.emptied = emptied_relations(p.full, p.corpus);
  return p;
}

json fingerprint_for(const RunConfig& c, const Backend& backend) {
  json fp = c.fingerprint();
  fp["backend"] = {{"specifier", c.backend}, {"identity", backend.identity()}};
  fp["tool_version"] = kToolVersion;
  return fp;
}

void write_outputs(const RunArtifact& artifact, const fs::path& out, const std::string& run_id,
                   const std::vector<std::string>& formats, int gallery) {
  for (const auto& f : formats) {
    const TableFormat format = parse_table_format(f);
    for (const auto& doc : emit_tables(artifact, format))
      write_file_atomic(out / (run_id + "." + doc.name), doc.content);
  }
  if (artifact.sweep) write_file_atomic(out / (run_id + ".series.csv"), series_csv(emit_relation_series(artifact)));
  if (artifact.report && artifact.audit_retained && gallery > 0) {
    const Gallery g = example_gallery(artifact, static_cast<std::size_t>(gallery));
    write_file_atomic(out / (run_id + ".gallery.md"), render_gallery_markdown(g));
    write_file_atomic(out / (run_id + ".gallery.json"), to_json(g).dump(1) + "\n");
  }
}

}  // namespace

void RunConfig::validate(bool sweep) const {
  if (backend.empty()) throw ConfigError("no backend: pass --backend or set COHERENCY_BACKEND_URL");
  if (sweep) {
    if (mode != "paraphrase-sweep" && mode != "manual")
      throw ConfigError("sweep runs in paraphrase-sweep mode only");
    if (runs < 1) throw ConfigError("--runs must be >= 1");
  } else if (std::find(kEvaluateModes.begin(), kEvaluateModes.end(), mode) == kEvaluateModes.end()) {
    throw ConfigError("unknown mode '" + mode + "' (manual, optimized, evidence, autoregressive)");
  }
  if (n_best < 1) throw ConfigError("--n-best must be >= 1");
  if (!one_of(evidence_placement, {"after", "before"}))
    throw ConfigError("--evidence-placement must be after or before");
  parse_exclusion_mode(exclusion);
  parse_candidate_scope(candidates);
  if (parallelism < 0) throw ConfigError("--parallelism must be >= 0");
  if (!one_of(single_token, {"auto", "on", "off"})) throw ConfigError("--single-token must be auto, on or off");
  for (const auto& f : formats) parse_table_format(f);
  if (out.empty()) throw ConfigError("--out must not be empty");
  if (run_id.find_first_of("/\\") != std::string::npos || run_id == "." || run_id == "..")
    throw ConfigError("--run-id must be a plain name");
  if (gallery < 0) throw ConfigError("--gallery must be >= 0");
}

json RunConfig::fingerprint() const {
  json j = to_json(*this);
  for (const char* k : {"out", "formats", "run_id", "gallery", "parallelism", "backend"}) j.erase(k);
  return j;
}

json to_json(const RunConfig& c) {
  return {{"triples", c.triples},
          {"relations", c.relations},
          {"backend", c.backend},
          {"mode", c.mode},
          {"n_best", c.n_best},
          {"runs", c.runs},
          {"seed", c.seed},
          {"evidence_placement", c.evidence_placement},
          {"exclusion", c.exclusion},
          {"candidates", c.candidates},
          {"parallelism", c.parallelism},
          {"out", c.out},
          {"formats", c.formats},
          {"run_id", c.run_id},
          {"label", c.label},
          {"filter", c.filter},
          {"export_filter", c.export_filter},
          {"single_token", c.single_token},
          {"audit", c.audit},
          {"gallery", c.gallery}};
}

RunConfig merge_config(RunConfig c, const json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  const json known = to_json(c);
  for (const auto& [k, _] : j.items())
    if (!known.contains(k)) throw ConfigError("unknown config key '" + k + "'");
  try {
    auto set = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    set("triples", c.triples);
    set("relations", c.relations);
    set("backend", c.backend);
    set("mode", c.mode);
    set("n_best", c.n_best);
    set("runs", c.runs);
    set("seed", c.seed);
    set("evidence_placement", c.evidence_placement);
    set("exclusion", c.exclusion);
    set("candidates", c.candidates);
    set("parallelism", c.parallelism);
    set("out", c.out);
    set("formats", c.formats);
    set("run_id", c.run_id);
    set("label", c.label);
    set("filter", c.filter);
    set("export_filter", c.export_filter);
    set("single_token", c.single_token);
    set("audit", c.audit);
    set("gallery", c.gallery);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  return c;
}

std::shared_ptr<const Backend> make_backend(const std::string& specifier) {
  const std::string prefix = "synthetic:";
  if (specifier.rfind(prefix, 0) == 0)
    return std::make_shared<SyntheticBackend>(
        std::make_shared<const SyntheticKB>(load_kb(specifier.substr(prefix.size()))));
  if (specifier.rfind("http://", 0) == 0 || specifier.rfind("https://", 0) == 0)
    return std::make_shared<HttpBackend>(specifier);
  throw ConfigError("backend must be an http(s) URL or synthetic:<path>, got '" + specifier + "'");
}

RunOutcome cmd_evaluate(const RunConfig& c, const std::atomic<bool>* cancel) {
  Prepared p = prepare(c, false, cancel);
  const AnswerIndex index = build_answer_index(p.full);
  EvaluationResult res = evaluate_corpus(*p.backend, p.corpus, index, p.options);

  RunOutcome out;
  RunArtifact& a = out.artifact;
  a.kind = "evaluate";
  a.label = c.label.empty() ? p.run_id : c.label;
  a.fingerprint = fingerprint_for(c, *p.backend);
  res.report.fingerprint = a.fingerprint;
  a.report = std::move(res.report);
  a.audit_retained = c.audit;
  if (c.audit) a.instances = std::move(res.instances);
  a.emptied_relations = p.emptied;
  a.load_report = p.full.report;

  write_outputs(a, c.out, p.run_id, c.formats, c.gallery);
  out.artifact_path = fs::path(c.out) / (p.run_id + ".artifact.json");
  save_artifact(a, out.artifact_path);
  return out;
}

RunOutcome cmd_sweep(const RunConfig& c_in, const std::atomic<bool>* cancel) {
  RunConfig c = c_in;
  c.mode = "paraphrase-sweep";
  Prepared p = prepare(c, true, cancel);
  const AnswerIndex index = build_answer_index(p.full);
  SweepReport rep = paraphrase_sweep(*p.backend, p.corpus, index, static_cast<std::size_t>(c.runs),
                                     c.seed, p.options);

  RunOutcome out;
  RunArtifact& a = out.artifact;
  a.kind = "sweep";
  a.label = c.label.empty() ? p.run_id : c.label;
  a.fingerprint = fingerprint_for(c, *p.backend);
  rep.fingerprint = a.fingerprint;
  a.sweep = std::move(rep);
  a.audit_retained = false;
  a.emptied_relations = p.emptied;
  a.load_report = p.full.report;

  write_outputs(a, c.out, p.run_id, c.formats, c.gallery);
  out.artifact_path = fs::path(c.out) / (p.run_id + ".artifact.json");
  save_artifact(a, out.artifact_path);
  return out;
}

void cmd_gen_synthetic(const fs::path& config_path, const fs::path& out_dir) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot read " + config_path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(config_path.string() + ": " + e.what());
  }
  const SyntheticKB kb = generate_synthetic(synthetic_config_from_json(j));
  fs::create_directories(out_dir);
  write_triples(kb.facts, out_dir / "triples.jsonl");
  write_relations(kb.facts, out_dir / "relations.jsonl");
  save_kb(kb, out_dir / "kb.json");
}

std::vector<fs::path> cmd_render(const fs::path& artifact_path, const fs::path& out_dir,
                                 const std::vector<std::string>& formats, int gallery) {
  const RunArtifact a = load_artifact(artifact_path);
  for (const auto& f : formats) parse_table_format(f);
  fs::create_directories(out_dir);
  std::string stem = artifact_path.filename().string();
  const std::string suffix = ".artifact.json";
  if (stem.size() > suffix.size() && stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0)
    stem.resize(stem.size() - suffix.size());
  write_outputs(a, out_dir, stem, formats, gallery);
  std::vector<fs::path> written;
  for (const auto& entry : fs::directory_iterator(out_dir))
    if (entry.path().filename().string().rfind(stem + ".", 0) == 0) written.push_back(entry.path());
  std::sort(written.begin(), written.end());
  return written;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const Cancelled*>(&e)) return kExitInterrupted;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DataError*>(&e)) return kExitConfig;
  if (dynamic_cast<const BackendError*>(&e)) return kExitBackend;
  if (dynamic_cast<const EmptyResultError*>(&e)) return kExitEmpty;
  if (dynamic_cast<const BindError*>(&e)) return kExitBind;
  return kExitInternal;
}

}  // namespace coherency
