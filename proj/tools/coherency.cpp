#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "coherency/errors.hpp"
#include "coherency/http.hpp"
#include "coherency/rational.hpp"
#include "coherency/run.hpp"
#include "coherency/synthetic.hpp"

namespace {

using namespace coherency;
using nlohmann::json;

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted.store(true); }

void install_signals() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
}

// Options bound to a scratch RunConfig; only flags actually given override the config file.
struct RunFlags {
  RunConfig values;
  std::string config_file;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> bound;

  template <class T>
  void add(CLI::App* app, const std::string& name, T RunConfig::*field, const std::string& help) {
    CLI::Option* opt = app->add_option(name, values.*field, help);
    bound.emplace_back(opt, [this, field](RunConfig& c) { c.*field = values.*field; });
  }
  void add_flag(CLI::App* app, const std::string& name, bool RunConfig::*field, const std::string& help) {
    CLI::Option* opt = app->add_flag(name, values.*field, help);
    bound.emplace_back(opt, [this, field](RunConfig& c) { c.*field = values.*field; });
  }

  RunConfig resolve() const {
    RunConfig c;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) throw ConfigError("cannot read config file " + config_file);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError(config_file + ": " + e.what());
      }
      c = merge_config(c, j);
    }
    for (const auto& [opt, apply] : bound)
      if (opt->count() > 0) apply(c);
    if (c.backend.empty())
      if (const char* env = std::getenv("COHERENCY_BACKEND_URL")) c.backend = env;
    return c;
  }
};

void add_run_flags(CLI::App* app, RunFlags& f, bool sweep) {
  app->add_option("--config", f.config_file, "JSON config file; flags override its keys");
  f.add(app, "--triples", &RunConfig::triples, "triples file or directory of <relation>.jsonl");
  f.add(app, "--relations", &RunConfig::relations, "relations file");
  f.add(app, "--backend", &RunConfig::backend, "http(s) URL or synthetic:<kb-or-config>");
  if (!sweep) f.add(app, "--mode", &RunConfig::mode, "manual, optimized, evidence or autoregressive");
  f.add(app, "--n-best", &RunConfig::n_best, "predictions requested per query");
  if (sweep) {
    f.add(app, "--runs", &RunConfig::runs, "number of sweep runs");
    f.add(app, "--seed", &RunConfig::seed, "paraphrase sampling seed");
  }
  f.add(app, "--evidence-placement", &RunConfig::evidence_placement, "after or before");
  f.add(app, "--exclusion", &RunConfig::exclusion, "pivot, gold or none");
  f.add(app, "--candidates", &RunConfig::candidates, "typed-querying candidate scope: relation or corpus");
  f.add(app, "--parallelism", &RunConfig::parallelism, "worker limit, 0 = default");
  f.add(app, "--out", &RunConfig::out, "output directory");
  f.add(app, "--format", &RunConfig::formats, "table formats: markdown, csv, json");
  f.add(app, "--run-id", &RunConfig::run_id, "output file stem");
  f.add(app, "--label", &RunConfig::label, "row label in tables");
  f.add(app, "--filter", &RunConfig::filter, "entity filter file to apply");
  f.add_flag(app, "--export-filter", &RunConfig::export_filter, "write <run-id>.filter.jsonl");
  f.add(app, "--single-token", &RunConfig::single_token, "auto, on or off");
  f.add_flag(app, "--audit,!--no-audit", &RunConfig::audit, "keep per-instance records in the artifact");
  f.add(app, "--gallery", &RunConfig::gallery, "examples per gallery bucket (0 disables)");
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    const int code = exit_code_for(e);
    std::cerr << "error: " << e.what() << "\n";
    return code;
  }
}

void print_summary(const RunOutcome& o) {
  std::cout << "artifact: " << o.artifact_path.string() << "\n";
  if (o.artifact.report) {
    const auto& r = *o.artifact.report;
    std::cout << "round 1: " << format_percent(r.round1) << "  round 2: "
              << format_percent(r.round2) << "  avg: " << format_percent(r.avg)
              << "  relations: " << r.relations.size() << "\n";
  }
  if (o.artifact.sweep) {
    const auto& s = *o.artifact.sweep;
    std::cout << "min: " << format_percent(s.macro_min) << "  avg: " << format_percent(s.macro_avg)
              << "  max: " << format_percent(s.macro_max) << "\n";
  }
}

int serve(const std::string& kb_path, const std::string& host, int port) {
  auto kb = std::make_shared<const SyntheticKB>(load_kb(kb_path));
  ReferenceServer server(std::make_shared<SyntheticBackend>(kb));
  server.bind(host, port);
  std::cout << "listening on " << server.url() << std::endl;
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done.load() && !g_interrupted.load()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
  });
  server.listen();
  done.store(true);
  watcher.join();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Factual coherency evaluation of language models"};
  app.require_subcommand(1);

  RunFlags eval_flags, sweep_flags;
  auto* evaluate = app.add_subcommand("evaluate", "two-round coherency evaluation");
  add_run_flags(evaluate, eval_flags, false);
  auto* sweep = app.add_subcommand("sweep", "paraphrase sweep over several runs");
  add_run_flags(sweep, sweep_flags, true);

  std::string gen_config, gen_out = ".";
  auto* gen = app.add_subcommand("gen-synthetic", "generate a synthetic corpus and KB");
  gen->add_option("--config", gen_config, "synthetic KB config (JSON)")->required();
  gen->add_option("--out", gen_out, "output directory");

  std::string kb_path, host = "127.0.0.1";
  int port = 8080;
  auto* srv = app.add_subcommand("serve", "serve a synthetic KB over the wire protocol");
  srv->add_option("--kb", kb_path, "KB file or synthetic config")->required();
  srv->add_option("--host", host, "bind address");
  srv->add_option("--port", port, "port (0 picks a free one)");

  std::string artifact_path, render_out = ".";
  std::vector<std::string> render_formats = {"markdown", "csv", "json"};
  int render_gallery = 3;
  auto* render = app.add_subcommand("render", "re-render tables from an artifact");
  render->add_option("artifact", artifact_path, "artifact file")->required();
  render->add_option("--out", render_out, "output directory");
  render->add_option("--format", render_formats, "table formats");
  render->add_option("--gallery", render_gallery, "examples per gallery bucket (0 disables)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  install_signals();

  if (*evaluate)
    return run_guarded([&] {
      print_summary(cmd_evaluate(eval_flags.resolve(), &g_interrupted));
      return kExitOk;
    });
  if (*sweep)
    return run_guarded([&] {
      print_summary(cmd_sweep(sweep_flags.resolve(), &g_interrupted));
      return kExitOk;
    });
  if (*gen)
    return run_guarded([&] {
      cmd_gen_synthetic(gen_config, gen_out);
      std::cout << "wrote " << gen_out << "/triples.jsonl, relations.jsonl, kb.json\n";
      return kExitOk;
    });
  if (*srv) return run_guarded([&] { return serve(kb_path, host, port); });
  if (*render)
    return run_guarded([&] {
      for (const auto& p : cmd_render(artifact_path, render_out, render_formats, render_gallery))
        std::cout << p.string() << "\n";
      return kExitOk;
    });
  return kExitInternal;
}
