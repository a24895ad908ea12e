#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coherency/backend.hpp"
#include "coherency/reporting.hpp"

namespace coherency {

// Exit codes shared by every command.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitBackend = 3,
  kExitEmpty = 4,
  kExitBind = 5,
  kExitInterrupted = 130,
};

struct RunConfig {
  std::string triples;
  std::string relations;
  std::string backend;  // URL or "synthetic:<path>"
  std::string mode = "manual";  // manual, optimized, evidence, autoregressive, paraphrase-sweep
  int n_best = 10;
  int runs = 10;
  std::uint64_t seed = 0;
  std::string evidence_placement = "after";
  std::string exclusion = "pivot";
  std::string candidates = "relation";
  int parallelism = 0;
  std::string out = ".";
  std::vector<std::string> formats = {"markdown", "csv", "json"};
  std::string run_id;
  std::string label;
  std::string filter;              // entity filter file to apply
  bool export_filter = false;      // write <run-id>.filter.jsonl from the backend
  std::string single_token = "auto";  // auto, on, off
  bool audit = true;
  int gallery = 3;

  // Checks everything that can be checked without touching the backend.
  void validate(bool sweep) const;
  // Fields that define the experiment (no output locations).
  nlohmann::json fingerprint() const;
};

nlohmann::json to_json(const RunConfig& c);
// Overlays keys present in `j` onto `base`.
RunConfig merge_config(RunConfig base, const nlohmann::json& j);

// Builds the backend named by a specifier: "synthetic:<kb-or-config>" or an http(s) URL.
std::shared_ptr<const Backend> make_backend(const std::string& specifier);

struct RunOutcome {
  RunArtifact artifact;
  std::filesystem::path artifact_path;
};

RunOutcome cmd_evaluate(const RunConfig& config, const std::atomic<bool>* cancel = nullptr);
RunOutcome cmd_sweep(const RunConfig& config, const std::atomic<bool>* cancel = nullptr);
void cmd_gen_synthetic(const std::filesystem::path& config_path, const std::filesystem::path& out_dir);
// Re-renders the tables (and gallery/series) of a stored artifact into out_dir.
std::vector<std::filesystem::path> cmd_render(const std::filesystem::path& artifact_path,
                                              const std::filesystem::path& out_dir,
                                              const std::vector<std::string>& formats, int gallery);

// Maps an exception from the commands above to an exit code.
int exit_code_for(const std::exception& e);

}  // namespace coherency
