#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coherency/corpus.hpp"
#include "coherency/prompting.hpp"

namespace coherency {

enum class BackendKind { Masked, Seq2Seq, Autoregressive };

std::string_view to_string(BackendKind k);  // wire names: masked, seq2seq, autoregressive
BackendKind parse_backend_kind(std::string_view s);

struct BackendCapabilities {
  BackendKind kind = BackendKind::Masked;
  std::string mask_marker = "[MASK]";
  bool single_token_only = false;
  int max_n_best = 10;
  bool supports_banning = true;

  void validate() const;
  bool operator==(const BackendCapabilities&) const = default;
};

nlohmann::json to_json(const BackendCapabilities& caps);
BackendCapabilities capabilities_from_json(const nlohmann::json& j);

struct Prediction {
  std::string text;
  double score = 0.0;
  int rank = 0;  // 1-based position in the n-best list

  bool operator==(const Prediction&) const = default;
};

struct PredictRequest {
  std::string prompt;
  std::string mask_marker;
  int n_best = 1;
  std::vector<std::string> banned;
};

// Inference backend. Implementations must be safe for concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendCapabilities capabilities() const = 0;
  // n-best answers sorted by non-increasing score.
  virtual std::vector<Prediction> predict(const PredictRequest& request) const = 0;
  // One score per candidate, index-aligned.
  virtual std::vector<double> score(std::string_view prompt_prefix,
                                    std::span<const std::string> candidates) const = 0;
  virtual int token_count(std::string_view text) const = 0;
  // Human-readable identity recorded in run fingerprints.
  virtual std::string identity() const = 0;
};

// Engine-facing predict: validates n_best, drops banned answers (case-insensitive
// exact) whether or not the backend honored the ban, and assigns contiguous ranks.
std::vector<Prediction> predict(const Backend& backend, const RenderedPrompt& prompt,
                                const EntitySet& banned, int n_best);

std::vector<std::pair<std::string, double>> score_candidates(
    const Backend& backend, const RenderedPrompt& prompt, std::span<const std::string> candidates);

int token_count(const Backend& backend, std::string_view entity);

// Token-count-1 acceptance table over every entity of `corpus`.
EntityFilter export_filter(const Backend& backend, const Corpus& corpus);

// Whitespace-separated word count; the reference tokenizer.
int count_words(std::string_view text);

}  // namespace coherency
