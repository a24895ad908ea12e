#include "coherency/backend.hpp"

#include <algorithm>
#include <sstream>

#include "coherency/errors.hpp"
#include "coherency/text.hpp"

namespace coherency {

using nlohmann::json;

std::string_view to_string(BackendKind k) {
  switch (k) {
    case BackendKind::Masked: return "masked";
    case BackendKind::Seq2Seq: return "seq2seq";
    case BackendKind::Autoregressive: return "autoregressive";
  }
  return "?";
}

BackendKind parse_backend_kind(std::string_view s) {
  if (s == "masked") return BackendKind::Masked;
  if (s == "seq2seq") return BackendKind::Seq2Seq;
  if (s == "autoregressive") return BackendKind::Autoregressive;
  throw BackendError("unknown backend kind '" + std::string(s) + "'");
}

void BackendCapabilities::validate() const {
  if (kind == BackendKind::Autoregressive) {
    if (!mask_marker.empty()) throw BackendError("autoregressive backend declares a mask marker");
  } else if (mask_marker.empty()) {
    throw BackendError("masked/seq2seq backend must declare a mask marker");
  }
  if (max_n_best < 1) throw BackendError("max_n_best must be >= 1");
}

json to_json(const BackendCapabilities& caps) {
  return {{"kind", std::string(to_string(caps.kind))},
          {"mask_marker", caps.mask_marker},
          {"single_token_only", caps.single_token_only},
          {"max_n_best", caps.max_n_best},
          {"supports_banning", caps.supports_banning}};
}

BackendCapabilities capabilities_from_json(const json& j) {
  BackendCapabilities c;
  try {
    c.kind = parse_backend_kind(j.at("kind").get<std::string>());
    c.mask_marker = j.at("mask_marker").get<std::string>();
    c.single_token_only = j.at("single_token_only").get<bool>();
    c.max_n_best = j.at("max_n_best").get<int>();
    c.supports_banning = j.at("supports_banning").get<bool>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed capabilities: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<Prediction> predict(const Backend& backend, const RenderedPrompt& prompt,
                                const EntitySet& banned, int n_best) {
  const BackendCapabilities caps = backend.capabilities();
  if (n_best < 1 || n_best > caps.max_n_best)
    throw ConfigError("n_best " + std::to_string(n_best) + " outside [1, " +
                      std::to_string(caps.max_n_best) + "]");

  PredictRequest req;
  req.prompt = prompt.text;
  req.mask_marker = prompt.slot_marker;
  req.n_best = n_best;
  req.banned.assign(banned.begin(), banned.end());

  std::set<std::string> banned_keys;
  for (const auto& b : banned) banned_keys.insert(normalize_entity(b));

  std::vector<Prediction> raw = backend.predict(req);
  for (std::size_t i = 1; i < raw.size(); ++i)
    if (raw[i].score > raw[i - 1].score)
      throw BackendError("n-best list not sorted by score");

  std::vector<Prediction> out;
  for (auto& p : raw) {
    if (banned_keys.count(normalize_entity(p.text))) continue;
    p.rank = static_cast<int>(out.size()) + 1;
    out.push_back(std::move(p));
    if (static_cast<int>(out.size()) == n_best) break;
  }
  return out;
}

std::vector<std::pair<std::string, double>> score_candidates(
    const Backend& backend, const RenderedPrompt& prompt, std::span<const std::string> candidates) {
  if (candidates.empty()) throw ConfigError("score_candidates: empty candidate list");
  if (prompt.mode.kind != PromptKind::Autoregressive)
    throw ConfigError("typed querying requires an autoregressive prompt");
  const std::vector<double> scores = backend.score(prompt.text, candidates);
  if (scores.size() != candidates.size())
    throw BackendError("score count " + std::to_string(scores.size()) +
                       " does not match candidate count " + std::to_string(candidates.size()));
  std::vector<std::pair<std::string, double>> out;
  out.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) out.emplace_back(candidates[i], scores[i]);
  return out;
}

int token_count(const Backend& backend, std::string_view entity) {
  return backend.token_count(entity);
}

EntityFilter export_filter(const Backend& backend, const Corpus& corpus) {
  std::map<std::string, bool> table;
  for (const auto& e : all_entities(corpus)) table[e] = backend.token_count(e) == 1;
  return EntityFilter(std::move(table));
}

int count_words(std::string_view text) {
  std::istringstream in{std::string(text)};
  int n = 0;
  std::string w;
  while (in >> w) ++n;
  return n;
}

}  // namespace coherency
