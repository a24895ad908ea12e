#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <string_view>

#include "coherency/corpus.hpp"

namespace coherency {

enum class PromptKind { Manual, Optimized, Paraphrase, Autoregressive };

struct PromptMode {
  PromptKind kind = PromptKind::Manual;
  std::size_t paraphrase_index = 0;  // only for Paraphrase

  static PromptMode manual() { return {PromptKind::Manual, 0}; }
  static PromptMode optimized() { return {PromptKind::Optimized, 0}; }
  static PromptMode paraphrase(std::size_t i) { return {PromptKind::Paraphrase, i}; }
  static PromptMode autoregressive() { return {PromptKind::Autoregressive, 0}; }

  bool operator==(const PromptMode&) const = default;
};

std::string describe(const PromptMode& mode);

enum class EvidencePlacement { BeforePrompt, AfterPrompt };

struct RenderedPrompt {
  std::string text;
  Direction direction = Direction::PredictObject;
  std::string slot_marker;  // empty for autoregressive prompts
  PromptMode mode;
};

// The source template for (mode, direction), or nullptr if the relation lacks it.
const std::string* template_for(const Relation& relation, const PromptMode& mode,
                                Direction direction);

bool supports_mode(const Relation& relation, PromptKind kind);

// Fills the known slot with `known_entity` and the unknown slot with
// `slot_marker`. Autoregressive prompts end where the answer begins.
RenderedPrompt render(const Relation& relation, std::string_view known_entity,
                      Direction direction, std::string_view slot_marker, const PromptMode& mode);

// Joins prompt and evidence with a single space.
RenderedPrompt attach_evidence(RenderedPrompt prompt, std::string_view evidence,
                               EvidencePlacement placement = EvidencePlacement::AfterPrompt);

std::size_t sample_paraphrase_index(const Relation& relation, std::mt19937_64& rng);
const std::string& sample_paraphrase(const Relation& relation, std::mt19937_64& rng);

}  // namespace coherency
