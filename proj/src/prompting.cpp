#include "coherency/prompting.hpp"

#include "coherency/errors.hpp"
#include "coherency/text.hpp"

namespace coherency {

std::string describe(const PromptMode& mode) {
  switch (mode.kind) {
    case PromptKind::Manual: return "manual";
    case PromptKind::Optimized: return "optimized";
    case PromptKind::Paraphrase: return "paraphrase#" + std::to_string(mode.paraphrase_index);
    case PromptKind::Autoregressive: return "autoregressive";
  }
  return "?";
}

const std::string* template_for(const Relation& relation, const PromptMode& mode,
                                Direction direction) {
  switch (mode.kind) {
    case PromptKind::Manual:
      return &relation.template_text;
    case PromptKind::Optimized:
      return relation.optimized_template ? &*relation.optimized_template : nullptr;
    case PromptKind::Paraphrase:
      return mode.paraphrase_index < relation.paraphrases.size()
                 ? &relation.paraphrases[mode.paraphrase_index]
                 : nullptr;
    case PromptKind::Autoregressive: {
      const auto& t = direction == Direction::PredictObject ? relation.ar_object_last
                                                            : relation.ar_subject_last;
      return t ? &*t : nullptr;
    }
  }
  return nullptr;
}

bool supports_mode(const Relation& relation, PromptKind kind) {
  switch (kind) {
    case PromptKind::Manual: return true;
    case PromptKind::Optimized: return relation.optimized_template.has_value();
    case PromptKind::Paraphrase: return !relation.paraphrases.empty();
    case PromptKind::Autoregressive:
      return relation.ar_object_last.has_value() && relation.ar_subject_last.has_value();
  }
  return false;
}

namespace {

void replace_once(std::string& s, std::string_view slot, std::string_view with,
                  const Relation& relation) {
  const auto pos = s.find(slot);
  if (pos == std::string::npos)
    throw DataError("template of " + relation.id + " lacks slot " + std::string(slot));
  s.replace(pos, slot.size(), with);
}

}  // namespace

RenderedPrompt render(const Relation& relation, std::string_view known_entity,
                      Direction direction, std::string_view slot_marker, const PromptMode& mode) {
  const std::string* tmpl = template_for(relation, mode, direction);
  if (tmpl == nullptr)
    throw DataError("relation " + relation.id + " has no " + describe(mode) + " template");
  if (mode.kind != PromptKind::Autoregressive && slot_marker.empty())
    throw DataError("empty slot marker for " + describe(mode) + " prompt");

  const bool predict_object = direction == Direction::PredictObject;
  const std::string_view known_slot = predict_object ? kSubjectSlot : kObjectSlot;
  const std::string_view unknown_slot = predict_object ? kObjectSlot : kSubjectSlot;

  RenderedPrompt out;
  out.direction = direction;
  out.mode = mode;
  std::string text = trim(*tmpl);

  if (mode.kind == PromptKind::Autoregressive) {
    const std::string_view t(text);
    if (t.size() < unknown_slot.size() || t.substr(t.size() - unknown_slot.size()) != unknown_slot)
      throw DataError("autoregressive template of " + relation.id + " must end with " +
                      std::string(unknown_slot));
    text.resize(text.size() - unknown_slot.size());
    replace_once(text, known_slot, known_entity, relation);
    out.text = trim(text);
    return out;
  }

  // Substitute the marker first: the entity may not contain slot markers, but
  // a marker could accidentally look like one.
  const auto unknown_pos = text.find(unknown_slot);
  const auto known_pos = text.find(known_slot);
  if (unknown_pos == std::string::npos || known_pos == std::string::npos)
    throw DataError("template of " + relation.id + " lacks a required slot");
  if (unknown_pos > known_pos) {
    text.replace(unknown_pos, unknown_slot.size(), slot_marker);
    text.replace(known_pos, known_slot.size(), known_entity);
  } else {
    text.replace(known_pos, known_slot.size(), known_entity);
    text.replace(unknown_pos, unknown_slot.size(), slot_marker);
  }
  out.text = std::move(text);
  out.slot_marker = std::string(slot_marker);
  return out;
}

RenderedPrompt attach_evidence(RenderedPrompt prompt, std::string_view evidence,
                               EvidencePlacement placement) {
  const std::string ev = trim(evidence);
  if (ev.empty()) throw DataError("empty evidence paragraph");
  if (placement == EvidencePlacement::AfterPrompt)
    prompt.text = prompt.text + " " + ev;
  else
    prompt.text = ev + " " + prompt.text;
  return prompt;
}

std::size_t sample_paraphrase_index(const Relation& relation, std::mt19937_64& rng) {
  if (relation.paraphrases.empty())
    throw DataError("relation " + relation.id + " has no paraphrases");
  return uniform_index(rng, relation.paraphrases.size());
}

const std::string& sample_paraphrase(const Relation& relation, std::mt19937_64& rng) {
  return relation.paraphrases[sample_paraphrase_index(relation, rng)];
}

}  // namespace coherency
