#include <algorithm>
#include <set>
#include <sstream>

#include "coherency/errors.hpp"
#include "coherency/reporting.hpp"
#include "coherency/text.hpp"

namespace coherency {

using nlohmann::json;

std::string_view to_string(Bucket b) {
  switch (b) {
    case Bucket::CoherentCorrect: return "Coherent & Correct";
    case Bucket::CoherentIncorrect: return "Coherent & Incorrect";
    case Bucket::IncoherentCorrect: return "Incoherent & Correct (1st)";
    case Bucket::IncoherentIncorrect: return "Incoherent & Incorrect";
  }
  return "?";
}

const std::vector<std::string>& default_pronoun_stoplist() {
  static const std::vector<std::string> kList = {"it", "he", "she", "they", "this", "that"};
  return kList;
}

Gallery example_gallery(const RunArtifact& artifact, std::size_t per_bucket,
                        const std::vector<std::string>& stoplist) {
  if (!artifact.audit_retained) throw ConfigError("example gallery needs the audit trail");
  std::set<std::string> stop;
  for (const auto& s : stoplist) stop.insert(normalize_entity(s));

  Gallery g;
  for (Bucket b : {Bucket::CoherentCorrect, Bucket::CoherentIncorrect, Bucket::IncoherentCorrect,
                   Bucket::IncoherentIncorrect})
    g.buckets.push_back({b, 0, 0, 0, {}});

  auto repeats = [](const StepRecord& s) {
    return s.answer && normalize_entity(*s.answer) == normalize_entity(s.query_entity);
  };
  auto pronoun = [&](const StepRecord& s) { return s.answer && stop.count(normalize_entity(*s.answer)) > 0; };

  for (const auto& inst : artifact.instances) {
    for (int round = 1; round <= 2; ++round) {
      const RoundRecord& r = round == 1 ? inst.round1 : inst.round2;
      const std::string& first_gold = round == 1 ? inst.object : inst.subject;
      const bool first_correct = r.first.answer && partial_match(*r.first.answer, first_gold);
      const Bucket b = r.coherent ? (first_correct ? Bucket::CoherentCorrect : Bucket::CoherentIncorrect)
                                  : (first_correct ? Bucket::IncoherentCorrect : Bucket::IncoherentIncorrect);
      GalleryEntry e;
      e.relation_id = inst.relation_id;
      e.subject = inst.subject;
      e.object = inst.object;
      e.round = round;
      e.forward_prompt = r.first.prompt;
      e.forward_answer = r.first.answer.value_or("");
      e.backward_prompt = r.second.prompt;
      e.backward_answer = r.second.answer.value_or("");
      e.repetition = repeats(r.first) || repeats(r.second);
      e.pronoun = pronoun(r.first) || pronoun(r.second);

      GalleryBucket& gb = g.buckets[static_cast<std::size_t>(b)];
      ++gb.total;
      gb.repetition += e.repetition;
      gb.pronoun += e.pronoun;
      if (gb.examples.size() < per_bucket) gb.examples.push_back(std::move(e));
    }
  }
  return g;
}

json to_json(const Gallery& g) {
  json buckets = json::array();
  for (const auto& b : g.buckets) {
    json ex = json::array();
    for (const auto& e : b.examples) {
      json tags = json::array();
      if (e.repetition) tags.push_back("Repetition");
      if (e.pronoun) tags.push_back("Pronoun");
      ex.push_back({{"relation", e.relation_id}, {"subject", e.subject}, {"object", e.object},
                    {"round", e.round}, {"forward", {{"prompt", e.forward_prompt}, {"answer", e.forward_answer}}},
                    {"backward", {{"prompt", e.backward_prompt}, {"answer", e.backward_answer}}},
                    {"tags", tags}});
    }
    buckets.push_back({{"bucket", std::string(to_string(b.bucket))}, {"total", b.total},
                       {"repetition", b.repetition}, {"pronoun", b.pronoun}, {"examples", ex}});
  }
  return {{"buckets", buckets}};
}

std::string render_gallery_markdown(const Gallery& g) {
  std::ostringstream os;
  os << "| Type | Tags | Relation | Forward | Backward |\n| --- | --- | --- | --- | --- |\n";
  for (const auto& b : g.buckets) {
    for (const auto& e : b.examples) {
      std::string tags;
      if (e.repetition) tags += "Repetition";
      if (e.pronoun) tags += tags.empty() ? "Pronoun" : ", Pronoun";
      os << "| " << to_string(b.bucket) << " | " << tags << " | " << e.relation_id << ": " << e.subject
         << ", " << e.object << " | " << e.forward_prompt << " -> " << e.forward_answer << " | "
         << e.backward_prompt << " -> " << e.backward_answer << " |\n";
    }
  }
  return os.str();
}

}  // namespace coherency
