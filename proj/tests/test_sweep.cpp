#include <doctest.h>

#include "coherency/errors.hpp"
#include "coherency/engine.hpp"
#include "coherency/reporting.hpp"
#include "support.hpp"

using namespace coherency;

namespace {

std::shared_ptr<SyntheticKB> discriminating_kb() {
  SyntheticKBConfig cfg;
  cfg.seed = 2;
  cfg.relations = {{"RD", RelType::OneToOne, false, 12, 5, 4, 0, 0, 0}};
  auto kb = std::make_shared<SyntheticKB>(generate_synthetic(cfg));
  kb->poisoned_templates = {kb->facts.relation("RD").paraphrases.at(1)};
  return kb;
}

}  // namespace

TEST_CASE("sweep is deterministic and ordered") {
  auto kb = std::make_shared<SyntheticKB>(generate_synthetic(testing::mixed_config(5, BehaviorKind::UniformRandom)));
  const SyntheticBackend b(kb);
  const AnswerIndex idx = build_answer_index(kb->facts);
  const SweepReport a = paraphrase_sweep(b, kb->facts, idx, 6, 7);
  const SweepReport c = paraphrase_sweep(b, kb->facts, idx, 6, 7);
  RunArtifact x, y;
  x.kind = y.kind = "sweep";
  x.sweep = a;
  y.sweep = c;
  CHECK(to_json(x).dump() == to_json(y).dump());
  CHECK(a.macro_min <= a.macro_avg);
  CHECK(a.macro_avg <= a.macro_max);
  CHECK(a.run_min <= a.run_avg);
  CHECK(a.run_avg <= a.run_max);
  for (const auto& r : a.relations) {
    CHECK(r.min <= r.avg);
    CHECK(r.avg <= r.max);
    CHECK(r.template_index.size() == 6);
  }
  CHECK(a.run_macro.size() == 6);
}

TEST_CASE("one run collapses min, avg and max") {
  auto kb = std::make_shared<SyntheticKB>(generate_synthetic(testing::mixed_config(5, BehaviorKind::UniformRandom)));
  const SyntheticBackend b(kb);
  const SweepReport s = paraphrase_sweep(b, kb->facts, build_answer_index(kb->facts), 1, 0);
  CHECK(s.macro_min == s.macro_avg);
  CHECK(s.macro_avg == s.macro_max);
  CHECK_THROWS_AS(paraphrase_sweep(b, kb->facts, build_answer_index(kb->facts), 0, 0), ConfigError);
}

TEST_CASE("a single paraphrase gives equal min, avg and max") {
  auto cfg = testing::mixed_config(5, BehaviorKind::UniformRandom);
  cfg.paraphrases = 1;
  auto kb = std::make_shared<SyntheticKB>(generate_synthetic(cfg));
  const SyntheticBackend b(kb);
  const SweepReport s = paraphrase_sweep(b, kb->facts, build_answer_index(kb->facts), 10, 3);
  for (const auto& r : s.relations) {
    CHECK(r.min == r.max);
    CHECK(r.stddev == 0.0);
  }
}

TEST_CASE("relations without paraphrases are excluded") {
  auto kb = std::make_shared<SyntheticKB>(generate_synthetic(testing::mixed_config(5, BehaviorKind::Perfect)));
  Corpus c = kb->facts;
  c.relations["R11"].paraphrases.clear();
  const SyntheticBackend b(kb);
  const SweepReport s = paraphrase_sweep(b, c, build_answer_index(c), 2, 0);
  CHECK(s.excluded_relations == std::vector<std::string>{"R11"});
  CHECK(s.relations.size() == 3);
  for (auto& [id, r] : c.relations) r.paraphrases.clear();
  CHECK_THROWS_AS(paraphrase_sweep(b, c, build_answer_index(c), 2, 0), EmptyResultError);
}

TEST_CASE("discriminating backend spans 0 to 100") {
  auto kb = discriminating_kb();
  const SyntheticBackend b(kb);
  const SweepReport s = paraphrase_sweep(b, kb->facts, build_answer_index(kb->facts), 10, 7);
  REQUIRE(s.relations.size() == 1);
  const auto& r = s.relations[0];
  const auto& ti = r.template_index;
  REQUIRE(std::count(ti.begin(), ti.end(), 0) > 0);
  REQUIRE(std::count(ti.begin(), ti.end(), 1) > 0);
  CHECK(format_percent(r.min) == "0.00");
  CHECK(format_percent(r.max) == "100.00");
  CHECK(s.macro_min < s.macro_max);
  for (std::size_t i = 0; i < ti.size(); ++i) {
    RelationScore rs;
    rs.counts = r.counts[i];
    CHECK(rs.avg() == (ti[i] == 0 ? 1 : 0));
  }
}
