#include <doctest.h>

#include <regex>

#include "coherency/errors.hpp"
#include "coherency/reporting.hpp"
#include "support.hpp"

using namespace coherency;

namespace {

RunArtifact bert_like() {
  RelationScore s;
  s.relation_id = "P";
  s.counts.instances = 10000;
  s.counts.round1 = 974;
  s.counts.round2 = 1181;
  s.counts.c1 = 2000;
  s.counts.c2 = 1500;
  s.counts.all_correct = 300;
  RunArtifact a;
  a.kind = "evaluate";
  a.label = "bert-base";
  a.report = summarize_relations({s});
  a.audit_retained = false;
  return a;
}

RunArtifact run(BehaviorKind k, std::uint64_t seed = 3, bool one_to_one_only = false) {
  auto cfg = testing::mixed_config(seed, k);
  if (one_to_one_only) cfg.relations.resize(1);
  auto kb = std::make_shared<SyntheticKB>(generate_synthetic(cfg));
  const SyntheticBackend b(kb);
  auto res = evaluate_corpus(b, kb->facts, build_answer_index(kb->facts), {});
  RunArtifact a;
  a.kind = "evaluate";
  a.label = std::string(to_string(k));
  a.report = res.report;
  a.instances = res.instances;
  return a;
}

const Table& table(const std::vector<Table>& ts, const std::string& name) {
  for (const auto& t : ts)
    if (t.name == name) return t;
  FAIL("no table " << name);
  return ts.front();
}

std::vector<std::string> numbers(const std::string& s) {
  std::vector<std::string> out;
  const std::regex re(R"(\d+\.\d\d)");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), re); it != std::sregex_iterator(); ++it)
    out.push_back(it->str());
  return out;
}

}  // namespace

TEST_CASE("coherency and correctness table rows") {
  const auto tables = build_tables(bert_like());
  const std::string md = render_table(table(tables, "coherency"), TableFormat::Markdown);
  CHECK(md.find("| bert-base | 9.74 | 11.81 | 10.78 | 10000 |") != std::string::npos);
  const Table& corr = table(tables, "correctness");
  CHECK(corr.header == std::vector<std::string>{"Model", "c1", "c2", "All correct", "#relations", "#Instances"});
  CHECK(corr.rows.at(0) == std::vector<std::string>{"bert-base", "20.00", "15.00", "3.00", "1", "10000"});
}

TEST_CASE("csv and markdown carry identical numbers") {
  const RunArtifact a = run(BehaviorKind::UniformRandom);
  for (const auto& t : build_tables(a)) {
    CHECK(numbers(render_table(t, TableFormat::Csv)) == numbers(render_table(t, TableFormat::Markdown)));
    CHECK(numbers(render_table(t, TableFormat::Json)) == numbers(render_table(t, TableFormat::Csv)));
  }
}

TEST_CASE("rendering is pure and survives an artifact round trip") {
  testing::TempDir dir;
  const RunArtifact a = run(BehaviorKind::ReversalCursed);
  save_artifact(a, dir / "x.artifact.json");
  const RunArtifact b = load_artifact(dir / "x.artifact.json");
  for (TableFormat f : {TableFormat::Json, TableFormat::Csv, TableFormat::Markdown}) {
    const auto da = emit_tables(a, f);
    const auto db = emit_tables(b, f);
    REQUIRE(da.size() == db.size());
    for (std::size_t i = 0; i < da.size(); ++i) {
      CHECK(da[i].name == db[i].name);
      CHECK(da[i].content == db[i].content);
    }
  }
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(b.instances == a.instances);
}

TEST_CASE("tables are recomputable from the audit trail") {
  const RunArtifact a = run(BehaviorKind::UniformRandom);
  auto kb = generate_synthetic(testing::mixed_config(3, BehaviorKind::UniformRandom));
  const CoherencyReport again = aggregate(kb.facts, a.instances);
  CHECK(again.round1 == a.report->round1);
  CHECK(again.round2 == a.report->round2);
  CHECK(again.c1 == a.report->c1);
}

TEST_CASE("empty inputs do not render") {
  RunArtifact a;
  a.kind = "sweep";
  a.sweep = SweepReport{};
  CHECK_THROWS_WITH_AS(build_tables(a), "nothing to render", EmptyResultError);
  RunArtifact none;
  CHECK_THROWS_AS(build_tables(none), EmptyResultError);
  CHECK_THROWS_AS(parse_table_format("xml"), ConfigError);
  CHECK(parse_table_format("md") == TableFormat::Markdown);
}

TEST_CASE("per-type table shape") {
  const RunArtifact a = run(BehaviorKind::Perfect);
  const auto tables = build_tables(a);
  const Table& t = table(tables, "per_type");
  CHECK(t.header.at(1) == "1-1 Coherency");
  CHECK(t.header.back() == "All #Instances");
  for (std::size_t i = 1; i < t.rows[0].size(); i += 2) CHECK(t.rows[0][i] == "100.00");
}

TEST_CASE("gallery buckets") {
  // Gold answers are unique on 1-1 data, so every first answer is correct.
  const Gallery p = example_gallery(run(BehaviorKind::Perfect, 3, true), 2);
  REQUIRE(p.buckets.size() == 4);
  CHECK(p.buckets[0].total > 0);
  CHECK(p.buckets[0].examples.size() == 2);
  for (std::size_t i = 1; i < 4; ++i) CHECK(p.buckets[i].total == 0);

  const Gallery e = example_gallery(run(BehaviorKind::Echo), 3);
  std::size_t failures = 0, rep = 0;
  for (const auto& b : e.buckets) {
    if (b.bucket == Bucket::IncoherentCorrect || b.bucket == Bucket::IncoherentIncorrect) {
      failures += b.total;
      rep += b.repetition;
      for (const auto& ex : b.examples) CHECK(ex.repetition);
    }
  }
  CHECK(failures > 0);
  CHECK(rep == failures);
  CHECK_FALSE(render_gallery_markdown(e).empty());
}

TEST_CASE("pronoun sub-tag") {
  Corpus c;
  c.relations["loc"] = testing::make_relation("loc", "[X] is located in [Y] .", RelType::NToOne);
  c.add({"Munich", "Bavaria", "loc", {}});
  testing::TableBackend b;
  b.answers["Munich is located in [MASK] ."] = {"Bavaria"};
  b.answers["[MASK] is located in Bavaria ."] = {"it"};
  auto res = evaluate_corpus(b, c, build_answer_index(c), {});
  RunArtifact a;
  a.kind = "evaluate";
  a.report = res.report;
  a.instances = res.instances;
  const Gallery g = example_gallery(a, 5);
  std::size_t pronoun = 0;
  for (const auto& bk : g.buckets) pronoun += bk.pronoun;
  CHECK(pronoun == 2);
  const Gallery none = example_gallery(a, 5, {"she"});
  pronoun = 0;
  for (const auto& bk : none.buckets) pronoun += bk.pronoun;
  CHECK(pronoun == 0);
}

TEST_CASE("relation series") {
  RunArtifact a;
  a.kind = "sweep";
  SweepReport s;
  s.runs = 2;
  SweepRelation flip{"A", {0, 1}, {}, 0, 0, 0, 0.0};
  Counts one, zero;
  one.instances = zero.instances = 4;
  one.round1 = one.round2 = 4;
  flip.counts = {zero, one};
  SweepRelation flat{"B", {0, 0}, {one, one}, 0, 0, 0, 0.0};
  s.relations = {flip, flat};
  finalize_sweep(s);
  a.sweep = s;
  const auto series = emit_relation_series(a);
  REQUIRE(series.size() == 2);
  CHECK(series[0].mean == 0.5);
  CHECK(series[0].stddev == 0.5);
  CHECK(series[1].stddev == 0.0);
  CHECK(series_csv(series).rfind("relation,mean,stddev,samples\n", 0) == 0);
  CHECK_THROWS_AS(emit_relation_series(bert_like()), ConfigError);

  const auto tables = build_tables(a);
  const Table& t = table(tables, "sweep");
  CHECK(t.header == std::vector<std::string>{"Model", "Min.", "Avg.", "Max.", "#Instances"});
}
