#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>

#include "coherency/http.hpp"
#include "coherency/run.hpp"
#include "support.hpp"

using namespace coherency;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + COHERENCY_CLI + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const char* kMixed = R"({"seed": 3, "behavior": "perfect", "relations": [
  {"id": "P1", "type": "1-1", "facts": 30},
  {"id": "P2", "type": "N-1", "fan_in": 5, "objects": 6},
  {"id": "P3", "type": "N-M", "facts": 40},
  {"id": "P4", "type": "N-M", "symmetric": true, "facts": 20}]})";

struct Workspace {
  testing::TempDir dir;
  std::string gen;
  Workspace(const std::string& config = kMixed) {
    testing::write_text(dir / "cfg.json", config);
    gen = (dir / "gen").string();
    const Result r = cli("gen-synthetic --config " + (dir / "cfg.json").string() + " --out " + gen);
    REQUIRE(r.code == 0);
  }
  std::string data() const { return " --triples " + gen + "/triples.jsonl --relations " + gen + "/relations.jsonl "; }
  std::string kb() const { return "synthetic:" + gen + "/kb.json"; }
  std::string out(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("gen-synthetic writes loadable files with all relation flags") {
  Workspace w;
  const Corpus c = load_corpus(w.gen + "/triples.jsonl", w.gen + "/relations.jsonl");
  std::set<std::string> kinds;
  for (const auto& [id, r] : c.relations) kinds.insert(std::string(to_string(r.rel_type)) + (r.symmetric ? "s" : ""));
  CHECK(kinds == std::set<std::string>{"1-1", "N-1", "N-M", "N-Ms"});
  const AnswerIndex idx = build_answer_index(c);
  for (const auto& t : c.triples.at("P2")) CHECK(idx.subjects_of("P2", t.object).size() == 5);

  Workspace again;
  CHECK(testing::read_text(w.gen + "/triples.jsonl") == testing::read_text(again.gen + "/triples.jsonl"));
  CHECK(testing::read_text(w.gen + "/kb.json") == testing::read_text(again.gen + "/kb.json"));
}

TEST_CASE("evaluate with the perfect backend scores 100") {
  Workspace w;
  const Result r = cli("evaluate --backend " + w.kb() + w.data() + "--out " + w.out("o") + " --run-id perfect");
  CHECK(r.code == 0);
  const std::string md = testing::read_text(w.out("o") + "/perfect.coherency.md");
  CHECK(md.find("| perfect | 100.00 | 100.00 | 100.00 | 140 |") != std::string::npos);
  const json art = json::parse(testing::read_text(w.out("o") + "/perfect.artifact.json"));
  CHECK(art.at("fingerprint").at("n_best") == 10);
  CHECK(art.at("fingerprint").at("exclusion") == "pivot");
  CHECK(art.at("fingerprint").at("mode") == "manual");
  CHECK(art.at("kind") == "evaluate");
  CHECK(fs::exists(w.out("o") + "/perfect.gallery.md"));
  for (const auto& e : fs::directory_iterator(w.out("o")))
    CHECK(e.path().filename().string().rfind("perfect.", 0) == 0);
}

TEST_CASE("kb facts are used when no dataset is given") {
  Workspace w;
  CHECK(cli("evaluate --backend " + w.kb() + " --out " + w.out("o")).code == 0);
  CHECK(fs::exists(w.out("o") + "/evaluate-manual.artifact.json"));
  CHECK(cli("evaluate --backend " + w.kb() + " --no-audit --out " + w.out("n")).code == 0);
  const json art = json::parse(testing::read_text(w.out("n") + "/evaluate-manual.artifact.json"));
  CHECK(art.at("audit_retained") == false);
  CHECK_FALSE(fs::exists(w.out("n") + "/evaluate-manual.gallery.md"));
}

TEST_CASE("optimized mode without optimized templates is an empty result") {
  Workspace w(R"({"optimized": false, "relations": [{"id": "P1", "type": "1-1"}]})");
  const Result r = cli("evaluate --backend http://127.0.0.1:1" + w.data() + "--mode optimized --out " + w.out("o"));
  CHECK(r.code == kExitEmpty);
  CHECK(r.out.find("0 evaluable relations") != std::string::npos);
  CHECK_FALSE(fs::exists(w.out("o")));
}

TEST_CASE("evidence mode skips and counts triples without evidence") {
  Workspace w;
  const std::string triples = w.gen + "/triples.jsonl";
  std::string text = testing::read_text(triples);
  std::istringstream in(text);
  std::string line, edited;
  int i = 0, dropped = 0;
  while (std::getline(in, line)) {
    json j = json::parse(line);
    if (i++ % 4 == 0) {
      j.erase("evidence");
      ++dropped;
    }
    edited += j.dump() + "\n";
  }
  testing::write_text(triples, edited);
  const Result r = cli("evaluate --backend " + w.kb() + w.data() + "--mode evidence --out " + w.out("o"));
  REQUIRE(r.code == 0);
  const json art = json::parse(testing::read_text(w.out("o") + "/evaluate-evidence.artifact.json"));
  CHECK(art.at("report").at("skipped").at("missing_evidence") == dropped);
}

TEST_CASE("config file with flag overrides") {
  Workspace w;
  testing::write_text(w.dir / "run.json",
                      json{{"backend", w.kb()}, {"n_best", 3}, {"exclusion", "none"}, {"run_id", "fromfile"}}.dump());
  const Result r = cli("evaluate --config " + (w.dir / "run.json").string() + " --exclusion gold --out " + w.out("o"));
  REQUIRE(r.code == 0);
  const json art = json::parse(testing::read_text(w.out("o") + "/fromfile.artifact.json"));
  CHECK(art.at("fingerprint").at("n_best") == 3);
  CHECK(art.at("fingerprint").at("exclusion") == "gold");

  testing::write_text(w.dir / "bad.json", R"({"no_such_key": 1})");
  CHECK(cli("evaluate --config " + (w.dir / "bad.json").string()).code == kExitConfig);
}

TEST_CASE("config errors are coded before any network call") {
  Workspace w;
  CHECK(cli("evaluate" + w.data() + "--out " + w.out("o")).code == kExitConfig);
  CHECK(cli("evaluate --backend " + w.kb() + " --mode nonsense --out " + w.out("o")).code == kExitConfig);
  CHECK(cli("evaluate --backend " + w.kb() + " --run-id ../escape --out " + w.out("o")).code == kExitConfig);
  CHECK(cli("evaluate --backend " + w.kb() + " --n-best 0 --out " + w.out("o")).code == kExitConfig);
  CHECK(cli("evaluate --backend " + w.kb() + " --n-best 11 --out " + w.out("o")).code == kExitConfig);
  CHECK(cli("sweep --backend " + w.kb() + " --runs 0 --out " + w.out("o")).code == kExitConfig);
  CHECK(cli("evaluate --bogus").code == kExitConfig);
  CHECK(cli("evaluate --backend ftp://x" + w.data() + "--out " + w.out("o")).code == kExitConfig);
}

TEST_CASE("unreachable backend exits with the backend code and leaves no artifact") {
  Workspace w;
  const Result r = cli("evaluate" + w.data() + "--out " + w.out("o"), "COHERENCY_BACKEND_URL=http://127.0.0.1:1");
  CHECK(r.code == kExitBackend);
  CHECK_FALSE(fs::exists(w.out("o") + "/evaluate-manual.artifact.json"));
}

TEST_CASE("environment fallback reaches a live server") {
  Workspace w;
  auto server = serve_reference(std::make_shared<const SyntheticKB>(load_kb(w.gen + "/kb.json")), "127.0.0.1", 0);
  const Result r = cli("evaluate" + w.data() + "--out " + w.out("o"), "COHERENCY_BACKEND_URL=" + server->url());
  CHECK(r.code == 0);
  CHECK(r.out.find("100.00") != std::string::npos);
}

TEST_CASE("sweep determinism and single-run collapse") {
  Workspace w;
  CHECK(cli("sweep --backend " + w.kb() + " --runs 10 --seed 7 --out " + w.out("a")).code == 0);
  CHECK(cli("sweep --backend " + w.kb() + " --runs 10 --seed 7 --out " + w.out("b")).code == 0);
  CHECK(testing::read_text(w.out("a") + "/sweep.artifact.json") == testing::read_text(w.out("b") + "/sweep.artifact.json"));
  CHECK(fs::exists(w.out("a") + "/sweep.series.csv"));

  CHECK(cli("sweep --backend " + w.kb() + " --runs 1 --out " + w.out("c") + " --format csv").code == 0);
  const std::string csv = testing::read_text(w.out("c") + "/sweep.sweep.csv");
  const std::string row = csv.substr(csv.find('\n') + 1);
  const auto cells = [&] {
    std::vector<std::string> v;
    std::stringstream ss(row.substr(0, row.find('\n')));
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(cell);
    return v;
  }();
  REQUIRE(cells.size() == 5);
  CHECK(cells[1] == cells[2]);
  CHECK(cells[2] == cells[3]);
}

TEST_CASE("render reproduces stored tables") {
  Workspace w;
  REQUIRE(cli("evaluate --backend " + w.kb() + w.data() + "--out " + w.out("o") + " --run-id r").code == 0);
  const Result r = cli("render " + w.out("o") + "/r.artifact.json --out " + w.out("re"));
  REQUIRE(r.code == 0);
  for (const char* f : {"coherency.md", "correctness.csv", "per_type.json", "relations.md", "gallery.md"})
    CHECK(testing::read_text(w.out("o") + "/r." + f) == testing::read_text(w.out("re") + "/r." + f));
  CHECK(cli("render " + w.out("missing.json") + " --out " + w.out("re")).code == kExitConfig);
}

TEST_CASE("single-token filtering and filter export") {
  Workspace w(R"({"capabilities": {"single_token_only": true},
                 "relations": [{"id": "P1", "type": "1-1", "facts": 10}]})");
  // Multi-word entities are filtered out by the whitespace tokenizer.
  std::string triples = testing::read_text(w.gen + "/triples.jsonl");
  triples += json{{"sub_label", "New York"}, {"obj_label", "Albany"}, {"predicate_id", "P1"}}.dump() + "\n";
  testing::write_text(w.gen + "/triples.jsonl", triples);
  REQUIRE(cli("evaluate --backend " + w.kb() + w.data() + "--export-filter --out " + w.out("o") + " --run-id f").code == 0);
  const json art = json::parse(testing::read_text(w.out("o") + "/f.artifact.json"));
  CHECK(art.at("report").at("total_instances") == 10);
  const EntityFilter f = EntityFilter::load(w.out("o") + "/f.filter.jsonl");
  CHECK_FALSE(f("New York"));
  CHECK(f("Albany"));

  REQUIRE(cli("evaluate --backend " + w.kb() + w.data() + "--single-token off --out " + w.out("p") + " --run-id g").code == 0);
  CHECK(json::parse(testing::read_text(w.out("p") + "/g.artifact.json")).at("report").at("total_instances") == 11);
  REQUIRE(cli("evaluate --backend " + w.kb() + w.data() + "--single-token off --filter " + w.out("o") +
              "/f.filter.jsonl --out " + w.out("q") + " --run-id h").code == 0);
  CHECK(json::parse(testing::read_text(w.out("q") + "/h.artifact.json")).at("report").at("total_instances") == 10);
}

TEST_CASE("serve reports bind failures with a coded exit") {
  Workspace w;
  auto server = serve_reference(std::make_shared<const SyntheticKB>(load_kb(w.gen + "/kb.json")), "127.0.0.1", 0);
  const Result r = cli("serve --kb " + w.gen + "/kb.json --port " + std::to_string(server->port()));
  CHECK(r.code == kExitBind);
}
