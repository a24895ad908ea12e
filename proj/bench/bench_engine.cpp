#include <benchmark/benchmark.h>

#include <memory>

#include "coherency/engine.hpp"
#include "coherency/synthetic.hpp"

using namespace coherency;

namespace {

struct Fixture {
  std::shared_ptr<const SyntheticKB> kb;
  std::unique_ptr<SyntheticBackend> backend;
  AnswerIndex index;
};

const Fixture& fixture(BehaviorKind kind) {
  static std::map<BehaviorKind, Fixture> cache;
  auto it = cache.find(kind);
  if (it != cache.end()) return it->second;
  SyntheticKBConfig c;
  c.seed = 1;
  c.behavior.kind = kind;
  for (int i = 0; i < 8; ++i) {
    const std::string n = std::to_string(i);
    c.relations.push_back({"A" + n, RelType::OneToOne, false, 200, 5, 4, 0, 0, 0});
    c.relations.push_back({"B" + n, RelType::NToOne, false, 10, 5, 40, 0, 0, 0});
    c.relations.push_back({"C" + n, RelType::NToM, false, 200, 5, 4, 0, 0, 0});
  }
  Fixture f;
  f.kb = std::make_shared<const SyntheticKB>(generate_synthetic(c));
  f.backend = std::make_unique<SyntheticBackend>(f.kb);
  f.index = build_answer_index(f.kb->facts);
  return cache.emplace(kind, std::move(f)).first->second;
}

void BM_Serial(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<BehaviorKind>(state.range(0)));
  for (auto _ : state) {
    auto res = evaluate_corpus_serial(*f.backend, f.kb->facts, f.index, {});
    benchmark::DoNotOptimize(res.report.avg);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.kb->facts.instance_count()));
}

void BM_Parallel(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<BehaviorKind>(state.range(0)));
  EvalOptions o;
  o.parallelism = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto res = evaluate_corpus(*f.backend, f.kb->facts, f.index, o);
    benchmark::DoNotOptimize(res.report.avg);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.kb->facts.instance_count()));
}

}  // namespace

BENCHMARK(BM_Serial)
    ->Arg(static_cast<int>(BehaviorKind::Perfect))
    ->Arg(static_cast<int>(BehaviorKind::UniformRandom))
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)
    ->ArgsProduct({{static_cast<int>(BehaviorKind::Perfect), static_cast<int>(BehaviorKind::UniformRandom)},
                   {1, 2, 4, 8}})
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
