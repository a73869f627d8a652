#include <benchmark/benchmark.h>

#include "prism/graph.hpp"
#include "prism/invariance.hpp"
#include "prism/model.hpp"

using namespace prism;

namespace {

CrystalStructure sample(int atoms) {
  Rng rng(static_cast<std::uint64_t>(atoms));
  return random_structure(rng, atoms);
}

}  // namespace

static void BM_MinImage(benchmark::State& state) {
  const auto s = sample(8);
  std::size_t j = 0;
  for (auto _ : state) {
    auto m = min_image_displacement(s.lattice(), s.cart(0), s.cart(j++ % s.size()));
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(BM_MinImage);

static void BM_AtomisticGraph(benchmark::State& state) {
  const auto s = sample(8);
  const double r_c = double(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_atomistic_graph(s, r_c));
}
BENCHMARK(BM_AtomisticGraph)->Arg(4)->Arg(6)->Arg(8);

static void BM_CellGraph(benchmark::State& state) {
  const auto s = sample(4);
  const double R_c = double(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_cell_graph(s, R_c));
}
BENCHMARK(BM_CellGraph)->Arg(12)->Arg(16)->Arg(24);

static void BM_Forward(benchmark::State& state) {
  ModelConfig cfg;
  cfg.layers = int(state.range(0));
  const auto model = PrismModel::initialize(cfg, 1);
  const auto s = sample(8);
  const auto graphs = prepare_graphs(s, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(s, graphs));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(3);
BENCHMARK_MAIN();
