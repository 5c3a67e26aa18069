#include <benchmark/benchmark.h>

#include "idcalc/forcing.hpp"
#include "idcalc/ground.hpp"

using namespace idcalc;

namespace {

Identity triangle() { return Identity::from_blocks(make_domain(0, 3), {{LeafPair(0, 1), LeafPair(0, 2), LeafPair(1, 2)}}); }

void BM_ArrowTriangle(benchmark::State& state) {
  const Identity tri = triangle();
  ArrowOptions opt;
  opt.jobs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(arrow_check(static_cast<int>(state.range(0)), 2, tri, opt));
}
BENCHMARK(BM_ArrowTriangle)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_EnumerateId2(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_identities(1, 2, {IdentityFilter::ID2}));
}
BENCHMARK(BM_EnumerateId2)->Unit(benchmark::kMillisecond);

void BM_Realizes(benchmark::State& state) {
  const Identity s = star_identity(2);
  const int n = static_cast<int>(state.range(0));
  std::vector<int> u(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = i;
  // A 3-coloring by residues, which realizes the star identity once n is large enough.
  const auto col = PairColoring::from_function(u, [](int x, int y) { return (x * 7 + y * 3) % 3; });
  for (auto _ : state) benchmark::DoNotOptimize(realizes(col, s));
}
BENCHMARK(BM_Realizes)->Arg(6)->Arg(10)->Arg(16);

void BM_Generate(benchmark::State& state) {
  const TrivialGround g(4);
  const GenerationBounds b{{0, 1, 2, 3}, static_cast<int>(state.range(0)), 4, 12};
  for (auto _ : state) benchmark::DoNotOptimize(generate({triangle()}, g, b).size());
}
BENCHMARK(BM_Generate)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_BuildGround(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(GradedGround::build(n, {3, n / 2, n}, 1).size());
}
BENCHMARK(BM_BuildGround)->Arg(12)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CheckGround(benchmark::State& state) {
  const auto g = GradedGround::build(static_cast<int>(state.range(0)), {2, 4, 12}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(check_suitable_clauses(g).ok());
}
BENCHMARK(BM_CheckGround)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
