#include <benchmark/benchmark.h>

#include <random>

#include "wpsenv/mock/grid.hpp"

using namespace wpsenv::mock;

namespace {

Grid spec(std::size_t n) { return make_grid(n, n, 0, 0, 10); }

void BM_Vector2Grid(benchmark::State& state) {
  auto g = spec(256);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> coord(0, 2560), q(0, 10);
  std::vector<PointSource> pts(static_cast<std::size_t>(state.range(0)));
  for (auto& p : pts) p = {coord(rng), coord(rng), q(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(vector2grid(pts, g));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * pts.size()));
}
BENCHMARK(BM_Vector2Grid)->Arg(1000)->Arg(100000);

void BM_Road2Grid(benchmark::State& state) {
  auto g = spec(256);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> coord(0, 2560);
  std::vector<RoadSource> roads(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < roads.size(); ++i) {
    roads[i].id = "r" + std::to_string(i);
    for (int v = 0; v < 5; ++v) roads[i].vertices.emplace_back(coord(rng), coord(rng));
    roads[i].q = 1;
  }
  for (auto _ : state) benchmark::DoNotOptimize(road2grid(roads, g, 1.0));
}
BENCHMARK(BM_Road2Grid)->Arg(10)->Arg(1000);

void BM_GridTextRoundTrip(benchmark::State& state) {
  auto g = spec(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < g.cells.size(); ++i) g.cells[i] = static_cast<double>(i % 97) / 7;
  for (auto _ : state) benchmark::DoNotOptimize(read_grid(write_grid(g)));
}
BENCHMARK(BM_GridTextRoundTrip)->Arg(64)->Arg(512);

void BM_GSum(benchmark::State& state) {
  auto a = spec(512), b = spec(512);
  for (auto _ : state) benchmark::DoNotOptimize(g_sum(a, b));
}
BENCHMARK(BM_GSum);

}  // namespace
