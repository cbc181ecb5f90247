#include <benchmark/benchmark.h>

#include "darkstore/arrangement.hpp"
#include "darkstore/catalog.hpp"
#include "darkstore/io.hpp"
#include "darkstore/layout.hpp"
#include "darkstore/lod.hpp"
#include "darkstore/rng.hpp"
#include "darkstore/scene.hpp"

using namespace darkstore;

namespace {

Layout make_layout(double w, double d, std::uint64_t seed) {
  LayoutParams p;
  p.seed = seed;
  return generate_layout(StoreSpec::rectangle(w, d), default_fixture_templates(), p, default_texture_catalog());
}

void BM_FieldEval(benchmark::State& state) {
  const Layout l = make_layout(20, 15, 1);
  Rng rng(1);
  for (auto _ : state) {
    const Vec2 p{rng.uniform(0.5, 19.5), rng.uniform(0.5, 14.5)};
    benchmark::DoNotOptimize(state.range(0) ? l.field.analytic(p) : l.field.eval(p));
  }
}
BENCHMARK(BM_FieldEval)->Arg(0)->Arg(1)->ArgNames({"analytic"});

void BM_GenerateLayout(benchmark::State& state) {
  const double w = static_cast<double>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(make_layout(w, 0.75 * w, seed++));
}
BENCHMARK(BM_GenerateLayout)->Arg(10)->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_ValidateLayout(benchmark::State& state) {
  const Layout l = make_layout(20, 15, 2);
  for (auto _ : state) benchmark::DoNotOptimize(validate_layout(l, LayoutParams{}));
}
BENCHMARK(BM_ValidateLayout)->Unit(benchmark::kMillisecond);

void BM_ArrangeStore(benchmark::State& state) {
  const Layout l = make_layout(20, 15, 3);
  ArrangeParams p;
  for (auto _ : state) {
    ++p.seed;
    benchmark::DoNotOptimize(arrange_store(l, default_product_catalog(), {}, p));
  }
}
BENCHMARK(BM_ArrangeStore)->Unit(benchmark::kMillisecond);

void BM_Deplete(benchmark::State& state) {
  const Layout l = make_layout(20, 15, 4);
  const Arrangement arr = arrange_store(l, default_product_catalog(), {}, ArrangeParams{});
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(deplete(arr, 3.0, 0.35, rng));
  state.counters["items"] = static_cast<double>(arr.items.size());
}
BENCHMARK(BM_Deplete)->Unit(benchmark::kMillisecond);

void BM_OptimizeAsset(benchmark::State& state) {
  const auto assets = synthetic_assets();
  const SyntheticAsset& a = assets[static_cast<std::size_t>(state.range(0))];
  LodParams p;
  for (auto _ : state) benchmark::DoNotOptimize(optimize_asset(a.id, a.mesh, p));
  state.SetLabel(a.id);
}
BENCHMARK(BM_OptimizeAsset)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_SerializeScene(benchmark::State& state) {
  const Layout l = make_layout(20, 15, 5);
  SceneFile s = scene_from_layout(l, 5, scenario_preset("in_domain"));
  s.products = default_product_catalog();
  s.arrangement = arrange_store(l, s.products, {}, ArrangeParams{});
  std::size_t bytes = 0;
  for (auto _ : state) {
    const std::string text = serialize_scene(s);
    bytes += text.size();
    benchmark::DoNotOptimize(parse_scene(text));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(bytes));
}
BENCHMARK(BM_SerializeScene)->Unit(benchmark::kMillisecond);

}  // namespace
