#include <benchmark/benchmark.h>

#include <cmath>

#include "mergecoord/geometry.hpp"
#include "mergecoord/rng.hpp"

using namespace mergecoord;

namespace {

Polyline arc_polyline() {
  std::vector<Point2D> pts;
  for (int i = 0; i <= 120; ++i) {
    const double phi = -1.5707963 - 0.8333 + 0.8333 * i / 120.0;
    pts.push_back({800.0 + 300.0 * std::cos(phi), 300.0 + 300.0 * std::sin(phi)});
  }
  return Polyline(pts);
}

}  // namespace

static void BM_ProjectToPath(benchmark::State& state) {
  const Polyline path = arc_polyline();
  DeterministicRng rng(7);
  for (auto _ : state) {
    const Point2D q{500.0 + 400.0 * rng.next_unit(),
                    -50.0 + 200.0 * rng.next_unit()};
    benchmark::DoNotOptimize(path.project(q));
  }
}
BENCHMARK(BM_ProjectToPath);

static void BM_StationToPoint(benchmark::State& state) {
  const Polyline path = arc_polyline();
  DeterministicRng rng(11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(path.at_station(path.length() * rng.next_unit()));
  }
}
BENCHMARK(BM_StationToPoint);

BENCHMARK_MAIN();
