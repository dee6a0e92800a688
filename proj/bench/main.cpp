// Serial reference kernels against their OpenMP forms.

#include <benchmark/benchmark.h>

#include <cstdlib>
#include <memory>
#include <string>

#include "rgbxy/decomposer.hpp"
#include "rgbxy/geom/hull.hpp"
#include "rgbxy/image.hpp"
#include "rgbxy/geom/tessellation.hpp"
#include "rgbxy/kernels.hpp"

using namespace rgbxy;

namespace {

// Corpus image by default; RGBXY_BENCH_IMAGE picks another.
std::string bench_image() {
  const char* env = std::getenv("RGBXY_BENCH_IMAGE");
  return env ? env : RGBXY_BENCH_DEFAULT_IMAGE;
}

struct Fixture {
  Image img = read_image(bench_image());
  geom::PointSet pts{5};
  geom::ReducedHull hull;
  geom::SimplicialTessellation tess;
  std::unique_ptr<geom::PointLocator> loc;
  DecompositionState state;
  SparseRows w_rgb;
  Palette palette;
  LayerWeights weights;

  Fixture() {
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
      double p[5];
      rgbxy_point(img, i, 1.0, p);
      pts.push_back(p);
    }
    hull = geom::reduced_convex_hull(pts);
    tess = geom::delaunay_tessellate(hull.hull.vertices);
    loc = std::make_unique<geom::PointLocator>(tess);
    state.width = img.width();
    state.height = img.height();
    for (std::size_t s : hull.hull.source) state.vertices.push_back(pts[s]);
    state.w_rgbxy = kernels::locate_omp(*loc, pts.size(), point_fn());
    palette = extract_palette(img);
    w_rgb = compute_w_rgb(palette, state);
    weights = relayer(state, palette);
  }

  kernels::PointFn point_fn() const {
    const int rank = hull.frame.rank();
    return [this, rank](std::size_t i, double* out) {
      const geom::Vec l = hull.frame.to_local(pts[i]);
      std::copy(l.begin(), l.begin() + rank, out);
    };
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_bin_pixels_serial(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(kernels::bin_pixels_serial(fixture().img));
}
void BM_bin_pixels_omp(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(kernels::bin_pixels_omp(fixture().img));
}

void BM_locate_serial(benchmark::State& s) {
  const auto fn = fixture().point_fn();
  for (auto _ : s) benchmark::DoNotOptimize(kernels::locate_serial(*fixture().loc, fixture().pts.size(), fn));
}
void BM_locate_omp(benchmark::State& s) {
  const auto fn = fixture().point_fn();
  for (auto _ : s) benchmark::DoNotOptimize(kernels::locate_omp(*fixture().loc, fixture().pts.size(), fn));
}

void BM_compose_serial(benchmark::State& s) {
  LayerWeights out;
  for (auto _ : s) {
    kernels::compose_serial(fixture().state.w_rgbxy, fixture().w_rgb, out);
    benchmark::DoNotOptimize(out.values.data());
  }
}
void BM_compose_omp(benchmark::State& s) {
  LayerWeights out;
  for (auto _ : s) {
    kernels::compose_omp(fixture().state.w_rgbxy, fixture().w_rgb, out);
    benchmark::DoNotOptimize(out.values.data());
  }
}

void BM_reconstruct_serial(benchmark::State& s) {
  Image out(fixture().img.width(), fixture().img.height());
  for (auto _ : s) {
    kernels::reconstruct_serial(fixture().weights, fixture().palette.colors, out);
    benchmark::DoNotOptimize(out.data().data());
  }
}
void BM_reconstruct_omp(benchmark::State& s) {
  Image out(fixture().img.width(), fixture().img.height());
  for (auto _ : s) {
    kernels::reconstruct_omp(fixture().weights, fixture().palette.colors, out);
    benchmark::DoNotOptimize(out.data().data());
  }
}

}  // namespace

BENCHMARK(BM_bin_pixels_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_bin_pixels_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_locate_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_locate_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_compose_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_compose_omp)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_reconstruct_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_reconstruct_omp)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  // Built up front so the setup does not land in the first measurement.
  const Fixture& f = fixture();
  benchmark::AddCustomContext("image", bench_image());
  benchmark::AddCustomContext("vertices", std::to_string(f.state.q()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
