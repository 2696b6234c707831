#include "gasd/completion.hpp"
#include "gasd/normals.hpp"
#include "gasd/sampler.hpp"
#include "gasd/synthetic.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

namespace {

gasd::SceneSpec vga_plane() {
  gasd::SceneSpec spec;
  spec.plane = gasd::tilted_plane(30.0 * std::numbers::pi / 180.0, 0.8);
  return spec;
}

void BM_eigen_symmetric3(benchmark::State& state) {
  Eigen::Matrix3d c;
  c << 4.0, 1.0, 0.5, 1.0, 3.0, 0.25, 0.5, 0.25, 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gasd::eigen_symmetric3(c));
  }
}
BENCHMARK(BM_eigen_symmetric3);

void BM_normal_map_vga(benchmark::State& state) {
  const gasd::SceneSpec spec = vga_plane();
  const gasd::PointCloud cloud = gasd::backproject_map(gasd::render_scene(spec).depth, spec.intrinsics);
  const gasd::NeighborhoodConfig cfg{static_cast<int>(state.range(0)), 0.005, 5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(gasd::estimate_normal_map(cloud, cfg));
  }
}
BENCHMARK(BM_normal_map_vga)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

void BM_weighted_sampling(benchmark::State& state) {
  const std::size_t n = 640 * 480;
  gasd::ProbabilityVector pv;
  for (std::size_t i = 0; i < n; ++i) {
    pv.indices.push_back(i);
    pv.probs.push_back(static_cast<double>(1 + i % 17) / (9.0 * n));
  }
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gasd::sample_without_replacement(pv, state.range(0), seed++));
  }
}
BENCHMARK(BM_weighted_sampling)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_sample_frame_vga(benchmark::State& state) {
  const gasd::SceneSpec spec = vga_plane();
  const gasd::DepthMap depth = gasd::render_scene(spec).depth;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        gasd::sample_frame(depth, spec.intrinsics, {}, {}, {500, seed++, gasd::Strategy::geometry_aware}));
  }
}
BENCHMARK(BM_sample_frame_vga)->Unit(benchmark::kMillisecond);

void BM_complete_idw_vga(benchmark::State& state) {
  const gasd::SceneSpec spec = vga_plane();
  const gasd::DepthMap depth = gasd::render_scene(spec).depth;
  const gasd::FrameSample fs = gasd::sample_frame(
      depth, spec.intrinsics, {}, {}, {static_cast<std::size_t>(state.range(0)), 1, gasd::Strategy::uniform});
  for (auto _ : state) {
    benchmark::DoNotOptimize(gasd::complete_idw(fs.sparse, {}));
  }
}
BENCHMARK(BM_complete_idw_vga)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
