// Serial reference vs OpenMP kernels on the default synthetic scene.

#include <benchmark/benchmark.h>

#include "aug3d/kernels.hpp"
#include "aug3d/synth.hpp"

using namespace aug3d;

namespace {

struct Fixture {
  SynthScene scene = generate_scene(SynthSpec{});
  std::vector<Vec3> positions = scene.scene.point_positions();
  std::vector<kernels::ProjectionCamera> cameras;
  kernels::TrackTable tracks;

  Fixture() {
    for (const auto& [id, pose] : scene.scene.cameras) {
      cameras.push_back(kernels::ProjectionCamera::from(pose, scene.scene.intrinsics_for(pose)));
    }
    for (const auto& t : kernels::frustum_tracks_serial(positions, cameras)) {
      tracks.indices.insert(tracks.indices.end(), t.begin(), t.end());
      tracks.offsets.push_back(static_cast<std::uint32_t>(tracks.indices.size()));
    }
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

template <auto Kernel>
void BM_SharedPoints(benchmark::State& state) {
  const Fixture& f = fixture();
  std::vector<std::uint32_t> out(f.cameras.size() * f.cameras.size());
  for (auto _ : state) {
    Kernel(f.tracks, f.cameras.size(), out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <auto Kernel>
void BM_Frustum(benchmark::State& state) {
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f.positions, f.cameras));
}

template <auto Project, auto Rasterize>
void BM_Render(benchmark::State& state) {
  const Fixture& f = fixture();
  const kernels::ProjectionCamera& cam = f.cameras[f.cameras.size() / 2];
  for (auto _ : state) {
    ImageBuffer img(cam.width, cam.height);
    const auto splats = Project(f.scene.scene.points, cam);
    Rasterize(splats, 1, img);
    benchmark::DoNotOptimize(img.depth.data());
  }
}

}  // namespace

BENCHMARK(BM_SharedPoints<kernels::accumulate_shared_points_serial>)->Name("shared_points/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SharedPoints<kernels::accumulate_shared_points_omp>)->Name("shared_points/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Frustum<kernels::frustum_tracks_serial>)->Name("frustum_tracks/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Frustum<kernels::frustum_tracks_omp>)->Name("frustum_tracks/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Render<kernels::project_splats_serial, kernels::rasterize_splats_serial>)
    ->Name("splat_render/serial")
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Render<kernels::project_splats_omp, kernels::rasterize_splats_omp>)
    ->Name("splat_render/omp")
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
