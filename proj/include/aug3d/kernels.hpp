#pragma once

// Data-parallel inner loops. Every kernel has a straightforward serial
// version kept as the reference for tests and benchmarks, and an OpenMP
// version that must produce bit-identical output.

#include <cstdint>
#include <span>
#include <vector>

#include "aug3d/geometry.hpp"
#include "aug3d/image.hpp"
#include "aug3d/scene_model.hpp"

namespace aug3d::kernels {

// Tracks in compressed-row form: point p observes the dense image indices
// indices[offsets[p] .. offsets[p+1]).
struct TrackTable {
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> indices;

  std::size_t num_points() const { return offsets.size() - 1; }
};

// out is an n*n row-major matrix, zeroed by the kernel. out[i*n+j] counts the
// points whose track holds both i and j.
void accumulate_shared_points_serial(const TrackTable& tracks, std::size_t n,
                                     std::span<std::uint32_t> out);
void accumulate_shared_points_omp(const TrackTable& tracks, std::size_t n,
                                  std::span<std::uint32_t> out);

struct ProjectionCamera {
  Mat3 rotation;
  Vec3 translation;
  double fx, fy, cx, cy;
  int width, height;

  static ProjectionCamera from(const CameraPose& pose, const Intrinsics& intr);
};

// For each point, the ascending list of camera indices whose frustum holds it
// (z_cam > near plane and projection inside [0,w) x [0,h)).
std::vector<std::vector<std::uint32_t>> frustum_tracks_serial(std::span<const Vec3> points,
                                                              std::span<const ProjectionCamera> cameras);
std::vector<std::vector<std::uint32_t>> frustum_tracks_omp(std::span<const Vec3> points,
                                                           std::span<const ProjectionCamera> cameras);

// A projected point ready for splatting: pixel column/row of its center,
// camera-frame depth and the id used to break equal-depth ties.
struct Splat {
  int px;
  int py;
  double depth;
  PointId id;
  Rgb color;
};

std::vector<Splat> project_splats_serial(std::span<const Point3D> points, const ProjectionCamera& cam);
std::vector<Splat> project_splats_omp(std::span<const Point3D> points, const ProjectionCamera& cam);

// Writes (2r+1)^2 squares with a z-test; the smallest (depth, id) wins, so
// the result does not depend on splat order.
void rasterize_splats_serial(std::span<const Splat> splats, int radius, ImageBuffer& image);
void rasterize_splats_omp(std::span<const Splat> splats, int radius, ImageBuffer& image);

}  // namespace aug3d::kernels
