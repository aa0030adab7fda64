#include "aug3d/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <omp.h>

namespace aug3d::kernels {

namespace {

void mirror_upper(std::size_t n, std::span<std::uint32_t> out) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out[j * n + i] = out[i * n + j];
  }
}

// Upper-triangle accumulation of one point's track into `out`.
inline void add_track(const std::uint32_t* begin, const std::uint32_t* end, std::size_t n,
                      std::uint32_t* out) {
  for (const std::uint32_t* a = begin; a != end; ++a) {
    for (const std::uint32_t* b = a; b != end; ++b) {
      const std::size_t i = std::min(*a, *b);
      const std::size_t j = std::max(*a, *b);
      ++out[i * n + j];
    }
  }
}

}  // namespace

void accumulate_shared_points_serial(const TrackTable& tracks, std::size_t n,
                                     std::span<std::uint32_t> out) {
  std::fill(out.begin(), out.end(), 0u);
  const std::uint32_t* idx = tracks.indices.data();
  for (std::size_t p = 0; p < tracks.num_points(); ++p) {
    add_track(idx + tracks.offsets[p], idx + tracks.offsets[p + 1], n, out.data());
  }
  mirror_upper(n, out);
}

void accumulate_shared_points_omp(const TrackTable& tracks, std::size_t n,
                                  std::span<std::uint32_t> out) {
  std::fill(out.begin(), out.end(), 0u);
  const auto num_points = static_cast<std::int64_t>(tracks.num_points());
  const std::uint32_t* idx = tracks.indices.data();
  const std::size_t cells = n * n;

#pragma omp parallel
  {
    // Each thread shards a range of points into a private matrix; integer
    // sums commute, so the merged result is exact and order-free.
    std::vector<std::uint32_t> local(cells, 0u);
#pragma omp for schedule(dynamic, 1024) nowait
    for (std::int64_t p = 0; p < num_points; ++p) {
      add_track(idx + tracks.offsets[static_cast<std::size_t>(p)],
                idx + tracks.offsets[static_cast<std::size_t>(p) + 1], n, local.data());
    }
#pragma omp critical(aug3d_shared_merge)
    {
      for (std::size_t c = 0; c < cells; ++c) out[c] += local[c];
    }
  }
  mirror_upper(n, out);
}

ProjectionCamera ProjectionCamera::from(const CameraPose& pose, const Intrinsics& intr) {
  return {pose.rotation_matrix(), pose.translation, intr.fx, intr.fy, intr.cx, intr.cy,
          intr.width, intr.height};
}

namespace {

inline bool in_frustum(const Vec3& p, const ProjectionCamera& cam) {
  const Vec3 x = cam.rotation * p + cam.translation;
  if (!(x.z() > kNearPlane)) return false;
  const double u = cam.fx * x.x() / x.z() + cam.cx;
  const double v = cam.fy * x.y() / x.z() + cam.cy;
  return u >= 0.0 && u < cam.width && v >= 0.0 && v < cam.height;
}

inline std::optional<Splat> project_one(const Point3D& p, const ProjectionCamera& cam) {
  const Vec3 x = cam.rotation * p.position + cam.translation;
  if (!(x.z() > kNearPlane)) return std::nullopt;
  const double u = cam.fx * x.x() / x.z() + cam.cx;
  const double v = cam.fy * x.y() / x.z() + cam.cy;
  // Anything this far outside cannot reach the image even with a large splat.
  constexpr double kSlack = 1 << 20;
  if (!(u > -kSlack && u < cam.width + kSlack && v > -kSlack && v < cam.height + kSlack)) {
    return std::nullopt;
  }
  return Splat{static_cast<int>(std::floor(u)), static_cast<int>(std::floor(v)), x.z(), p.point_id,
               p.color};
}

inline bool beats(double depth, PointId id, double cur_depth, PointId cur_id) {
  return depth < cur_depth || (depth == cur_depth && id < cur_id);
}

void rasterize_rows(std::span<const Splat> splats, int radius, int row_begin, int row_end,
                    ImageBuffer& image, std::vector<PointId>& ids) {
  for (const Splat& s : splats) {
    const int y0 = std::max(s.py - radius, row_begin);
    const int y1 = std::min(s.py + radius, row_end - 1);
    if (y0 > y1) continue;
    const int x0 = std::max(s.px - radius, 0);
    const int x1 = std::min(s.px + radius, image.width - 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const std::size_t i = image.index(x, y);
        if (beats(s.depth, s.id, image.depth[i], ids[i])) {
          image.depth[i] = s.depth;
          ids[i] = s.id;
          image.rgb[3 * i] = s.color.r;
          image.rgb[3 * i + 1] = s.color.g;
          image.rgb[3 * i + 2] = s.color.b;
        }
      }
    }
  }
}

}  // namespace

std::vector<std::vector<std::uint32_t>> frustum_tracks_serial(std::span<const Vec3> points,
                                                              std::span<const ProjectionCamera> cameras) {
  std::vector<std::vector<std::uint32_t>> tracks(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t c = 0; c < cameras.size(); ++c) {
      if (in_frustum(points[p], cameras[c])) tracks[p].push_back(static_cast<std::uint32_t>(c));
    }
  }
  return tracks;
}

std::vector<std::vector<std::uint32_t>> frustum_tracks_omp(std::span<const Vec3> points,
                                                           std::span<const ProjectionCamera> cameras) {
  std::vector<std::vector<std::uint32_t>> tracks(points.size());
  const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < n; ++p) {
    auto& track = tracks[static_cast<std::size_t>(p)];
    for (std::size_t c = 0; c < cameras.size(); ++c) {
      if (in_frustum(points[static_cast<std::size_t>(p)], cameras[c])) {
        track.push_back(static_cast<std::uint32_t>(c));
      }
    }
  }
  return tracks;
}

std::vector<Splat> project_splats_serial(std::span<const Point3D> points, const ProjectionCamera& cam) {
  std::vector<Splat> out;
  out.reserve(points.size());
  for (const Point3D& p : points) {
    if (auto s = project_one(p, cam)) out.push_back(*s);
  }
  return out;
}

std::vector<Splat> project_splats_omp(std::span<const Point3D> points, const ProjectionCamera& cam) {
  std::vector<std::optional<Splat>> tmp(points.size());
  const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    tmp[static_cast<std::size_t>(i)] = project_one(points[static_cast<std::size_t>(i)], cam);
  }
  std::vector<Splat> out;
  out.reserve(points.size());
  for (const auto& s : tmp) {
    if (s) out.push_back(*s);
  }
  return out;
}

void rasterize_splats_serial(std::span<const Splat> splats, int radius, ImageBuffer& image) {
  std::vector<PointId> ids(image.depth.size(), ~PointId{0});
  rasterize_rows(splats, radius, 0, image.height, image, ids);
}

void rasterize_splats_omp(std::span<const Splat> splats, int radius, ImageBuffer& image) {
  std::vector<PointId> ids(image.depth.size(), ~PointId{0});
  const int bands = std::max(1, std::min(image.height, 4 * omp_get_max_threads()));
  // Row bands own disjoint pixels; the z-test inside a band is order-free.
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < bands; ++b) {
    const int row_begin = static_cast<int>(static_cast<std::int64_t>(image.height) * b / bands);
    const int row_end = static_cast<int>(static_cast<std::int64_t>(image.height) * (b + 1) / bands);
    rasterize_rows(splats, radius, row_begin, row_end, image, ids);
  }
}

}  // namespace aug3d::kernels
