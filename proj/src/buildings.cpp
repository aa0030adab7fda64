#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "aug3d/error.hpp"
#include "aug3d/sampling.hpp"

namespace aug3d {

Plane fit_plane_lsq(std::span<const Point3D> points) {
  std::vector<Vec3> pos;
  pos.reserve(points.size());
  for (const Point3D& p : points) pos.push_back(p.position);
  return fit_plane_lsq(std::span<const Vec3>(pos));
}

Plane fit_ground_plane(std::span<const Point3D> points, double fraction) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "ground plane fit needs points");
  std::vector<Vec3> pos;
  pos.reserve(points.size());
  for (const Point3D& p : points) pos.push_back(p.position);
  const auto want = std::max<std::size_t>(
      3, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(pos.size()))));
  const std::size_t keep = std::min(want, pos.size());
  std::nth_element(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(keep - 1), pos.end(),
                   [](const Vec3& a, const Vec3& b) { return a.z() < b.z(); });
  pos.resize(keep);
  return fit_plane_lsq(std::span<const Vec3>(pos));
}

PercentileSlice percentile_slice(std::span<const Point3D> points, double percentile) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "percentile slice of an empty point list");
  if (!(percentile > 0.0 && percentile < 100.0)) {
    throw Error(ErrorKind::InvalidArgument, "percentile must be in (0, 100)");
  }
  const std::size_t n = points.size();
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = points[i].position.z();
  auto rank = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(n) / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(rank - 1), z.end());

  PercentileSlice out;
  out.threshold = z[rank - 1];
  for (const Point3D& p : points) {
    if (p.position.z() >= out.threshold) out.above.push_back(p);
  }
  return out;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

double iou(const Box2D& a, const Box2D& b) {
  const Vec2 lo = a.min.cwiseMax(b.min);
  const Vec2 hi = a.max.cwiseMin(b.max);
  const Vec2 d = (hi - lo).cwiseMax(Vec2::Zero());
  const double inter = d.prod();
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

BinaryMask dilate3(const BinaryMask& m) {
  BinaryMask out = m;
  for (int r = 0; r < m.height; ++r) {
    for (int c = 0; c < m.width; ++c) {
      bool any = false;
      for (int dr = -1; dr <= 1 && !any; ++dr) {
        for (int dc = -1; dc <= 1 && !any; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr >= 0 && rr < m.height && cc >= 0 && cc < m.width && m.at(cc, rr)) any = true;
        }
      }
      out.bits[static_cast<std::size_t>(r) * m.width + c] = any ? 1 : 0;
    }
  }
  return out;
}

BinaryMask erode3(const BinaryMask& m) {
  BinaryMask out = m;
  for (int r = 0; r < m.height; ++r) {
    for (int c = 0; c < m.width; ++c) {
      bool all = true;
      for (int dr = -1; dr <= 1 && all; ++dr) {
        for (int dc = -1; dc <= 1 && all; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr >= 0 && rr < m.height && cc >= 0 && cc < m.width && !m.at(cc, rr)) all = false;
        }
      }
      out.bits[static_cast<std::size_t>(r) * m.width + c] = all ? 1 : 0;
    }
  }
  return out;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

BinaryMask morphological_close(const BinaryMask& mask, int iterations) {
  BinaryMask out = mask;
  for (int i = 0; i < iterations; ++i) out = dilate3(out);
  for (int i = 0; i < iterations; ++i) out = erode3(out);
  return out;
}

BinaryMask occupancy_mask(std::span<const Point3D> above, const AxisAlignedBounds& bounds,
                          const SamplingConfig& cfg) {
  if (above.empty()) throw Error(ErrorKind::EmptyInput, "occupancy mask needs at least one point");
  if (cfg.mask_resolution < 8) throw Error(ErrorKind::InvalidArgument, "mask resolution must be >= 8");
  const double wx = bounds.max.x() - bounds.min.x();
  const double wy = bounds.max.y() - bounds.min.y();
  const double longest = std::max(wx, wy);

  BinaryMask m;
  m.origin = Vec2(bounds.min.x(), bounds.min.y());
  m.pixel_size = longest > 0.0 ? longest / cfg.mask_resolution : 1.0;
  const auto pixels = [&](double w) {
    return std::max(1, static_cast<int>(std::ceil(w / m.pixel_size - 1e-9)));
  };
  m.width = wx >= wy ? cfg.mask_resolution : pixels(wx);
  m.height = wx >= wy ? pixels(wy) : cfg.mask_resolution;
  m.bits.assign(static_cast<std::size_t>(m.width) * static_cast<std::size_t>(m.height), 0);

  for (const Point3D& p : above) {
    const double fx = (p.position.x() - m.origin.x()) / m.pixel_size;
    const double fy = (p.position.y() - m.origin.y()) / m.pixel_size;
    if (!(fx >= 0.0 && fy >= 0.0 && p.position.x() <= bounds.max.x() && p.position.y() <= bounds.max.y())) {
      continue;
    }
    const int col = std::min(static_cast<int>(fx), m.width - 1);
    const int row = std::min(static_cast<int>(fy), m.height - 1);
    m.bits[static_cast<std::size_t>(row) * m.width + col] = 1;
  }
  return morphological_close(m, cfg.closing_iterations);
}

std::vector<Box2D> extract_boxes(const BinaryMask& mask, int min_component_area) {
  const std::size_t w = static_cast<std::size_t>(mask.width);
  const std::size_t h = static_cast<std::size_t>(mask.height);
  constexpr std::size_t kNone = ~std::size_t{0};

  // Two-pass 4-connected labeling with union-find over provisional labels.
  std::vector<std::size_t> label(w * h, kNone);
  std::vector<std::size_t> parent;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t i = r * w + c;
      if (!mask.bits[i]) continue;
      const std::size_t up = r > 0 ? label[i - w] : kNone;
      const std::size_t left = c > 0 ? label[i - 1] : kNone;
      if (up == kNone && left == kNone) {
        label[i] = parent.size();
        parent.push_back(parent.size());
      } else if (up != kNone && left != kNone) {
        const std::size_t a = find_root(parent, up);
        const std::size_t b = find_root(parent, left);
        label[i] = std::min(a, b);
        parent[std::max(a, b)] = std::min(a, b);
      } else {
        label[i] = up != kNone ? up : left;
      }
    }
  }

  struct Extent {
    std::size_t area = 0;
    std::size_t c0 = ~std::size_t{0}, r0 = ~std::size_t{0}, c1 = 0, r1 = 0;
  };
  std::vector<Extent> extents(parent.size());
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const std::size_t l = label[r * w + c];
      if (l == kNone) continue;
      Extent& e = extents[find_root(parent, l)];
      ++e.area;
      e.c0 = std::min(e.c0, c);
      e.r0 = std::min(e.r0, r);
      e.c1 = std::max(e.c1, c);
      e.r1 = std::max(e.r1, r);
    }
  }

  std::vector<Box2D> boxes;
  for (const Extent& e : extents) {
    if (e.area == 0 || e.area < static_cast<std::size_t>(std::max(min_component_area, 0))) continue;
    Box2D b;
    b.min = mask.origin + mask.pixel_size * Vec2(static_cast<double>(e.c0), static_cast<double>(e.r0));
    b.max = mask.origin + mask.pixel_size * Vec2(static_cast<double>(e.c1 + 1), static_cast<double>(e.r1 + 1));
    boxes.push_back(std::move(b));
  }
  std::sort(boxes.begin(), boxes.end(), [](const Box2D& a, const Box2D& b) {
    if (a.min.x() != b.min.x()) return a.min.x() < b.min.x();
    if (a.min.y() != b.min.y()) return a.min.y() < b.min.y();
    if (a.max.x() != b.max.x()) return a.max.x() < b.max.x();
    return a.max.y() < b.max.y();
  });
  for (std::size_t i = 0; i < boxes.size(); ++i) boxes[i].member_ids = {i};
  return boxes;
}

std::vector<Box2D> merge_nearest_boxes(std::span<const Box2D> boxes, std::size_t merge_m) {
  if (boxes.empty()) throw Error(ErrorKind::EmptyInput, "no boxes to merge");
  if (merge_m < 1) throw Error(ErrorKind::InvalidArgument, "merge_m must be >= 1");
  std::vector<Box2D> out(boxes.begin(), boxes.end());
  std::set<std::vector<std::size_t>> seen;
  for (const Box2D& b : boxes) seen.insert(b.member_ids);

  const std::size_t n = boxes.size();
  const std::size_t depth = std::min(merge_m, n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.push_back(j);
    }
    const Vec2 ci = boxes[i].centroid();
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double da = (boxes[a].centroid() - ci).squaredNorm();
      const double db = (boxes[b].centroid() - ci).squaredNorm();
      return da < db;
    });

    Box2D merged = boxes[i];
    for (std::size_t m = 0; m < depth; ++m) {
      const Box2D& nb = boxes[order[m]];
      merged.min = merged.min.cwiseMin(nb.min);
      merged.max = merged.max.cwiseMax(nb.max);
      std::vector<std::size_t> ids;
      std::set_union(merged.member_ids.begin(), merged.member_ids.end(), nb.member_ids.begin(),
                     nb.member_ids.end(), std::back_inserter(ids));
      merged.member_ids = std::move(ids);
      if (seen.insert(merged.member_ids).second) out.push_back(merged);
    }
  }
  return out;
}

std::vector<DomeSpec> semantic_domes(std::span<const Box2D> boxes, const Plane& ground,
                                     const SamplingConfig& cfg) {
  if (boxes.empty()) throw Error(ErrorKind::EmptyInput, "no boxes for semantic domes");
  std::vector<DomeSpec> out;
  for (const Box2D& b : boxes) {
    std::string tag = "box:" + fmt::format("{}", fmt::join(b.member_ids, "+"));
    const double diag = b.diagonal();
    if (!(diag > 0.0)) {
      warn(fmt::format("skipping degenerate box {}", tag));
      continue;
    }
    DomeSpec d;
    const Vec2 c = b.centroid();
    d.center = project_to_plane(Vec3(c.x(), c.y(), 0.0), ground);
    d.radius = cfg.dome_radius_factor_box * diag;
    d.azimuth = cfg.azimuth;
    d.elevation = cfg.elevation;
    d.tag = std::move(tag);
    out.push_back(std::move(d));
  }
  return out;
}

BuildingDetection detect_buildings(std::span<const Point3D> points, const SamplingConfig& cfg) {
  cfg.validate();
  BuildingDetection det;
  det.slice = percentile_slice(points, cfg.slice_percentile);
  det.mask = occupancy_mask(det.slice.above, scene_bounds(points), cfg);
  det.boxes = extract_boxes(det.mask, cfg.min_component_area);
  return det;
}

}  // namespace aug3d
