#include "aug3d/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "aug3d/error.hpp"
#include "aug3d/kernels.hpp"

namespace aug3d {

std::string_view to_string(ClusterMethod m) noexcept {
  switch (m) {
    case ClusterMethod::Sequence: return "sequence";
    case ClusterMethod::Grid: return "grid";
    case ClusterMethod::Ray: return "ray";
    case ClusterMethod::Sfm: return "sfm";
  }
  return "sequence";
}

ClusterMethod parse_cluster_method(std::string_view s) {
  if (s == "sequence") return ClusterMethod::Sequence;
  if (s == "grid") return ClusterMethod::Grid;
  if (s == "ray") return ClusterMethod::Ray;
  if (s == "sfm") return ClusterMethod::Sfm;
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown clustering method '{}'", s));
}

void ClusteringConfig::validate() const {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "cluster size k must be >= 2");
  if (num_clusters && *num_clusters < 1) throw Error(ErrorKind::InvalidArgument, "num_clusters must be >= 1");
  if (!(angle_threshold_deg > 0.0 && angle_threshold_deg <= 180.0)) {
    throw Error(ErrorKind::InvalidArgument, "angle threshold must be in (0, 180]");
  }
  if (grid_cell_size && !(*grid_cell_size > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "grid cell size must be > 0");
  }
}

std::size_t ClusteringConfig::effective_num_clusters(std::size_t num_images) const {
  return num_clusters.value_or(std::max<std::size_t>(1, num_images / k));
}

SimilarityMatrix::SimilarityMatrix(std::vector<ImageId> ids, std::vector<std::uint32_t> counts)
    : ids_(std::move(ids)), counts_(std::move(counts)) {
  if (counts_.size() != ids_.size() * ids_.size()) {
    throw Error(ErrorKind::InvalidArgument, "similarity matrix size mismatch");
  }
  if (!std::is_sorted(ids_.begin(), ids_.end())) {
    throw Error(ErrorKind::InvalidArgument, "similarity ids must be ascending");
  }
}

bool SimilarityMatrix::contains(ImageId id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

std::size_t SimilarityMatrix::index_of(ImageId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) {
    throw Error(ErrorKind::Reference, fmt::format("image {} not in similarity matrix", id));
  }
  return static_cast<std::size_t>(it - ids_.begin());
}

namespace {

void require_views(const SceneModel& scene, const ClusteringConfig& cfg) {
  cfg.validate();
  if (scene.cameras.size() < cfg.k) {
    throw Error(ErrorKind::InsufficientViews,
                fmt::format("{} cameras available, cluster size is {}", scene.cameras.size(), cfg.k));
  }
}

ClusterSet make_set(ClusterMethod method, const ClusteringConfig& cfg) {
  ClusterSet cs;
  cs.method = method;
  cs.config = cfg;
  return cs;
}

void push_cluster(ClusterSet& cs, std::vector<ImageId> members) {
  Cluster c;
  c.cluster_id = cs.clusters.size();
  c.center_image = members.front();
  c.members = std::move(members);
  cs.clusters.push_back(std::move(c));
}

struct Ranked {
  double key;
  ImageId id;
  bool operator<(const Ranked& o) const { return key < o.key || (key == o.key && id < o.id); }
};

double sq_dist_xy(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  return dx * dx + dy * dy;
}

double angle_deg(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b)) * 180.0 / std::numbers::pi;
}

// Center first, then the k-1 smallest keys among the rest.
std::vector<ImageId> center_plus_nearest(ImageId center, std::vector<Ranked> others, std::size_t k) {
  const auto take = static_cast<std::ptrdiff_t>(k - 1);
  std::partial_sort(others.begin(), others.begin() + take, others.end());
  std::vector<ImageId> members{center};
  for (std::ptrdiff_t i = 0; i < take; ++i) members.push_back(others[static_cast<std::size_t>(i)].id);
  return members;
}

}  // namespace

std::vector<std::size_t> farthest_point_sampling(std::span<const Vec3> positions, std::size_t count,
                                                 std::size_t seed) {
  std::vector<std::size_t> chosen;
  if (positions.empty() || count == 0) return chosen;
  count = std::min(count, positions.size());
  std::vector<double> min_d(positions.size(), std::numeric_limits<double>::infinity());
  std::size_t next = seed;
  while (true) {
    chosen.push_back(next);
    min_d[next] = -1.0;
    if (chosen.size() == count) break;
    const Vec3& c = positions[next];
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < positions.size(); ++i) {
      min_d[i] = std::min(min_d[i], (positions[i] - c).squaredNorm());
      if (min_d[i] > best) {
        best = min_d[i];
        best_i = i;
      }
    }
    next = best_i;
  }
  return chosen;
}

double estimate_ground_height(std::span<const Point3D> points) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "ground estimate needs points");
  std::vector<double> z;
  z.reserve(points.size());
  for (const Point3D& p : points) z.push_back(p.position.z());
  std::sort(z.begin(), z.end());
  const auto count = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(z.size()))));
  if (count % 2 == 1) return z[count / 2];
  return 0.5 * (z[count / 2 - 1] + z[count / 2]);
}

ClusterSet sequence_clusters(const SceneModel& scene, const ClusteringConfig& cfg) {
  require_views(scene, cfg);
  std::vector<const CameraPose*> order;
  for (const auto& [id, pose] : scene.cameras) order.push_back(&pose);
  std::stable_sort(order.begin(), order.end(), [](const CameraPose* a, const CameraPose* b) {
    return a->seq_index < b->seq_index;
  });

  ClusterSet cs = make_set(ClusterMethod::Sequence, cfg);
  for (std::size_t start = 0; start + cfg.k <= order.size(); start += cfg.k) {
    std::vector<ImageId> members;
    for (std::size_t i = start; i < start + cfg.k; ++i) members.push_back(order[i]->image_id);
    push_cluster(cs, std::move(members));
  }
  return cs;
}

ClusterSet grid_clusters(const SceneModel& scene, const ClusteringConfig& cfg) {
  require_views(scene, cfg);
  std::vector<ImageId> ids;
  std::vector<Vec3> centers;
  std::vector<Vec3> axes;
  for (const auto& [id, pose] : scene.cameras) {
    ids.push_back(id);
    centers.push_back(camera_center(pose));
    axes.push_back(optical_axis_ray(pose).direction);
  }

  const AxisAlignedBounds b = bounds_of(centers);
  const double wx = b.max.x() - b.min.x();
  const double wy = b.max.y() - b.min.y();
  double cell = cfg.grid_cell_size.value_or(std::max(wx, wy) / 10.0);
  if (!(cell > 0.0)) cell = 1.0;
  const auto cells_along = [cell](double w) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(w / cell - 1e-9)));
  };
  const std::size_t nx = cells_along(wx);
  const std::size_t ny = cells_along(wy);

  ClusterSet cs = make_set(ClusterMethod::Grid, cfg);
  for (std::size_t row = 0; row < ny; ++row) {
    for (std::size_t col = 0; col < nx; ++col) {
      const Vec3 cell_center(b.min.x() + (static_cast<double>(col) + 0.5) * cell,
                             b.min.y() + (static_cast<double>(row) + 0.5) * cell, 0.0);
      std::vector<std::size_t> order(ids.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::vector<double> d2(ids.size());
      for (std::size_t i = 0; i < ids.size(); ++i) d2[i] = sq_dist_xy(centers[i], cell_center);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
        return d2[a] < d2[c] || (d2[a] == d2[c] && ids[a] < ids[c]);
      });

      const Vec3& anchor_axis = axes[order.front()];
      std::vector<ImageId> members;
      for (std::size_t i : order) {
        if (angle_deg(anchor_axis, axes[i]) > cfg.angle_threshold_deg) continue;
        members.push_back(ids[i]);
        if (members.size() == cfg.k) break;
      }
      if (members.size() == cfg.k) push_cluster(cs, std::move(members));
    }
  }
  if (cs.clusters.empty()) {
    throw Error(ErrorKind::EmptyResult, "no grid cell gathered k cameras within the angular threshold");
  }
  return cs;
}

ClusterSet ray_ground_clusters(const SceneModel& scene, const ClusteringConfig& cfg) {
  require_views(scene, cfg);
  const double height = cfg.ground_height ? *cfg.ground_height : estimate_ground_height(scene.points);
  const Plane ground = Plane::horizontal(height);

  std::vector<ImageId> ids;
  std::vector<Vec3> hits;
  for (const auto& [id, pose] : scene.cameras) {
    if (auto hit = ray_plane_intersect(optical_axis_ray(pose), ground)) {
      ids.push_back(id);
      hits.push_back(*hit);
    }
  }
  if (ids.size() < cfg.k) {
    throw Error(ErrorKind::InsufficientViews,
                fmt::format("only {} camera rays reach the ground plane, cluster size is {}", ids.size(),
                            cfg.k));
  }

  ClusterSet cs = make_set(ClusterMethod::Ray, cfg);
  const std::size_t count = std::min(cfg.effective_num_clusters(scene.cameras.size()), ids.size());
  for (std::size_t c : farthest_point_sampling(hits, count)) {
    std::vector<Ranked> others;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i != c) others.push_back({(hits[i] - hits[c]).squaredNorm(), ids[i]});
    }
    push_cluster(cs, center_plus_nearest(ids[c], std::move(others), cfg.k));
  }
  return cs;
}

SimilarityMatrix shared_point_similarity(const SceneModel& scene) {
  std::vector<ImageId> ids = scene.image_ids();
  kernels::TrackTable table;
  table.offsets.reserve(scene.points.size() + 1);
  bool any = false;
  for (const Point3D& p : scene.points) {
    for (ImageId id : p.track) {
      auto it = std::lower_bound(ids.begin(), ids.end(), id);
      if (it == ids.end() || *it != id) {
        throw Error(ErrorKind::Reference, fmt::format("point {} tracks unknown image {}", p.point_id, id));
      }
      table.indices.push_back(static_cast<std::uint32_t>(it - ids.begin()));
      any = true;
    }
    table.offsets.push_back(static_cast<std::uint32_t>(table.indices.size()));
  }
  if (!any) warn("all point tracks are empty; similarity matrix is all zeros");

  std::vector<std::uint32_t> counts(ids.size() * ids.size());
  kernels::accumulate_shared_points_omp(table, ids.size(), counts);
  return SimilarityMatrix(std::move(ids), std::move(counts));
}

ClusterSet sfm_clusters(const SceneModel& scene, const SimilarityMatrix& sim, const ClusteringConfig& cfg) {
  require_views(scene, cfg);
  std::vector<ImageId> ids;
  std::vector<Vec3> centers;
  std::vector<std::size_t> rows;
  for (const auto& [id, pose] : scene.cameras) {
    ids.push_back(id);
    centers.push_back(camera_center(pose));
    rows.push_back(sim.index_of(id));
  }

  ClusterSet cs = make_set(ClusterMethod::Sfm, cfg);
  const std::size_t count = cfg.effective_num_clusters(ids.size());
  for (std::size_t c : farthest_point_sampling(centers, count)) {
    std::vector<Ranked> others;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i != c) others.push_back({-static_cast<double>(sim.at(rows[c], rows[i])), ids[i]});
    }
    push_cluster(cs, center_plus_nearest(ids[c], std::move(others), cfg.k));
  }
  return cs;
}

QualityReport cluster_quality(const SceneModel& scene, const SimilarityMatrix& sim, const ClusterSet& cs) {
  QualityReport report;
  std::size_t total_pairs = 0;
  std::size_t zero_pairs = 0;
  for (const Cluster& c : cs.clusters) {
    std::vector<std::size_t> idx;
    for (ImageId id : c.members) {
      if (!scene.cameras.contains(id)) {
        throw Error(ErrorKind::Reference, fmt::format("cluster member {} not in scene", id));
      }
      idx.push_back(sim.index_of(id));
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    bool flagged = false;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        const std::uint32_t s = sim.at(idx[a], idx[b]);
        sum += s;
        ++pairs;
        if (s == 0) {
          ++zero_pairs;
          if (a == 0) flagged = true;
        }
      }
    }
    total_pairs += pairs;
    report.per_cluster_mean.push_back(pairs > 0 ? sum / static_cast<double>(pairs) : 0.0);
    if (flagged) report.flagged_clusters.push_back(c.cluster_id);
  }
  if (!report.per_cluster_mean.empty()) {
    report.global_mean = std::accumulate(report.per_cluster_mean.begin(), report.per_cluster_mean.end(), 0.0) /
                         static_cast<double>(report.per_cluster_mean.size());
    report.global_min = *std::min_element(report.per_cluster_mean.begin(), report.per_cluster_mean.end());
  }
  report.zero_pair_fraction =
      total_pairs > 0 ? static_cast<double>(zero_pairs) / static_cast<double>(total_pairs) : 0.0;
  return report;
}

ClusterSet run_clustering(const SceneModel& scene, ClusterMethod method, const ClusteringConfig& cfg) {
  switch (method) {
    case ClusterMethod::Sequence: return sequence_clusters(scene, cfg);
    case ClusterMethod::Grid: return grid_clusters(scene, cfg);
    case ClusterMethod::Ray: return ray_ground_clusters(scene, cfg);
    case ClusterMethod::Sfm: return sfm_clusters(scene, shared_point_similarity(scene), cfg);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown clustering method");
}

}  // namespace aug3d
