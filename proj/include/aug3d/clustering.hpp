#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aug3d/scene_model.hpp"

namespace aug3d {

enum class ClusterMethod { Sequence, Grid, Ray, Sfm };

std::string_view to_string(ClusterMethod m) noexcept;
// Accepts "sequence", "grid", "ray", "sfm". Throws InvalidArgument otherwise.
ClusterMethod parse_cluster_method(std::string_view s);

struct ClusteringConfig {
  std::size_t k = 20;
  std::optional<std::size_t> num_clusters;  // default floor(N_images / k), at least 1
  double angle_threshold_deg = 45.0;
  std::optional<double> ground_height;    // nullopt = estimate from points
  std::optional<double> grid_cell_size;   // nullopt = camera XY extent / 10
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t effective_num_clusters(std::size_t num_images) const;
};

struct Cluster {
  std::size_t cluster_id = 0;
  ImageId center_image = 0;
  std::vector<ImageId> members;  // center first, exactly k entries

  friend bool operator==(const Cluster&, const Cluster&) = default;
};

struct ClusterSet {
  ClusterMethod method = ClusterMethod::Sequence;
  ClusteringConfig config;
  std::vector<Cluster> clusters;
};

// Dense symmetric shared-point counts over `ids` (ascending image ids).
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::vector<ImageId> ids, std::vector<std::uint32_t> counts);

  const std::vector<ImageId>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  std::size_t index_of(ImageId id) const;  // throws Reference when absent
  bool contains(ImageId id) const;

  std::uint32_t at(std::size_t i, std::size_t j) const { return counts_[i * ids_.size() + j]; }
  std::uint32_t operator()(ImageId a, ImageId b) const { return at(index_of(a), index_of(b)); }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

 private:
  std::vector<ImageId> ids_;
  std::vector<std::uint32_t> counts_;
};

struct QualityReport {
  std::vector<double> per_cluster_mean;
  double global_mean = 0.0;
  double global_min = 0.0;
  double zero_pair_fraction = 0.0;
  // Clusters whose center shares no point with at least one member.
  std::vector<std::size_t> flagged_clusters;
};

ClusterSet sequence_clusters(const SceneModel& scene, const ClusteringConfig& cfg);
ClusterSet grid_clusters(const SceneModel& scene, const ClusteringConfig& cfg);
ClusterSet ray_ground_clusters(const SceneModel& scene, const ClusteringConfig& cfg);
SimilarityMatrix shared_point_similarity(const SceneModel& scene);
ClusterSet sfm_clusters(const SceneModel& scene, const SimilarityMatrix& sim, const ClusteringConfig& cfg);
QualityReport cluster_quality(const SceneModel& scene, const SimilarityMatrix& sim, const ClusterSet& cs);

// Dispatches on method; computes the similarity matrix itself for Sfm.
ClusterSet run_clustering(const SceneModel& scene, ClusterMethod method, const ClusteringConfig& cfg);

// Median z of the lowest 5% of points.
double estimate_ground_height(std::span<const Point3D> points);

// Greedy farthest-point sampling over `positions`, seeded at index `seed`.
// Ties on the max-min distance resolve to the lowest index, so callers that
// order positions by image id get the ascending-id tie rule.
std::vector<std::size_t> farthest_point_sampling(std::span<const Vec3> positions, std::size_t count,
                                                 std::size_t seed = 0);

}  // namespace aug3d
