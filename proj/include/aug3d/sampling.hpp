#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "aug3d/geometry.hpp"
#include "aug3d/scene_model.hpp"

namespace aug3d {

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

struct Range {
  double min = 0.0;
  double max = 0.0;
};

// A virtual hemisphere above `center`; cameras on it look at the center.
struct DomeSpec {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  Range azimuth{0.0, 2.0 * std::numbers::pi};                 // radians
  Range elevation{deg_to_rad(30.0), deg_to_rad(80.0)};       // radians above horizon
  std::string tag;

  void validate() const;
};

struct SampledPose {
  CameraPose pose;
  std::string source_dome;
  bool synthetic = true;
};

struct SamplingConfig {
  double slice_percentile = 70.0;
  std::size_t merge_m = 3;
  int mask_resolution = 512;
  int min_component_area = 9;
  int closing_iterations = 1;
  double dome_radius_factor_grid = 0.75;  // times cell size
  double dome_radius_factor_box = 1.0;    // times box diagonal
  std::size_t poses_per_dome = 20;
  Range elevation{deg_to_rad(30.0), deg_to_rad(80.0)};
  Range azimuth{0.0, 2.0 * std::numbers::pi};
  double scale_stop_factor = 2.0;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class DomeMode { Random, Spiral };

DomeMode parse_dome_mode(std::string_view s);

// World-to-camera rotation looking from `eye` toward `target` with +Z world
// up and camera +Y down. Falls back to up = +X when looking straight down or
// up.
Mat3 look_at_rotation(const Vec3& eye, const Vec3& target);

// Random mode draws azimuth/elevation uniformly from a stream seeded by
// derive_seed(seed, dome.tag). Spiral mode winds three turns while the
// elevation descends linearly from max to min. Image ids are assigned
// consecutively from first_image_id.
std::vector<SampledPose> dome_poses(const DomeSpec& dome, std::size_t n, DomeMode mode, std::uint64_t seed,
                                    IntrinsicsId intrinsics_id, ImageId first_image_id = 1);

inline constexpr std::size_t kMaxGridScales = 6;

// E = max XY extent; emits E, E/2, ... while the cell size stays >= factor *
// height, always at least E and at most kMaxGridScales entries.
std::vector<double> derive_scales(const AxisAlignedBounds& bounds, double scale_stop_factor);

std::vector<DomeSpec> grid_domes(const AxisAlignedBounds& bounds, const Plane& ground,
                                 const SamplingConfig& cfg);

Plane fit_plane_lsq(std::span<const Point3D> points);

struct PercentileSlice {
  double threshold = 0.0;
  std::vector<Point3D> above;
};

// Nearest-rank percentile of z: the value at 1-based rank ceil(P/100 * N) of
// the ascending sort. `above` keeps points with z >= threshold in input order.
PercentileSlice percentile_slice(std::span<const Point3D> points, double percentile);

// Top-down occupancy raster. Pixel (col,row) covers world XY
// [origin + col*size, origin + (col+1)*size) x [origin + row*size, ...).
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // row-major, 0 or 1
  Vec2 origin = Vec2::Zero();
  double pixel_size = 1.0;

  bool at(int col, int row) const { return bits[static_cast<std::size_t>(row) * width + col] != 0; }
  std::size_t count() const;
  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

struct Box2D {
  Vec2 min = Vec2::Zero();
  Vec2 max = Vec2::Zero();
  std::vector<std::size_t> member_ids;  // sorted ascending

  Vec2 centroid() const { return 0.5 * (min + max); }
  double diagonal() const { return (max - min).norm(); }
  double area() const { return (max - min).prod(); }
};

double iou(const Box2D& a, const Box2D& b);

BinaryMask occupancy_mask(std::span<const Point3D> above, const AxisAlignedBounds& bounds,
                          const SamplingConfig& cfg);

// 3x3 closing (dilate then erode). Pixels outside the raster never count
// against erosion, so the result always contains the input.
BinaryMask morphological_close(const BinaryMask& mask, int iterations);

std::vector<Box2D> extract_boxes(const BinaryMask& mask, int min_component_area);

std::vector<Box2D> merge_nearest_boxes(std::span<const Box2D> boxes, std::size_t merge_m);

std::vector<DomeSpec> semantic_domes(std::span<const Box2D> boxes, const Plane& ground,
                                     const SamplingConfig& cfg);

// Plane through the lowest 5% of points by z (at least three points).
Plane fit_ground_plane(std::span<const Point3D> points, double fraction = 0.05);

// percentile_slice -> occupancy_mask -> extract_boxes with cfg defaults.
struct BuildingDetection {
  PercentileSlice slice;
  BinaryMask mask;
  std::vector<Box2D> boxes;
};

BuildingDetection detect_buildings(std::span<const Point3D> points, const SamplingConfig& cfg);

}  // namespace aug3d
