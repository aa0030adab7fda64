#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aug3d/geometry.hpp"

namespace aug3d {

using ImageId = std::uint32_t;
using IntrinsicsId = std::uint32_t;
using PointId = std::uint64_t;

struct Rgb {
  std::uint8_t r = 128;
  std::uint8_t g = 128;
  std::uint8_t b = 128;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Pinhole camera. Invariants checked by validate().
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;
  Mat3 matrix() const;
  friend bool operator==(const Intrinsics&, const Intrinsics&) = default;
};

// World-to-camera pose: x_cam = R * x_world + t, camera +Z forward, +X
// right, +Y down.
struct CameraPose {
  ImageId image_id = 0;
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();
  IntrinsicsId intrinsics_id = 0;
  std::string name;
  std::size_t seq_index = 0;

  Mat3 rotation_matrix() const { return rotation.toRotationMatrix(); }
  Vec3 to_camera(const Vec3& world) const { return rotation * world + translation; }
  Mat4 world_to_camera() const;
};

struct Point3D {
  PointId point_id = 0;
  Vec3 position = Vec3::Zero();
  Rgb color;
  std::vector<ImageId> track;
};

enum class Axis { X, Y, Z };

struct SceneModel {
  std::map<ImageId, CameraPose> cameras;
  std::map<IntrinsicsId, Intrinsics> intrinsics;
  std::vector<Point3D> points;
  Axis up_axis = Axis::Z;

  const Intrinsics& intrinsics_for(const CameraPose& pose) const;
  const CameraPose& camera(ImageId id) const;
  std::vector<ImageId> image_ids() const;
  std::vector<Vec3> point_positions() const;

  // Checks cross-references, track uniqueness and quaternion norms.
  void validate() const;
};

Vec3 camera_center(const CameraPose& pose);
Ray optical_axis_ray(const CameraPose& pose);
AxisAlignedBounds scene_bounds(std::span<const Point3D> points);

// Builds a pose from a rotation matrix and camera center.
CameraPose pose_from_center(const Mat3& world_to_camera, const Vec3& center);

// Permutes world axes so that `up` becomes +Z (right-handed cyclic shift).
SceneModel remap_up_axis(SceneModel scene, Axis up);

// Rotates the world so the plane fitted to the lowest `fraction` of points
// (by z) has normal +Z. Requires up_axis == Z.
SceneModel align_ground(SceneModel scene, double fraction = 0.05);

// ---- COLMAP text model subset -------------------------------------------

SceneModel parse_sfm_model(std::string_view images_text, std::string_view cameras_text,
                           std::string_view points_text);

struct SfmText {
  std::string cameras;
  std::string images;
  std::string points;
};

SfmText write_sfm_model(const SceneModel& scene);

// ---- ASCII PLY ------------------------------------------------------------

std::vector<Point3D> parse_ply(std::string_view bytes);
std::string write_ply(std::span<const Point3D> points);

}  // namespace aug3d
