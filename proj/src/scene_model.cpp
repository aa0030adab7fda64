#include "aug3d/scene_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "aug3d/error.hpp"

namespace aug3d {

void Intrinsics::validate() const {
  if (width < 1 || height < 1) throw Error(ErrorKind::InvalidArgument, "image size must be >= 1");
  if (!(fx > 0.0) || !(fy > 0.0)) throw Error(ErrorKind::InvalidArgument, "focal lengths must be > 0");
  if (!(cx > 0.0 && cx < width) || !(cy > 0.0 && cy < height)) {
    throw Error(ErrorKind::InvalidArgument, "principal point must lie inside the image");
  }
}

Mat3 Intrinsics::matrix() const {
  Mat3 k = Mat3::Identity();
  k(0, 0) = fx;
  k(1, 1) = fy;
  k(0, 2) = cx;
  k(1, 2) = cy;
  return k;
}

Mat4 CameraPose::world_to_camera() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_matrix();
  m.topRightCorner<3, 1>() = translation;
  return m;
}

const Intrinsics& SceneModel::intrinsics_for(const CameraPose& pose) const {
  auto it = intrinsics.find(pose.intrinsics_id);
  if (it == intrinsics.end()) {
    throw Error(ErrorKind::Reference, "image " + std::to_string(pose.image_id) +
                                          " references unknown camera " +
                                          std::to_string(pose.intrinsics_id));
  }
  return it->second;
}

const CameraPose& SceneModel::camera(ImageId id) const {
  auto it = cameras.find(id);
  if (it == cameras.end()) throw Error(ErrorKind::Reference, "unknown image id " + std::to_string(id));
  return it->second;
}

std::vector<ImageId> SceneModel::image_ids() const {
  std::vector<ImageId> ids;
  ids.reserve(cameras.size());
  for (const auto& [id, pose] : cameras) ids.push_back(id);
  return ids;
}

std::vector<Vec3> SceneModel::point_positions() const {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Point3D& p : points) out.push_back(p.position);
  return out;
}

void SceneModel::validate() const {
  if (cameras.empty()) throw Error(ErrorKind::EmptyModel, "scene has no cameras");
  for (const auto& [id, pose] : cameras) {
    if (pose.image_id != id) throw Error(ErrorKind::Reference, "camera map key mismatch");
    if (std::abs(pose.rotation.norm() - 1.0) > 1e-9) {
      throw Error(ErrorKind::InvalidArgument, "non-unit quaternion on image " + std::to_string(id));
    }
    if (!camera_center(pose).allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "non-finite camera center on image " + std::to_string(id));
    }
    intrinsics_for(pose);
  }
  for (const Point3D& p : points) {
    std::unordered_set<ImageId> seen;
    for (ImageId id : p.track) {
      if (!cameras.contains(id)) {
        throw Error(ErrorKind::Reference, "point " + std::to_string(p.point_id) +
                                              " tracks unknown image " + std::to_string(id));
      }
      if (!seen.insert(id).second) {
        throw Error(ErrorKind::InvalidArgument, "duplicate track entry on point " +
                                                    std::to_string(p.point_id));
      }
    }
  }
}

Vec3 camera_center(const CameraPose& pose) {
  return -(pose.rotation.conjugate() * pose.translation);
}

Ray optical_axis_ray(const CameraPose& pose) {
  Vec3 dir = pose.rotation.conjugate() * Vec3::UnitZ();
  return Ray{camera_center(pose), dir.normalized()};
}

AxisAlignedBounds scene_bounds(std::span<const Point3D> points) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "scene bounds of an empty point list");
  AxisAlignedBounds b{points.front().position, points.front().position};
  for (const Point3D& p : points) {
    b.min = b.min.cwiseMin(p.position);
    b.max = b.max.cwiseMax(p.position);
  }
  return b;
}

CameraPose pose_from_center(const Mat3& world_to_camera, const Vec3& center) {
  CameraPose pose;
  pose.rotation = Quat(world_to_camera).normalized();
  pose.translation = -(pose.rotation * center);
  return pose;
}

namespace {

SceneModel transform_world(SceneModel scene, const Mat3& q) {
  const Quat qq(q);
  for (auto& [id, pose] : scene.cameras) {
    pose.rotation = (pose.rotation * qq.conjugate()).normalized();
  }
  for (Point3D& p : scene.points) p.position = q * p.position;
  return scene;
}

}  // namespace

SceneModel remap_up_axis(SceneModel scene, Axis up) {
  Mat3 q = Mat3::Identity();
  switch (up) {
    case Axis::Z:
      break;
    case Axis::Y:  // (x,y,z) -> (z,x,y)
      q << 0, 0, 1, 1, 0, 0, 0, 1, 0;
      break;
    case Axis::X:  // (x,y,z) -> (y,z,x)
      q << 0, 1, 0, 0, 0, 1, 1, 0, 0;
      break;
  }
  scene = transform_world(std::move(scene), q);
  scene.up_axis = Axis::Z;
  return scene;
}

SceneModel align_ground(SceneModel scene, double fraction) {
  if (scene.up_axis != Axis::Z) {
    throw Error(ErrorKind::InvalidArgument, "align_ground expects a +Z-up scene; remap first");
  }
  if (scene.points.empty()) throw Error(ErrorKind::EmptyInput, "ground alignment needs points");
  std::vector<Vec3> pos = scene.point_positions();
  const auto count = std::max<std::size_t>(
      3, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(pos.size()))));
  const auto keep = std::min(count, pos.size());
  std::nth_element(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(keep - 1), pos.end(),
                   [](const Vec3& a, const Vec3& b) { return a.z() < b.z(); });
  pos.resize(keep);
  const Plane ground = fit_plane_lsq(pos);
  const Mat3 q = Quat::FromTwoVectors(ground.normal, Vec3::UnitZ()).toRotationMatrix();
  return transform_world(std::move(scene), q);
}

}  // namespace aug3d
