#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace aug3d {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Quat = Eigen::Quaterniond;

// Points closer than this (camera-frame z, meters) are never rendered,
// tracked or used as a depth bound.
inline constexpr double kNearPlane = 0.01;

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();  // unit length
};

struct AxisAlignedBounds {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  double half_diagonal() const { return 0.5 * extent().norm(); }
};

// Points x on the plane satisfy normal.dot(x) == offset.
struct Plane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  double signed_distance(const Vec3& x) const { return normal.dot(x) - offset; }
  static Plane horizontal(double height) { return {Vec3::UnitZ(), height}; }
};

std::optional<Vec3> ray_plane_intersect(const Ray& ray, const Plane& plane);

// Vertical projection onto the plane, falling back to the orthogonal
// projection when the plane is (near) vertical.
Vec3 project_to_plane(const Vec3& x, const Plane& plane);

AxisAlignedBounds bounds_of(std::span<const Vec3> positions);

// Least-squares fit of z = a*x + b*y + c, returned with the normal pointing
// toward +Z. Throws DegenerateFit when fewer than three points are given or
// the horizontal scatter matrix has condition number above 1e12.
Plane fit_plane_lsq(std::span<const Vec3> positions);

}  // namespace aug3d
