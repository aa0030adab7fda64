#include "aug3d/geometry.hpp"

#include <cmath>
#include <limits>

#include "aug3d/error.hpp"

namespace aug3d {

std::optional<Vec3> ray_plane_intersect(const Ray& ray, const Plane& plane) {
  const double denom = plane.normal.dot(ray.direction);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double t = (plane.offset - plane.normal.dot(ray.origin)) / denom;
  if (!(t > 1e-9)) return std::nullopt;
  return ray.origin + t * ray.direction;
}

Vec3 project_to_plane(const Vec3& x, const Plane& plane) {
  const double nz = plane.normal.z();
  if (std::abs(nz) > 1e-12) {
    Vec3 p = x;
    p.z() = (plane.offset - plane.normal.x() * x.x() - plane.normal.y() * x.y()) / nz;
    return p;
  }
  return x - plane.signed_distance(x) * plane.normal;
}

AxisAlignedBounds bounds_of(std::span<const Vec3> positions) {
  if (positions.empty()) throw Error(ErrorKind::EmptyInput, "bounds of an empty point set");
  AxisAlignedBounds b{positions.front(), positions.front()};
  for (const Vec3& p : positions) {
    b.min = b.min.cwiseMin(p);
    b.max = b.max.cwiseMax(p);
  }
  return b;
}

Plane fit_plane_lsq(std::span<const Vec3> positions) {
  if (positions.size() < 3) {
    throw Error(ErrorKind::DegenerateFit, "plane fit needs at least 3 points");
  }
  const double n = static_cast<double>(positions.size());
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : positions) mean += p;
  mean /= n;

  double sxx = 0, sxy = 0, syy = 0, sxz = 0, syz = 0;
  for (const Vec3& p : positions) {
    const Vec3 q = p - mean;
    sxx += q.x() * q.x();
    sxy += q.x() * q.y();
    syy += q.y() * q.y();
    sxz += q.x() * q.z();
    syz += q.y() * q.z();
  }

  // Eigenvalues of the symmetric 2x2 horizontal scatter matrix.
  const double half_trace = 0.5 * (sxx + syy);
  const double root = std::hypot(0.5 * (sxx - syy), sxy);
  const double lambda_max = half_trace + root;
  const double lambda_min = half_trace - root;
  if (!(lambda_max > 0.0) || !(lambda_min > lambda_max * 1e-12)) {
    throw Error(ErrorKind::DegenerateFit,
                "normal equations are ill-conditioned (collinear or vertical data)");
  }

  const double det = sxx * syy - sxy * sxy;
  const double a = (sxz * syy - syz * sxy) / det;
  const double b = (syz * sxx - sxz * sxy) / det;
  const double c = mean.z() - a * mean.x() - b * mean.y();

  const double norm = std::sqrt(a * a + b * b + 1.0);
  return Plane{Vec3(-a, -b, 1.0) / norm, c / norm};
}

}  // namespace aug3d
