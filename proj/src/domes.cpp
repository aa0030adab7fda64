#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "aug3d/error.hpp"
#include "aug3d/rng.hpp"
#include "aug3d/sampling.hpp"

namespace aug3d {

void DomeSpec::validate() const {
  if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "dome radius must be > 0");
  if (!(elevation.min >= 0.0 && elevation.min <= elevation.max &&
        elevation.max <= std::numbers::pi / 2 + 1e-12)) {
    throw Error(ErrorKind::InvalidArgument, "dome elevation range must satisfy 0 <= min <= max <= pi/2");
  }
  if (!(azimuth.min >= 0.0 && azimuth.min <= azimuth.max && azimuth.max <= 2 * std::numbers::pi + 1e-12)) {
    throw Error(ErrorKind::InvalidArgument, "dome azimuth range must lie within [0, 2pi]");
  }
}

void SamplingConfig::validate() const {
  if (!(slice_percentile > 0.0 && slice_percentile < 100.0)) {
    throw Error(ErrorKind::InvalidArgument, "slice percentile must be in (0, 100)");
  }
  if (merge_m < 1) throw Error(ErrorKind::InvalidArgument, "merge_m must be >= 1");
  if (mask_resolution < 8) throw Error(ErrorKind::InvalidArgument, "mask resolution must be >= 8");
  if (min_component_area < 0 || closing_iterations < 0) {
    throw Error(ErrorKind::InvalidArgument, "component area and closing iterations must be >= 0");
  }
  if (!(dome_radius_factor_grid > 0.0) || !(dome_radius_factor_box > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "dome radius factors must be > 0");
  }
  if (poses_per_dome < 1) throw Error(ErrorKind::InvalidArgument, "poses_per_dome must be >= 1");
  if (!(scale_stop_factor > 0.0)) throw Error(ErrorKind::InvalidArgument, "scale stop factor must be > 0");
  DomeSpec probe;
  probe.azimuth = azimuth;
  probe.elevation = elevation;
  probe.validate();
}

DomeMode parse_dome_mode(std::string_view s) {
  if (s == "random") return DomeMode::Random;
  if (s == "spiral") return DomeMode::Spiral;
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown dome mode '{}'", s));
}

Mat3 look_at_rotation(const Vec3& eye, const Vec3& target) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(Vec3::UnitZ());
  if (right.norm() < 1e-9) right = forward.cross(Vec3::UnitX());
  right.normalize();
  const Vec3 down = forward.cross(right);
  Mat3 r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  return r;
}

std::vector<SampledPose> dome_poses(const DomeSpec& dome, std::size_t n, DomeMode mode, std::uint64_t seed,
                                    IntrinsicsId intrinsics_id, ImageId first_image_id) {
  if (n == 0) throw Error(ErrorKind::EmptyRequest, "dome sampling needs at least one pose");
  dome.validate();

  constexpr double kSpiralTurns = 3.0;
  Rng rng(derive_seed(seed, dome.tag));
  std::string stem = dome.tag.empty() ? std::string("dome") : dome.tag;
  std::replace(stem.begin(), stem.end(), ':', '_');

  std::vector<SampledPose> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double az = 0.0;
    double el = 0.0;
    if (mode == DomeMode::Random) {
      az = rng.uniform(dome.azimuth.min, dome.azimuth.max);
      el = rng.uniform(dome.elevation.min, dome.elevation.max);
    } else {
      const double turns = static_cast<double>(i) * kSpiralTurns / static_cast<double>(n);
      az = dome.azimuth.min + (dome.azimuth.max - dome.azimuth.min) * (turns - std::floor(turns));
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      el = std::lerp(dome.elevation.max, dome.elevation.min, t);
    }
    const Vec3 eye = dome.center + dome.radius * Vec3(std::cos(el) * std::cos(az),
                                                      std::cos(el) * std::sin(az), std::sin(el));
    SampledPose s;
    s.pose = pose_from_center(look_at_rotation(eye, dome.center), eye);
    s.pose.image_id = first_image_id + static_cast<ImageId>(i);
    s.pose.intrinsics_id = intrinsics_id;
    s.pose.name = fmt::format("{}_{:04}.ppm", stem, i);
    s.pose.seq_index = i;
    s.source_dome = dome.tag;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<double> derive_scales(const AxisAlignedBounds& bounds, double scale_stop_factor) {
  const Vec3 e = bounds.extent();
  const double longest = std::max(e.x(), e.y());
  if (!(longest > 0.0)) throw Error(ErrorKind::InvalidArgument, "bounds are degenerate in XY");
  const double stop = scale_stop_factor * e.z();
  std::vector<double> scales{longest};
  for (double s = longest / 2; s >= stop && scales.size() < kMaxGridScales; s /= 2) scales.push_back(s);
  return scales;
}

std::vector<DomeSpec> grid_domes(const AxisAlignedBounds& bounds, const Plane& ground,
                                 const SamplingConfig& cfg) {
  cfg.validate();
  const Vec3 e = bounds.extent();
  std::vector<DomeSpec> out;
  const std::vector<double> scales = derive_scales(bounds, cfg.scale_stop_factor);
  for (std::size_t si = 0; si < scales.size(); ++si) {
    const double s = scales[si];
    const auto cells = [s](double w) {
      return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(w / s - 1e-9)));
    };
    const std::size_t nx = cells(e.x());
    const std::size_t ny = cells(e.y());
    for (std::size_t r = 0; r < ny; ++r) {
      for (std::size_t c = 0; c < nx; ++c) {
        const Vec3 top(bounds.min.x() + (static_cast<double>(c) + 0.5) * s,
                       bounds.min.y() + (static_cast<double>(r) + 0.5) * s, 0.0);
        DomeSpec d;
        d.center = project_to_plane(top, ground);
        d.radius = cfg.dome_radius_factor_grid * s;
        d.azimuth = cfg.azimuth;
        d.elevation = cfg.elevation;
        d.tag = fmt::format("grid:s{}:r{}:c{}", si, r, c);
        out.push_back(std::move(d));
      }
    }
  }
  return out;
}

}  // namespace aug3d
