#include "aug3d/synth.hpp"

#include <algorithm>
#include <cmath>

#include "aug3d/error.hpp"
#include "aug3d/kernels.hpp"
#include "aug3d/rng.hpp"

namespace aug3d {

namespace {

constexpr Rgb kRoofColor{190, 70, 60};
constexpr Rgb kWallColor{160, 160, 165};
constexpr Rgb kGroundColor{80, 130, 70};

bool inside_any(const std::vector<Box2D>& boxes, double x, double y) {
  for (const Box2D& b : boxes) {
    if (x >= b.min.x() && x <= b.max.x() && y >= b.min.y() && y <= b.max.y()) return true;
  }
  return false;
}

}  // namespace

void SynthSpec::validate() const {
  if (!(bounds.max.x() > bounds.min.x() && bounds.max.y() > bounds.min.y())) {
    throw Error(ErrorKind::InvalidArgument, "synth bounds must have positive XY extent");
  }
  if (!(building_size.min > 0.0 && building_size.min <= building_size.max)) {
    throw Error(ErrorKind::InvalidArgument, "invalid building size range");
  }
  if (!(building_height.min > 0.0 && building_height.min <= building_height.max)) {
    throw Error(ErrorKind::InvalidArgument, "invalid building height range");
  }
  if (!(altitude > building_height.max)) {
    throw Error(ErrorKind::InvalidArgument, "scan altitude must exceed the tallest building");
  }
  if (!(line_spacing > 0.0) || !(shot_spacing > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "scan spacings must be > 0");
  }
  if (!(pitch_deg >= 0.0 && pitch_deg < 90.0)) {
    throw Error(ErrorKind::InvalidArgument, "pitch must be in [0, 90) degrees");
  }
  if (!(roof_fraction >= 0.0 && roof_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "roof fraction must be in [0, 1]");
  }
  if (!(min_gap >= 0.0)) throw Error(ErrorKind::InvalidArgument, "min gap must be >= 0");
}

Intrinsics default_synth_intrinsics() {
  Intrinsics in;
  in.width = 320;
  in.height = 240;
  in.fx = in.fy = 300.0;
  in.cx = 160.0;
  in.cy = 120.0;
  return in;
}

SynthCity generate_city(const SynthSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, "city"));
  SynthCity city;
  const double ground_z = spec.bounds.min.z();

  struct Building {
    Box2D footprint;
    double height;
  };
  std::vector<Building> buildings;
  const std::size_t max_attempts = 1000 * std::max<std::size_t>(spec.n_buildings, 1);
  std::size_t attempts = 0;
  while (buildings.size() < spec.n_buildings) {
    if (++attempts > max_attempts) {
      throw Error(ErrorKind::Placement, "could not place " + std::to_string(spec.n_buildings) +
                                            " non-overlapping buildings");
    }
    const double w = rng.uniform(spec.building_size.min, spec.building_size.max);
    const double l = rng.uniform(spec.building_size.min, spec.building_size.max);
    const double h = rng.uniform(spec.building_height.min, spec.building_height.max);
    const double span_x = spec.bounds.max.x() - spec.bounds.min.x() - w;
    const double span_y = spec.bounds.max.y() - spec.bounds.min.y() - l;
    if (span_x < 0.0 || span_y < 0.0) continue;
    const double x = spec.bounds.min.x() + rng.uniform(0.0, span_x);
    const double y = spec.bounds.min.y() + rng.uniform(0.0, span_y);
    Box2D fp;
    fp.min = Vec2(x, y);
    fp.max = Vec2(x + w, y + l);
    const bool clear = std::none_of(buildings.begin(), buildings.end(), [&](const Building& o) {
      return fp.min.x() < o.footprint.max.x() + spec.min_gap && o.footprint.min.x() < fp.max.x() + spec.min_gap &&
             fp.min.y() < o.footprint.max.y() + spec.min_gap && o.footprint.min.y() < fp.max.y() + spec.min_gap;
    });
    if (!clear) continue;
    fp.member_ids = {buildings.size()};
    buildings.push_back({fp, h});
  }

  for (const Building& b : buildings) city.gt_boxes.push_back(b.footprint);

  PointId next_id = 0;
  const auto emit = [&](const Vec3& pos, Rgb color) {
    Point3D p;
    p.point_id = next_id++;
    p.position = pos;
    p.color = color;
    city.points.push_back(std::move(p));
  };

  for (std::size_t i = 0; i < spec.ground_points; ++i) {
    double x = 0.0;
    double y = 0.0;
    do {
      x = rng.uniform(spec.bounds.min.x(), spec.bounds.max.x());
      y = rng.uniform(spec.bounds.min.y(), spec.bounds.max.y());
    } while (inside_any(city.gt_boxes, x, y));
    emit(Vec3(x, y, ground_z), kGroundColor);
  }

  for (const Building& b : buildings) {
    const Vec2 lo = b.footprint.min;
    const Vec2 hi = b.footprint.max;
    const double w = hi.x() - lo.x();
    const double l = hi.y() - lo.y();
    const auto roof = static_cast<std::size_t>(
        std::llround(spec.roof_fraction * static_cast<double>(spec.points_per_building)));
    for (std::size_t i = 0; i < roof; ++i) {
      emit(Vec3(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()), ground_z + b.height), kRoofColor);
    }
    const double perimeter = 2.0 * (w + l);
    for (std::size_t i = roof; i < spec.points_per_building; ++i) {
      double t = rng.uniform(0.0, perimeter);
      const double z = ground_z + rng.uniform(0.0, b.height);
      Vec2 xy;
      if (t < w) {
        xy = Vec2(lo.x() + t, lo.y());
      } else if ((t -= w) < l) {
        xy = Vec2(hi.x(), lo.y() + t);
      } else if ((t -= l) < w) {
        xy = Vec2(hi.x() - t, hi.y());
      } else {
        t -= w;
        xy = Vec2(lo.x(), hi.y() - t);
      }
      emit(Vec3(xy.x(), xy.y(), z), kWallColor);
    }
  }
  return city;
}

namespace {

CameraPose survey_pose(const Vec3& center, const Vec3& heading, double pitch_rad) {
  const Vec3 forward = std::sin(pitch_rad) * heading - std::cos(pitch_rad) * Vec3::UnitZ();
  const Vec3 down = -(std::cos(pitch_rad) * heading + std::sin(pitch_rad) * Vec3::UnitZ());
  const Vec3 right = down.cross(forward);
  Mat3 r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  return pose_from_center(r, center);
}

}  // namespace

std::vector<CameraPose> generate_grid_scan(const SynthSpec& spec, IntrinsicsId intrinsics_id) {
  spec.validate();
  const Vec3 extent = spec.bounds.extent();
  if (spec.line_spacing > extent.y()) warn("scan line spacing exceeds the scene extent; flying a single line");
  const auto lines = static_cast<std::size_t>(std::floor(extent.y() / spec.line_spacing + 1e-9)) + 1;
  const auto shots = static_cast<std::size_t>(std::floor(extent.x() / spec.shot_spacing + 1e-9)) + 1;
  const double z = spec.bounds.min.z() + spec.altitude;
  const double pitch = deg_to_rad(spec.pitch_deg);
  const double mid_y = spec.bounds.center().y();

  std::vector<CameraPose> poses;
  const auto add = [&](const Vec3& c, const Vec3& heading) {
    CameraPose p = survey_pose(c, heading, pitch);
    p.seq_index = poses.size();
    p.image_id = static_cast<ImageId>(poses.size() + 1);
    p.intrinsics_id = intrinsics_id;
    p.name = "img_" + std::to_string(100000 + poses.size()).substr(1) + ".ppm";
    poses.push_back(std::move(p));
  };

  for (std::size_t j = 0; j < lines; ++j) {
    const double y = spec.bounds.min.y() + static_cast<double>(j) * spec.line_spacing;
    const bool forward = j % 2 == 0;
    const Vec3 heading = forward ? Vec3(Vec3::UnitX()) : Vec3(-Vec3::UnitX());
    for (std::size_t s = 0; s < shots; ++s) {
      const std::size_t i = forward ? s : shots - 1 - s;
      const Vec3 c(spec.bounds.min.x() + static_cast<double>(i) * spec.shot_spacing, y, z);
      add(c, heading);
      if (spec.abrupt_turns && s == shots / 2) {
        const Vec3 leg = y < mid_y ? Vec3(Vec3::UnitY()) : Vec3(-Vec3::UnitY());
        for (std::size_t m = 1; m <= spec.abrupt_leg_shots; ++m) {
          add(c + static_cast<double>(m) * spec.shot_spacing * leg, leg);
        }
      }
    }
  }
  return poses;
}

std::vector<Point3D> synth_tracks(std::vector<Point3D> points, const SceneModel& cameras_only) {
  std::vector<ImageId> ids;
  std::vector<kernels::ProjectionCamera> cams;
  for (const auto& [id, pose] : cameras_only.cameras) {
    ids.push_back(id);
    cams.push_back(kernels::ProjectionCamera::from(pose, cameras_only.intrinsics_for(pose)));
  }
  std::vector<Vec3> pos;
  pos.reserve(points.size());
  for (const Point3D& p : points) pos.push_back(p.position);
  const auto tracks = kernels::frustum_tracks_omp(pos, cams);
  for (std::size_t i = 0; i < points.size(); ++i) {
    points[i].track.clear();
    for (std::uint32_t c : tracks[i]) points[i].track.push_back(ids[c]);
  }
  return points;
}

SynthScene generate_scene(const SynthSpec& spec, const Intrinsics& intr) {
  intr.validate();
  SynthScene out;
  SynthCity city = generate_city(spec);
  out.gt_boxes = std::move(city.gt_boxes);
  out.scene.intrinsics.emplace(1, intr);
  for (CameraPose& p : generate_grid_scan(spec, 1)) out.scene.cameras.emplace(p.image_id, std::move(p));
  out.scene.points = synth_tracks(std::move(city.points), out.scene);
  return out;
}

}  // namespace aug3d
