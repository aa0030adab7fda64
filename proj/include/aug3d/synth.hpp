#pragma once

#include <cstdint>
#include <vector>

#include "aug3d/sampling.hpp"
#include "aug3d/scene_model.hpp"

namespace aug3d {

// Procedural city and drone survey used as ground truth for the clustering
// and building-detection stages.
struct SynthSpec {
  std::uint64_t seed = 42;
  std::size_t n_buildings = 10;
  AxisAlignedBounds bounds{Vec3(0, 0, 0), Vec3(200, 200, 0)};  // z of min = ground level
  Range building_size{10.0, 30.0};     // footprint side length, meters
  Range building_height{15.0, 45.0};   // meters above ground
  double min_gap = 4.0;                // clearance between footprints, meters
  std::size_t points_per_building = 3000;
  std::size_t ground_points = 60000;
  double roof_fraction = 0.7;  // of points_per_building; the rest go to walls

  double altitude = 120.0;      // above ground level
  double line_spacing = 25.0;   // between scan lines
  double shot_spacing = 12.5;   // between exposures along a line
  double pitch_deg = 20.0;      // tilt from nadir toward the heading
  bool abrupt_turns = false;
  std::size_t abrupt_leg_shots = 6;  // exposures on each perpendicular detour

  void validate() const;
};

struct SynthCity {
  std::vector<Point3D> points;
  std::vector<Box2D> gt_boxes;
};

SynthCity generate_city(const SynthSpec& spec);

// Serpentine scan lines along X at constant altitude, seq_index in flight
// order, image ids 1..N. With abrupt_turns, every line breaks off at its
// midpoint into a perpendicular detour before resuming.
std::vector<CameraPose> generate_grid_scan(const SynthSpec& spec, IntrinsicsId intrinsics_id = 1);

// Frustum-only visibility (no occlusion): track = ascending ids of images
// whose frustum contains the point.
std::vector<Point3D> synth_tracks(std::vector<Point3D> points, const SceneModel& cameras_only);

Intrinsics default_synth_intrinsics();

// City + scan + tracks assembled into a scene with a single camera model.
struct SynthScene {
  SceneModel scene;
  std::vector<Box2D> gt_boxes;
};

SynthScene generate_scene(const SynthSpec& spec, const Intrinsics& intr = default_synth_intrinsics());

}  // namespace aug3d
