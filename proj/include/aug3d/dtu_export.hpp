#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aug3d/clustering.hpp"
#include "aug3d/scene_model.hpp"

namespace aug3d {

// Depth hypotheses spanned by depth_interval across the scene diameter.
inline constexpr int kDepthHypotheses = 192;

// One DTU camera file:
//   extrinsic / 4x4 world-to-camera / blank / intrinsic / 3x3 K / blank /
//   "depth_min depth_interval"
struct CamFile {
  Mat4 extrinsic = Mat4::Identity();
  Mat3 intrinsic = Mat3::Identity();
  double depth_min = 0.0;
  double depth_interval = 0.0;
};

CamFile make_cam_file(const CameraPose& pose, const Intrinsics& intr, const AxisAlignedBounds& bounds);
std::string format_cam_txt(const CamFile& cam);
CamFile parse_cam_txt(std::string_view bytes);

struct ManifestView {
  ImageId image_id = 0;
  std::string source = "real";
  std::string cam;
  std::optional<std::string> image;

  friend bool operator==(const ManifestView&, const ManifestView&) = default;
};

struct ManifestScan {
  std::size_t id = 0;
  std::vector<ManifestView> views;

  friend bool operator==(const ManifestScan&, const ManifestScan&) = default;
};

// clusters.json. Paths are relative to the export root.
struct Manifest {
  int version = 1;
  std::string method;
  std::size_t k = 0;
  std::vector<ManifestScan> scans;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

std::string manifest_to_json(const Manifest& m);
// Validates the schema: field names, types, k == every scan's view count,
// scan ids consecutive from 0.
Manifest parse_manifest(std::string_view json);

// "sequence", "grid", "ray_ground", "sfm_shared"
std::string manifest_method_label(ClusterMethod m);

std::string cam_path(std::size_t scan, std::size_t view);
std::string image_path(std::size_t scan, std::size_t view);

// Lays out the scan tree for fixed-size groups of image ids.
Manifest plan_manifest(std::string method, std::size_t k, const std::vector<std::vector<ImageId>>& groups,
                       std::string_view source, bool with_images);
Manifest plan_manifest(const ClusterSet& cs, std::string_view source = "real", bool with_images = false);

// Groups of image ids in scan order, for re-clustering or evaluation.
ClusterSet clusters_from_manifest(const Manifest& m);

struct ExportOptions {
  // Renders named <images_dir>/<stem of pose name>.ppm, copied per view.
  std::optional<std::filesystem::path> images_dir;
  // Depth range source; defaults to the scene's points (or camera centers
  // when the scene has none).
  std::optional<AxisAlignedBounds> bounds;
};

// Writes scan_<i>/cams/<j>_cam.txt (+ images) and clusters.json under
// out_dir. Every reference is checked before anything is written.
Manifest export_dtu(const SceneModel& scene, const Manifest& plan, const ExportOptions& opts,
                    const std::filesystem::path& out_dir);
Manifest export_dtu(const SceneModel& scene, const ClusterSet& cs, const ExportOptions& opts,
                    const std::filesystem::path& out_dir);

// Real scans first, then synthetic, scan ids renumbered from 0. Both inputs
// must share the same k.
Manifest combine_manifests(const Manifest& real, const Manifest& synthetic);

// Copies both exported trees into out_dir under the combined numbering.
Manifest combine_exports(const std::filesystem::path& real_root, const std::filesystem::path& synthetic_root,
                         const std::filesystem::path& out_dir);

}  // namespace aug3d
