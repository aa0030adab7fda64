// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <omp.h>

#include "aug3d/clustering.hpp"
#include "aug3d/dtu_export.hpp"
#include "aug3d/error.hpp"
#include "aug3d/io.hpp"
#include "aug3d/renderer.hpp"
#include "aug3d/sampling.hpp"
#include "aug3d/synth.hpp"
#include "cli.hpp"
#include "oracle.hpp"
#include "temp_dir.hpp"

using namespace aug3d;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::vector<ImageId>> groups(const ClusterSet& cs) {
  std::vector<std::vector<ImageId>> g;
  for (const Cluster& c : cs.clusters) g.push_back(c.members);
  return g;
}

SynthSpec ranking_spec() {
  SynthSpec s;
  s.seed = 42;
  s.n_buildings = 10;
  s.abrupt_turns = true;
  return s;
}

double mean_quality(const SceneModel& scene, const SimilarityMatrix& sim, ClusterMethod m, std::size_t k) {
  ClusteringConfig cfg;
  cfg.k = k;
  const ClusterSet cs = m == ClusterMethod::Sfm ? sfm_clusters(scene, sim, cfg) : run_clustering(scene, m, cfg);
  return cluster_quality(scene, sim, cs).global_mean;
}

Outcome method_ranking() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const SynthScene s = generate_scene(ranking_spec(), default_synth_intrinsics());
  const SimilarityMatrix sim = shared_point_similarity(s.scene);
  std::map<ClusterMethod, double> q;
  for (ClusterMethod m : {ClusterMethod::Sequence, ClusterMethod::Grid, ClusterMethod::Ray, ClusterMethod::Sfm}) {
    q[m] = mean_quality(s.scene, sim, m, 10);
  }
  const double secs = seconds_since(t0);
  o.detail = fmt::format("cameras {}  sequence {:.1f}  grid {:.1f}  ray {:.1f}  sfm {:.1f}  {:.2f}s",
                         s.scene.cameras.size(), q[ClusterMethod::Sequence], q[ClusterMethod::Grid],
                         q[ClusterMethod::Ray], q[ClusterMethod::Sfm], secs);
  const std::string detail = o.detail;
  o.require(s.scene.cameras.size() >= 100, "fewer than 100 cameras: " + detail);
  for (ClusterMethod m : {ClusterMethod::Sequence, ClusterMethod::Grid, ClusterMethod::Ray}) {
    o.require(q[ClusterMethod::Sfm] > q[m], "sfm is not strictly greatest: " + detail);
  }
  const double best = std::max({q[ClusterMethod::Grid], q[ClusterMethod::Ray], q[ClusterMethod::Sfm]});
  o.require(q[ClusterMethod::Sequence] < best, "sequence is the maximum: " + detail);
  o.require(secs < 30.0, "slower than 30 s: " + detail);
  return o;
}

Outcome cluster_size_effect() {
  Outcome o;
  const SynthScene s = generate_scene(ranking_spec(), default_synth_intrinsics());
  const SimilarityMatrix sim = shared_point_similarity(s.scene);
  const double q10 = mean_quality(s.scene, sim, ClusterMethod::Sfm, 10);
  const double q20 = mean_quality(s.scene, sim, ClusterMethod::Sfm, 20);
  o.detail = fmt::format("sfm k=10 {:.1f}  k=20 {:.1f}", q10, q20);
  o.require(q10 >= q20, "k=10 below k=20: " + o.detail);
  return o;
}

Box2D random_box(std::mt19937_64& g, std::size_t id) {
  std::uniform_real_distribution<double> u(0, 100);
  Box2D b;
  b.min = Vec2(u(g), u(g));
  b.max = b.min + Vec2(1 + u(g) / 10, 1 + u(g) / 10);
  b.member_ids = {id};
  return b;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::size_t checks = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::string at = fmt::format(" (seed {})", seed);
    const std::size_t n_images = 20 + seed % 31;
    const std::size_t n_points = 200 + 15 * seed;
    const SceneModel s = oracle::random_scene(seed, n_images, n_points);

    ClusteringConfig cfg;
    cfg.k = 3 + seed % 5;
    cfg.ground_height = 0.0;
    cfg.angle_threshold_deg = 40.0 + 2.0 * static_cast<double>(seed);
    cfg.seed = seed;
    const SimilarityMatrix sim = shared_point_similarity(s);
    o.require(sim.counts() == oracle::shared_points(s), "similarity differs" + at);
    o.require(groups(sequence_clusters(s, cfg)) == oracle::sequence_groups(s, cfg.k), "sequence differs" + at);
    try {
      o.require(groups(grid_clusters(s, cfg)) == oracle::grid_groups(s, cfg), "grid differs" + at);
    } catch (const Error& e) {
      // Both sides must agree that no cell holds k co-directed cameras.
      bool oracle_empty = false;
      try {
        oracle_empty = oracle::grid_groups(s, cfg).empty();
      } catch (const std::exception&) {
        oracle_empty = true;
      }
      o.require(e.kind() == ErrorKind::EmptyResult && oracle_empty, "grid error disagrees" + at);
    }
    o.require(groups(ray_ground_clusters(s, cfg)) == oracle::ray_groups(s, cfg), "ray differs" + at);
    o.require(groups(sfm_clusters(s, sim, cfg)) == oracle::sfm_groups(s, cfg), "sfm differs" + at);

    const std::vector<Point3D>& pts = s.points;
    for (double p : {5.0, 50.0, 70.0, 97.5}) {
      const auto got = percentile_slice(pts, p);
      const auto want = oracle::percentile_slice(pts, p);
      std::vector<PointId> ids;
      for (const Point3D& q : got.above) ids.push_back(q.point_id);
      o.require(got.threshold == want.threshold && ids == want.above_ids, "slice differs" + at);
    }

    std::mt19937_64 g(seed);
    BinaryMask m;
    m.width = 24 + static_cast<int>(seed);
    m.height = 17 + static_cast<int>(seed % 7);
    m.bits.resize(static_cast<std::size_t>(m.width * m.height));
    for (auto& b : m.bits) b = g() % 100 < 40;
    m.pixel_size = 0.25 * static_cast<double>(1 + seed % 3);
    m.origin = Vec2(-3.0, 7.0);
    const int min_area = 1 + static_cast<int>(seed % 5);
    std::vector<oracle::PixelBox> px;
    for (const Box2D& b : extract_boxes(m, min_area)) {
      px.push_back({static_cast<int>(std::lround((b.min.x() - m.origin.x()) / m.pixel_size)),
                    static_cast<int>(std::lround((b.min.y() - m.origin.y()) / m.pixel_size)),
                    static_cast<int>(std::lround((b.max.x() - m.origin.x()) / m.pixel_size)) - 1,
                    static_cast<int>(std::lround((b.max.y() - m.origin.y()) / m.pixel_size)) - 1});
    }
    o.require(px == oracle::flood_fill_boxes(m, min_area), "extract_boxes differs" + at);

    std::vector<Box2D> boxes;
    for (std::size_t i = 0; i < 3 + seed % 6; ++i) boxes.push_back(random_box(g, i));
    const std::size_t merge_m = 1 + seed % 4;
    std::vector<std::vector<std::size_t>> sets;
    for (const Box2D& b : merge_nearest_boxes(boxes, merge_m)) sets.push_back(b.member_ids);
    o.require(sets == oracle::merge_member_sets(boxes, merge_m), "merge differs" + at);
    ++checks;
  }
  if (o.pass) o.detail = fmt::format("{} seeds, 4 methods + similarity + slice + boxes + merge", checks);
  return o;
}

double normal_angle(const Vec3& a, const Vec3& b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

Outcome plane_fit() {
  Outcome o;
  std::mt19937_64 g(4);
  std::uniform_real_distribution<double> coef(-0.8, 0.8);
  std::uniform_real_distribution<double> off(-50, 50);
  std::uniform_real_distribution<double> xy(-100, 100);
  double worst_angle = 0.0, worst_offset = 0.0;
  for (int t = 0; t < 50; ++t) {
    const double a = coef(g), b = coef(g), c = off(g);
    std::vector<Vec3> xs;
    for (int i = 0; i < 1000; ++i) {
      const double x = xy(g), y = xy(g);
      xs.emplace_back(x, y, a * x + b * y + c);
    }
    std::vector<Point3D> pts(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) pts[i].position = xs[i];
    const Plane got = fit_plane_lsq(pts);
    const Plane want = oracle::normal_equations_plane(xs);
    worst_angle = std::max(worst_angle, normal_angle(got.normal, want.normal));
    worst_offset = std::max(worst_offset, std::abs(got.offset - want.offset));
  }
  o.detail = fmt::format("max angle {:.2e} rad  max offset {:.2e}", worst_angle, worst_offset);
  o.require(worst_angle <= 1e-9 && worst_offset <= 1e-9, "outside 1e-9: " + o.detail);

  std::vector<Point3D> line(100);
  for (std::size_t i = 0; i < line.size(); ++i) line[i].position = Vec3(i, 2.0 * i, 0.5 * i);
  bool degenerate = false;
  try {
    fit_plane_lsq(line);
  } catch (const Error& e) {
    degenerate = e.kind() == ErrorKind::DegenerateFit;
  }
  o.require(degenerate, "collinear input did not raise a degenerate-fit error");
  return o;
}

Outcome building_detection() {
  Outcome o;
  std::size_t gt_total = 0, recovered = 0, worst_spurious = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthSpec spec;
    spec.seed = 1000 + seed;
    spec.n_buildings = 5 + seed;
    spec.ground_points = 2 * spec.n_buildings * spec.points_per_building;
    const SynthCity city = generate_city(spec);
    const BuildingDetection det = detect_buildings(city.points, SamplingConfig{});
    std::vector<bool> matched_det(det.boxes.size(), false);
    for (const Box2D& gt : city.gt_boxes) {
      bool hit = false;
      for (std::size_t i = 0; i < det.boxes.size(); ++i) {
        if (iou(gt, det.boxes[i]) >= 0.5) {
          hit = true;
          matched_det[i] = true;
        }
      }
      recovered += hit;
    }
    gt_total += city.gt_boxes.size();
    const auto spurious = static_cast<std::size_t>(std::count(matched_det.begin(), matched_det.end(), false));
    worst_spurious = std::max(worst_spurious, spurious);
  }
  const double recall = static_cast<double>(recovered) / static_cast<double>(gt_total);
  o.detail = fmt::format("recall {}/{} = {:.3f}  worst spurious per scene {}", recovered, gt_total, recall,
                         worst_spurious);
  o.require(recall >= 0.9 && worst_spurious <= 1, o.detail);
  return o;
}

Outcome dome_geometry() {
  Outcome o;
  std::mt19937_64 g(6);
  std::uniform_real_distribution<double> u(0, 1);
  const double two_pi = 2 * std::numbers::pi;
  std::size_t n_checked = 0;
  double worst_sphere = 0.0, worst_axis = 0.0;
  int trial = 0;
  while (n_checked < 10000) {
    DomeSpec d;
    d.center = Vec3(500 * u(g) - 250, 500 * u(g) - 250, 40 * u(g) - 20);
    d.radius = 1 + 300 * u(g);
    const double a0 = two_pi * u(g) * 0.9;
    d.azimuth = {a0, a0 + (two_pi - a0) * (0.05 + 0.95 * u(g))};
    const double e0 = deg_to_rad(5 + 60 * u(g));
    d.elevation = {e0, e0 + (deg_to_rad(89.5) - e0) * u(g)};
    d.tag = fmt::format("dome{}", trial);
    const DomeMode mode = trial % 2 ? DomeMode::Spiral : DomeMode::Random;
    const std::size_t n = 2 + g() % 99;
    const auto poses = dome_poses(d, n, mode, static_cast<std::uint64_t>(trial), 1);
    for (const SampledPose& sp : poses) {
      const Vec3 rel = camera_center(sp.pose) - d.center;
      const double sphere = std::abs(rel.norm() - d.radius) / d.radius;
      const double axis = normal_angle(optical_axis_ray(sp.pose).direction, -rel);
      worst_sphere = std::max(worst_sphere, sphere);
      worst_axis = std::max(worst_axis, axis);
      const double el = std::asin(std::clamp(rel.z() / rel.norm(), -1.0, 1.0));
      double az = std::atan2(rel.y(), rel.x());
      if (az < d.azimuth.min - 1e-9) az += two_pi;
      o.require(sphere <= 1e-6, fmt::format("off sphere in {}", d.tag));
      o.require(axis <= 1e-6, fmt::format("axis misses center in {}", d.tag));
      o.require(el >= d.elevation.min - 1e-9 && el <= d.elevation.max + 1e-9,
                fmt::format("elevation out of range in {}", d.tag));
      o.require(az >= d.azimuth.min - 1e-9 && az <= d.azimuth.max + 1e-9,
                fmt::format("azimuth out of range in {}", d.tag));
    }
    if (mode == DomeMode::Spiral) {
      const auto elev = [&](const SampledPose& sp) {
        const Vec3 rel = camera_center(sp.pose) - d.center;
        return std::asin(rel.z() / rel.norm());
      };
      o.require(std::abs(elev(poses.front()) - d.elevation.max) <= 1e-9 &&
                    std::abs(elev(poses.back()) - d.elevation.min) <= 1e-9,
                fmt::format("spiral endpoints missed in {}", d.tag));
    }
    n_checked += poses.size();
    ++trial;
  }
  if (o.pass) {
    o.detail = fmt::format("{} poses on {} domes  max radial {:.1e}  max axis {:.1e} rad", n_checked, trial,
                           worst_sphere, worst_axis);
  }
  return o;
}

Point3D colored(PointId id, Vec3 x, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Point3D p;
  p.point_id = id;
  p.position = x;
  p.color = Rgb{r, g, b};
  return p;
}

// Re-emits a parsed binary PNM so it can be compared byte for byte.
std::string reencode(const Pnm& p) {
  std::string s = fmt::format("{}\n{} {}\n255\n", p.channels == 3 ? "P6" : "P5", p.width, p.height);
  s.append(p.data.begin(), p.data.end());
  return s;
}

Outcome renderer() {
  Outcome o;
  const Intrinsics intr{60.0, 60.0, 40.0, 30.0, 80, 60};
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(-5, 5);
  std::vector<Point3D> cloud;
  for (PointId i = 0; i < 5000; ++i) {
    cloud.push_back(colored(i, Vec3(u(g), u(g), std::round(u(g)) + 8), g() % 256, g() % 256, g() % 256));
  }
  CameraPose pose;
  pose.rotation = Quat(Eigen::AngleAxisd(0.2, Vec3(1, -1, 2).normalized()));
  const ImageBuffer ref = splat_render_serial(cloud, pose, intr, 1);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(cloud.begin(), cloud.end(), g);
    o.require(splat_render(cloud, pose, intr, 1) == ref, "omp render depends on input order");
    o.require(splat_render_serial(cloud, pose, intr, 1) == ref, "serial render depends on input order");
  }

  // Z-test: nearer wins regardless of order; equal depth goes to the lower id.
  const CameraPose identity;
  const Intrinsics small{50.0, 50.0, 32.0, 24.0, 64, 48};
  const std::vector<Point3D> near_far{colored(0, Vec3(0, 0, 9), 0, 0, 255), colored(1, Vec3(0, 0, 3), 255, 0, 0)};
  const ImageBuffer nf = splat_render(near_far, identity, small, 0);
  const std::size_t c = nf.index(32, 24);
  o.require(nf.depth[c] == 3.0 && nf.rgb[3 * c] == 255 && nf.rgb[3 * c + 2] == 0, "nearer point lost the z-test");
  const std::vector<Point3D> tie{colored(7, Vec3(0, 0, 4), 0, 255, 0), colored(2, Vec3(0, 0, 4), 0, 0, 255)};
  const ImageBuffer tb = splat_render(tie, identity, small, 0);
  o.require(tb.rgb[3 * c + 2] == 255 && tb.rgb[3 * c + 1] == 0, "equal depth did not go to the lower id");
  const std::vector<Point3D> behind{colored(0, Vec3(0, 0, -2), 9, 9, 9), colored(1, Vec3(0, 0, 0.005), 9, 9, 9)};
  const ImageBuffer bh = splat_render(behind, identity, small, 2);
  o.require(std::none_of(bh.depth.begin(), bh.depth.end(), [](double z) { return std::isfinite(z); }),
            "point behind the camera or before the near plane was drawn");

  const std::string ppm = encode_image(ref, ImageKind::Rgb);
  const std::string pgm = encode_image(ref, ImageKind::Depth);
  const Pnm p = parse_pnm(ppm);
  o.require(p.width == ref.width && p.height == ref.height && p.channels == 3 && p.data == ref.rgb,
            "PPM parse does not recover the buffer");
  o.require(reencode(p) == ppm, "PPM round-trip is not bit-exact");
  o.require(reencode(parse_pnm(pgm)) == pgm, "PGM round-trip is not bit-exact");
  if (o.pass) o.detail = "10 shuffles x 2 paths, 3 z-test cases, PPM + PGM";
  return o;
}

Outcome dtu_round_trip() {
  Outcome o;
  TempDir dir("accept_dtu");
  std::mt19937_64 g(8);
  std::normal_distribution<double> n01;
  SceneModel scene;
  scene.intrinsics.emplace(1, Intrinsics{612.5, 598.25, 321.5, 239.75, 640, 480});
  scene.intrinsics.emplace(2, Intrinsics{1200.0, 1210.0, 960.0, 540.0, 1920, 1080});
  std::vector<std::vector<ImageId>> grp;
  for (ImageId i = 1; i <= 100; ++i) {
    CameraPose p;
    p.image_id = i;
    p.rotation = Quat(n01(g), n01(g), n01(g), n01(g)).normalized();
    p.translation = Vec3(n01(g), n01(g), n01(g)) * 250;
    p.intrinsics_id = 1 + i % 2;
    p.name = fmt::format("v{}.ppm", i);
    p.seq_index = i - 1;
    scene.cameras.emplace(i, p);
    if ((i - 1) % 5 == 0) grp.emplace_back();
    grp.back().push_back(i);
  }
  ExportOptions opts;
  opts.bounds = AxisAlignedBounds{Vec3(-100, -100, -10), Vec3(100, 100, 60)};
  const Manifest plan = plan_manifest("sfm_shared", 5, grp, "real", false);
  const Manifest written = export_dtu(scene, plan, opts, dir.path());
  double worst = 0.0;
  for (const ManifestScan& s : written.scans) {
    for (const ManifestView& v : s.views) {
      const CameraPose& p = scene.camera(v.image_id);
      const CamFile c = parse_cam_txt(read_file(dir / v.cam));
      worst = std::max(worst, (c.extrinsic.topLeftCorner<3, 3>() - p.rotation_matrix()).cwiseAbs().maxCoeff());
      worst = std::max(worst, (c.extrinsic.topRightCorner<3, 1>() - p.translation).cwiseAbs().maxCoeff());
      worst = std::max(worst, (c.intrinsic - scene.intrinsics_for(p).matrix()).cwiseAbs().maxCoeff());
    }
  }
  o.detail = fmt::format("100 poses  max elementwise error {:.2e}", worst);
  o.require(worst <= 1e-6, "outside 1e-6: " + o.detail);

  const Manifest reread = parse_manifest(read_file(dir / "clusters.json"));
  o.require(reread == written && reread.k == 5 && reread.scans.size() == 20, "manifest did not validate");
  bool rejected = false;
  try {
    parse_manifest(R"({"version": 1, "method": "sfm_shared", "k": 2, "scans": [{"id": 0, "views": []}]})");
  } catch (const Error& e) {
    rejected = e.kind() == ErrorKind::Format;
  }
  o.require(rejected, "schema violation accepted");
  return o;
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> tree;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) tree[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  }
  return tree;
}

// Full pipeline through the command-line front end; returns "" on success.
std::string run_pipeline(const fs::path& r) {
  const auto p = [&](const std::string& rel) { return (r / rel).string(); };
  const std::vector<std::vector<std::string>> steps{
      {"synth", "--out", p("scene"), "--seed", "42", "--buildings", "10", "--points-per-building", "3000",
       "--ground-points", "70000", "--extent-x", "240", "--extent-y", "190", "--line-spacing", "10",
       "--shot-spacing", "10", "--altitude", "50", "--max-height", "30"},
      {"cluster", "--sparse", p("scene/sparse"), "--method", "sfm", "--k", "10", "--out", p("real_clusters")},
      {"augment", "--cloud", p("scene/scene.ply"), "--mode", "semantic", "--merge-m", "1", "--poses-per-dome", "10",
       "--k", "10", "--intrinsics-from", p("scene/sparse"), "--seed", "42", "--out", p("aug")},
      {"render", "--sparse", p("aug/sparse"), "--cloud", p("scene/scene.ply"), "--out", p("renders")},
      {"export-dtu", "--sparse", p("scene/sparse"), "--manifest", p("real_clusters/clusters.json"), "--out",
       p("dtu_real")},
      {"export-dtu", "--sparse", p("aug/sparse"), "--manifest", p("aug/clusters.json"), "--images", p("renders"),
       "--cloud", p("scene/scene.ply"), "--out", p("dtu_syn")},
      {"combine", "--real", p("dtu_real"), "--synthetic", p("dtu_syn"), "--out", p("combined")},
  };
  for (const auto& args : steps) {
    std::ostringstream out, err;
    if (cli::run(args, out, err) != 0) return args.front() + " failed: " + err.str();
  }
  return "";
}

Outcome end_to_end() {
  Outcome o;
  TempDir a("accept_e2e_a");
  TempDir b("accept_e2e_b");
  auto t0 = std::chrono::steady_clock::now();
  const std::string err_a = run_pipeline(a.path());
  const double secs_a = seconds_since(t0);
  o.require(err_a.empty(), err_a);
  if (!o.pass) return o;

  const SceneModel scene = read_sparse_dir(a / "scene/sparse");
  o.require(scene.points.size() == 100000, fmt::format("scene has {} points", scene.points.size()));
  o.require(scene.cameras.size() == 500, fmt::format("scene has {} cameras", scene.cameras.size()));

  t0 = std::chrono::steady_clock::now();
  const std::string err_b = run_pipeline(b.path());
  const double secs_b = seconds_since(t0);
  o.require(err_b.empty(), err_b);
  if (!o.pass) return o;

  const auto ta = snapshot(a.path());
  const auto tb = snapshot(b.path());
  std::size_t bytes = 0;
  for (const auto& [k, v] : ta) bytes += v.size();
  const Manifest combined = parse_manifest(read_file(a / "combined/clusters.json"));
  o.detail = fmt::format("{} points  {} cameras  {} files  {:.1f} MB  {} combined scans  runs {:.1f}s / {:.1f}s",
                         scene.points.size(), scene.cameras.size(), ta.size(), static_cast<double>(bytes) / 1e6,
                         combined.scans.size(), secs_a, secs_b);
  const std::string detail = o.detail;
  o.require(ta == tb, "output trees differ: " + detail);
  o.require(std::max(secs_a, secs_b) < 120.0, "slower than 120 s: " + detail);
  return o;
}

}  // namespace

int main() {
  omp_set_num_threads(1);
  set_warning_sink([](std::string_view) {});
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"method ranking (sfm best, sequence not best, k=10)", method_ranking},
      {"cluster size effect (sfm k=10 >= k=20)", cluster_size_effect},
      {"oracle equivalence (20 random scenes)", oracle_equivalence},
      {"plane fit vs normal equations", plane_fit},
      {"building detection (10 cities)", building_detection},
      {"dome geometry (10k poses)", dome_geometry},
      {"renderer determinism, z-test, PNM round-trip", renderer},
      {"DTU camera round-trip and manifest schema", dtu_round_trip},
      {"end-to-end determinism and scale", end_to_end},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::cout << fmt::format("[{}] {} {}: {}", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail)
              << std::endl;
  }
  std::cout << fmt::format("{}/{} criteria passed", criteria.size() - failures, criteria.size()) << std::endl;
  return failures == 0 ? 0 : 1;
}
