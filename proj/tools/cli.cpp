#include "cli.hpp"

#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "aug3d/clustering.hpp"
#include "aug3d/dtu_export.hpp"
#include "aug3d/error.hpp"
#include "aug3d/io.hpp"
#include "aug3d/renderer.hpp"
#include "aug3d/rng.hpp"
#include "aug3d/sampling.hpp"
#include "aug3d/serialize.hpp"
#include "aug3d/synth.hpp"

namespace aug3d::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// One registered flag: how to echo its effective value, and whether it names
// a path (echoed relative to the output directory, resolved relative to the
// config file).
struct Binding {
  std::string name;
  CLI::Option* option = nullptr;
  bool is_path = false;
  bool optional = false;  // echo null when not given
  std::function<ordered_json()> value;
};

class Command {
 public:
  Command(CLI::App& parent, const std::string& name, const std::string& description)
      : app_(parent.add_subcommand(name, description)) {
    app_->add_option("--config", config_path_, "JSON file of flag values; command-line flags win")
        ->check(CLI::ExistingFile);
  }

  CLI::App* app() const { return app_; }
  const std::string& name() const { return app_->get_name(); }
  const std::vector<Binding>& bindings() const { return bindings_; }
  const std::string& config_path() const { return config_path_; }

  template <class T>
  CLI::Option* value(const std::string& name, T& var, const std::string& desc) {
    CLI::Option* o = app_->add_option("--" + name, var, desc)->capture_default_str();
    bindings_.push_back({name, o, false, false, [&var] { return ordered_json(var); }});
    return o;
  }

  // Value that may be absent; the caller inspects given(name).
  template <class T>
  CLI::Option* maybe(const std::string& name, T& var, const std::string& desc) {
    CLI::Option* o = app_->add_option("--" + name, var, desc);
    bindings_.push_back({name, o, false, true, [&var] { return ordered_json(var); }});
    return o;
  }

  CLI::Option* path(const std::string& name, std::string& var, const std::string& desc, bool required) {
    CLI::Option* o = app_->add_option("--" + name, var, desc);
    if (required) o->required();
    bindings_.push_back({name, o, true, !required, [&var] { return ordered_json(var); }});
    return o;
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& desc) {
    CLI::Option* o = app_->add_flag("--" + name, var, desc);
    bindings_.push_back({name, o, false, false, [&var] { return ordered_json(var); }});
    return o;
  }

  bool given(const std::string& name) const {
    for (const Binding& b : bindings_) {
      if (b.name == name) return b.option->count() > 0;
    }
    return false;
  }

  const Binding* find(const std::string& name) const {
    for (const Binding& b : bindings_) {
      if (b.name == name) return &b;
    }
    return nullptr;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::vector<Binding> bindings_;
};

fs::path relative_to(const fs::path& p, const fs::path& base) {
  const fs::path a = fs::absolute(p).lexically_normal();
  const fs::path b = fs::absolute(base).lexically_normal();
  return a.lexically_relative(b);
}

// Effective configuration, paths relative to `out_dir`, key order as registered.
std::string echo_config(const Command& cmd, const fs::path& out_dir) {
  ordered_json j;
  j["command"] = cmd.name();
  for (const Binding& b : cmd.bindings()) {
    if (b.name == "out") continue;
    if (b.optional && b.option->count() == 0) {
      j[b.name] = nullptr;
    } else if (b.is_path) {
      j[b.name] = relative_to(b.value().get<std::string>(), out_dir).generic_string();
    } else {
      j[b.name] = b.value();
    }
  }
  j["rng"] = kRngAlgorithm;
  return j.dump(2) + "\n";
}

bool on_command_line(const std::vector<std::string>& args, const std::string& name) {
  const std::string flag = "--" + name;
  for (const std::string& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

std::optional<std::string> config_arg(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

// Appends file values for flags absent from the command line. Throws
// CLI::ValidationError for malformed files or a mismatched command.
std::vector<std::string> merge_config(const Command& cmd, std::vector<std::string> args) {
  const auto path = config_arg(args);
  if (!path) return args;
  ordered_json j;
  try {
    j = ordered_json::parse(read_file(*path));
  } catch (const nlohmann::json::exception& e) {
    throw CLI::ValidationError("--config", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw CLI::ValidationError("--config", "config file must hold a JSON object");
  const fs::path base = fs::path(*path).parent_path();
  for (const auto& [key, v] : j.items()) {
    if (key == "command") {
      if (v != cmd.name()) throw CLI::ValidationError("--config", "config was written for '" + v.dump() + "'");
      continue;
    }
    if (key == "rng" || key == "config" || v.is_null() || on_command_line(args, key)) continue;
    const Binding* b = cmd.find(key);
    if (b && b->option->get_expected_max() == 0) {
      if (v == true) args.push_back("--" + key);
      continue;
    }
    args.push_back("--" + key);
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      args.push_back(b && b->is_path && fs::path(s).is_relative() ? (base / s).lexically_normal().string() : s);
    } else {
      args.push_back(v.dump());
    }
  }
  return args;
}

SceneModel load_sparse(const std::string& dir) { return read_sparse_dir(dir); }

std::vector<Point3D> load_cloud(const std::string& path) { return parse_ply(read_file(path)); }

// ---- subcommands ------------------------------------------------------------

struct SynthArgs {
  SynthSpec spec;
  double extent_x = 200.0;
  double extent_y = 200.0;
  Intrinsics intr = default_synth_intrinsics();
  double focal = intr.fx;
  std::uint64_t seed = 42;
  std::string out;
};

void add_synth(Command& c, SynthArgs& a) {
  c.value("seed", a.seed, "random seed");
  c.path("out", a.out, "output directory", true);
  c.value("buildings", a.spec.n_buildings, "number of buildings");
  c.value("ground-points", a.spec.ground_points, "ground point count");
  c.value("points-per-building", a.spec.points_per_building, "points sampled per building");
  c.value("roof-fraction", a.spec.roof_fraction, "share of building points on roofs");
  c.value("extent-x", a.extent_x, "scene size along X, meters");
  c.value("extent-y", a.extent_y, "scene size along Y, meters");
  c.value("min-size", a.spec.building_size.min, "smallest footprint side, meters");
  c.value("max-size", a.spec.building_size.max, "largest footprint side, meters");
  c.value("min-height", a.spec.building_height.min, "lowest building, meters");
  c.value("max-height", a.spec.building_height.max, "tallest building, meters");
  c.value("min-gap", a.spec.min_gap, "clearance between footprints, meters");
  c.value("altitude", a.spec.altitude, "scan altitude above ground, meters");
  c.value("line-spacing", a.spec.line_spacing, "distance between scan lines, meters");
  c.value("shot-spacing", a.spec.shot_spacing, "distance between exposures, meters");
  c.value("pitch", a.spec.pitch_deg, "tilt from nadir toward the heading, degrees");
  c.flag("abrupt-turns", a.spec.abrupt_turns, "insert perpendicular mid-line detours");
  c.value("image-width", a.intr.width, "image width, pixels");
  c.value("image-height", a.intr.height, "image height, pixels");
  c.value("focal", a.focal, "focal length, pixels");
}

void run_synth(const Command& c, SynthArgs& a) {
  a.spec.seed = a.seed;
  a.spec.bounds = {Vec3(0, 0, 0), Vec3(a.extent_x, a.extent_y, 0)};
  a.intr.fx = a.intr.fy = a.focal;
  a.intr.cx = a.intr.width / 2.0;
  a.intr.cy = a.intr.height / 2.0;
  const SynthScene s = generate_scene(a.spec, a.intr);

  const fs::path out = a.out;
  write_sparse_dir(out / "sparse", s.scene);
  write_file(out / "scene.ply", write_ply(s.scene.points));
  write_file(out / "gt_boxes.json", boxes_to_json(s.gt_boxes));
  write_file(out / "config.json", echo_config(c, out));
}

struct ClusterArgs {
  std::string sparse;
  std::string method;
  ClusteringConfig cfg;
  std::size_t num_clusters = 0;
  double ground_height = 0.0;
  double grid_cell = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

void add_cluster(Command& c, ClusterArgs& a) {
  c.value("seed", a.seed, "random seed");
  c.path("out", a.out, "output directory", true);
  c.path("sparse", a.sparse, "SfM text model directory", true)->check(CLI::ExistingDirectory);
  c.value("method", a.method, "sequence | grid | ray | sfm")
      ->required()
      ->check(CLI::IsMember({"sequence", "grid", "ray", "sfm"}));
  c.value("k", a.cfg.k, "images per cluster")->required();
  c.maybe("num-clusters", a.num_clusters, "cluster count (default images / k)");
  c.value("angle", a.cfg.angle_threshold_deg, "grid method angular threshold, degrees");
  c.maybe("ground-height", a.ground_height, "ray method ground height (default estimated)");
  c.maybe("grid-cell", a.grid_cell, "grid method cell size (default extent / 10)");
}

void run_cluster(const Command& c, ClusterArgs& a) {
  a.cfg.seed = a.seed;
  if (c.given("num-clusters")) a.cfg.num_clusters = a.num_clusters;
  if (c.given("ground-height")) a.cfg.ground_height = a.ground_height;
  if (c.given("grid-cell")) a.cfg.grid_cell_size = a.grid_cell;
  a.cfg.validate();
  const SceneModel scene = load_sparse(a.sparse);
  const SimilarityMatrix sim = shared_point_similarity(scene);
  const ClusterMethod m = parse_cluster_method(a.method);
  const ClusterSet cs = m == ClusterMethod::Sfm ? sfm_clusters(scene, sim, a.cfg) : run_clustering(scene, m, a.cfg);
  const QualityReport q = cluster_quality(scene, sim, cs);

  const fs::path out = a.out;
  write_file(out / "clusters.json", manifest_to_json(plan_manifest(cs)));
  write_file(out / "quality.json", quality_to_json(q));
  write_file(out / "config.json", echo_config(c, out));
}

struct EvalArgs {
  std::string sparse;
  std::string manifest;
  std::string out;
};

void add_eval(Command& c, EvalArgs& a) {
  c.path("sparse", a.sparse, "SfM text model directory", true)->check(CLI::ExistingDirectory);
  c.path("manifest", a.manifest, "clusters.json to evaluate", true)->check(CLI::ExistingFile);
  c.path("out", a.out, "directory for quality.json (optional)", false);
}

void run_eval(const Command& c, EvalArgs& a, std::ostream& stdout_) {
  const SceneModel scene = load_sparse(a.sparse);
  const ClusterSet cs = clusters_from_manifest(parse_manifest(read_file(a.manifest)));
  const QualityReport q = cluster_quality(scene, shared_point_similarity(scene), cs);
  stdout_ << fmt::format("clusters {}  mean {:.3f}  min {:.3f}  zero-pairs {:.4f}  flagged {}\n",
                         q.per_cluster_mean.size(), q.global_mean, q.global_min, q.zero_pair_fraction,
                         q.flagged_clusters.size());
  if (!a.out.empty()) {
    write_file(fs::path(a.out) / "quality.json", quality_to_json(q));
    write_file(fs::path(a.out) / "config.json", echo_config(c, a.out));
  }
}

struct AugmentArgs {
  std::string cloud;
  std::string intrinsics_from;
  std::string mode;
  std::string dome_mode = "random";
  SamplingConfig cfg;
  std::size_t k = 0;
  double el_min = 30, el_max = 80, az_min = 0, az_max = 360;
  Intrinsics intr = default_synth_intrinsics();
  double focal = intr.fx;
  std::uint32_t first_image_id = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void add_augment(Command& c, AugmentArgs& a) {
  c.value("seed", a.seed, "random seed");
  c.path("out", a.out, "output directory", true);
  c.path("cloud", a.cloud, "ASCII PLY point cloud", true)->check(CLI::ExistingFile);
  c.value("mode", a.mode, "grid | semantic")->required()->check(CLI::IsMember({"grid", "semantic"}));
  c.value("dome-mode", a.dome_mode, "random | spiral")->check(CLI::IsMember({"random", "spiral"}));
  c.value("poses-per-dome", a.cfg.poses_per_dome, "poses sampled on each dome");
  c.maybe("k", a.k, "views per synthetic scan (default poses-per-dome)");
  c.value("percentile", a.cfg.slice_percentile, "height percentile of the rooftop slice");
  c.value("merge-m", a.cfg.merge_m, "merge each box with up to M nearest boxes");
  c.value("mask-resolution", a.cfg.mask_resolution, "occupancy mask long side, pixels");
  c.value("min-area", a.cfg.min_component_area, "smallest kept component, pixels");
  c.value("closing", a.cfg.closing_iterations, "morphological closing iterations");
  c.value("beta", a.cfg.dome_radius_factor_grid, "grid dome radius per cell size");
  c.value("gamma", a.cfg.dome_radius_factor_box, "box dome radius per box diagonal");
  c.value("alpha", a.cfg.scale_stop_factor, "grid scale stop factor");
  c.value("el-min", a.el_min, "lowest elevation, degrees");
  c.value("el-max", a.el_max, "highest elevation, degrees");
  c.value("az-min", a.az_min, "azimuth start, degrees");
  c.value("az-max", a.az_max, "azimuth end, degrees");
  c.path("intrinsics-from", a.intrinsics_from, "take the camera model from this SfM directory", false)
      ->check(CLI::ExistingDirectory);
  c.value("image-width", a.intr.width, "image width, pixels");
  c.value("image-height", a.intr.height, "image height, pixels");
  c.value("focal", a.focal, "focal length, pixels");
  c.value("first-image-id", a.first_image_id, "id of the first sampled pose");
}

void run_augment(const Command& c, AugmentArgs& a) {
  SamplingConfig& cfg = a.cfg;
  cfg.seed = a.seed;
  cfg.elevation = {deg_to_rad(a.el_min), deg_to_rad(a.el_max)};
  cfg.azimuth = {deg_to_rad(a.az_min), deg_to_rad(a.az_max)};
  cfg.validate();
  const std::size_t k = c.given("k") ? a.k : cfg.poses_per_dome;
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "synthetic scans need k >= 2");
  if (cfg.poses_per_dome < k) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("poses-per-dome ({}) is smaller than the scan size k ({})", cfg.poses_per_dome, k));
  }
  Intrinsics intr = a.intr;
  intr.fx = intr.fy = a.focal;
  intr.cx = intr.width / 2.0;
  intr.cy = intr.height / 2.0;
  if (!a.intrinsics_from.empty()) {
    const SceneModel ref = load_sparse(a.intrinsics_from);
    if (ref.intrinsics.empty()) throw Error(ErrorKind::EmptyModel, "no camera model in " + a.intrinsics_from);
    intr = ref.intrinsics.begin()->second;
  }
  intr.validate();

  const std::vector<Point3D> points = load_cloud(a.cloud);
  const Plane ground = fit_ground_plane(points);
  const DomeMode mode = parse_dome_mode(a.dome_mode);

  std::vector<DomeSpec> domes;
  std::optional<BuildingDetection> det;
  std::vector<Box2D> boxes;
  if (a.mode == "grid") {
    domes = grid_domes(scene_bounds(points), ground, cfg);
  } else {
    det = detect_buildings(points, cfg);
    if (det->boxes.empty()) throw Error(ErrorKind::EmptyResult, "no building footprints found");
    boxes = merge_nearest_boxes(det->boxes, cfg.merge_m);
    domes = semantic_domes(boxes, ground, cfg);
  }
  if (domes.empty()) throw Error(ErrorKind::EmptyResult, "no domes to sample");

  SceneModel poses;
  poses.intrinsics.emplace(1, intr);
  std::vector<std::vector<ImageId>> groups;
  ImageId next = a.first_image_id;
  std::size_t seq = 0;
  for (const DomeSpec& d : domes) {
    const auto sampled = dome_poses(d, cfg.poses_per_dome, mode, cfg.seed, 1, next);
    next += static_cast<ImageId>(sampled.size());
    for (std::size_t g = 0; g + k <= sampled.size(); g += k) {
      std::vector<ImageId> grp;
      for (std::size_t i = g; i < g + k; ++i) grp.push_back(sampled[i].pose.image_id);
      groups.push_back(std::move(grp));
    }
    for (const SampledPose& sp : sampled) {
      CameraPose p = sp.pose;
      p.seq_index = seq++;
      poses.cameras.emplace(p.image_id, std::move(p));
    }
  }
  const Manifest plan = plan_manifest(a.mode == "grid" ? "grid_dome" : "semantic_dome", k, groups, "synthetic", false);

  const fs::path out = a.out;
  write_sparse_dir(out / "sparse", poses);
  write_file(out / "clusters.json", manifest_to_json(plan));
  write_file(out / "domes.json", domes_to_json(domes, mode, cfg.seed));
  if (det) {
    write_file(out / "boxes.json", boxes_to_json(boxes));
    write_file(out / "mask.pgm", encode_mask_pgm(det->mask));
  }
  write_file(out / "config.json", echo_config(c, out));
}

struct RenderArgs {
  std::string sparse;
  std::string cloud;
  int radius = 1;
  bool depth = true;
  std::string out;
};

void add_render(Command& c, RenderArgs& a) {
  c.path("out", a.out, "output directory", true);
  c.path("sparse", a.sparse, "SfM text model holding the poses to render", true)->check(CLI::ExistingDirectory);
  c.path("cloud", a.cloud, "ASCII PLY point cloud", true)->check(CLI::ExistingFile);
  c.value("radius", a.radius, "splat radius, pixels")->check(CLI::NonNegativeNumber);
  c.value("depth", a.depth, "also write <stem>_depth.pgm");
}

void run_render(const Command& c, RenderArgs& a) {
  const SceneModel poses = load_sparse(a.sparse);
  const std::vector<Point3D> points = load_cloud(a.cloud);
  const fs::path out = a.out;
  for (const auto& [id, pose] : poses.cameras) {
    const ImageBuffer img = splat_render(points, pose, poses.intrinsics_for(pose), a.radius);
    const std::string stem = fs::path(pose.name).stem().string();
    write_image(img, ImageKind::Rgb, out / (stem + ".ppm"));
    if (a.depth) write_image(img, ImageKind::Depth, out / (stem + "_depth.pgm"));
  }
  write_file(out / "config.json", echo_config(c, out));
}

struct ExportArgs {
  std::string sparse;
  std::string manifest;
  std::string images;
  std::string cloud;
  std::string out;
};

void add_export(Command& c, ExportArgs& a) {
  c.path("out", a.out, "export root", true);
  c.path("sparse", a.sparse, "SfM text model directory", true)->check(CLI::ExistingDirectory);
  c.path("manifest", a.manifest, "clusters.json listing the scans", true)->check(CLI::ExistingFile);
  c.path("images", a.images, "directory of <stem>.ppm renders to copy", false)->check(CLI::ExistingDirectory);
  c.path("cloud", a.cloud, "point cloud for the depth range (default: SfM points)", false)
      ->check(CLI::ExistingFile);
}

void run_export(const Command& c, ExportArgs& a) {
  const SceneModel scene = load_sparse(a.sparse);
  const Manifest plan = parse_manifest(read_file(a.manifest));
  ExportOptions opts;
  if (!a.images.empty()) opts.images_dir = fs::path(a.images);
  if (!a.cloud.empty()) opts.bounds = scene_bounds(load_cloud(a.cloud));
  export_dtu(scene, plan, opts, a.out);
  write_file(fs::path(a.out) / "config.json", echo_config(c, a.out));
}

struct CombineArgs {
  std::string real;
  std::string synthetic;
  std::string out;
};

void add_combine(Command& c, CombineArgs& a) {
  c.path("out", a.out, "combined export root", true);
  c.path("real", a.real, "export root of the real-image scans", true)->check(CLI::ExistingDirectory);
  c.path("synthetic", a.synthetic, "export root of the synthetic scans", true)->check(CLI::ExistingDirectory);
}

void run_combine(const Command& c, CombineArgs& a) {
  combine_exports(a.real, a.synthetic, a.out);
  write_file(fs::path(a.out) / "config.json", echo_config(c, a.out));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scene clustering and view augmentation for generalizable novel view synthesis datasets", "aug3d"};
  app.require_subcommand(1);
  app.fallthrough(false);

  Command synth(app, "synth", "generate a synthetic city, drone survey and tracks");
  Command cluster(app, "cluster", "group images into fixed-size clusters");
  Command augment(app, "augment", "sample synthetic camera poses on domes");
  Command render(app, "render", "splat-render poses against a point cloud");
  Command exporter(app, "export-dtu", "write a DTU-style scan tree");
  Command eval(app, "eval", "report intra-cluster shared points for a manifest");
  Command combine(app, "combine", "merge real and synthetic exports");

  SynthArgs synth_args;
  ClusterArgs cluster_args;
  AugmentArgs augment_args;
  RenderArgs render_args;
  ExportArgs export_args;
  EvalArgs eval_args;
  CombineArgs combine_args;
  add_synth(synth, synth_args);
  add_cluster(cluster, cluster_args);
  add_augment(augment, augment_args);
  add_render(render, render_args);
  add_export(exporter, export_args);
  add_eval(eval, eval_args);
  add_combine(combine, combine_args);

  const std::vector<Command*> commands{&synth, &cluster, &augment, &render, &exporter, &eval, &combine};

  try {
    std::vector<std::string> argv = args;
    if (!argv.empty()) {
      for (Command* c : commands) {
        if (c->name() == argv.front()) argv = merge_config(*c, argv);
      }
    }
    // CLI11 consumes arguments from the back.
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    if (app.get_subcommands().empty()) err << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }

  try {
    if (synth.app()->parsed()) run_synth(synth, synth_args);
    if (cluster.app()->parsed()) run_cluster(cluster, cluster_args);
    if (augment.app()->parsed()) run_augment(augment, augment_args);
    if (render.app()->parsed()) run_render(render, render_args);
    if (exporter.app()->parsed()) run_export(exporter, export_args);
    if (eval.app()->parsed()) run_eval(eval, eval_args, out);
    if (combine.app()->parsed()) run_combine(combine, combine_args);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace aug3d::cli
