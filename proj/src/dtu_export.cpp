#include "aug3d/dtu_export.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "aug3d/error.hpp"
#include "aug3d/io.hpp"
#include "text_util.hpp"

namespace aug3d {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

CamFile make_cam_file(const CameraPose& pose, const Intrinsics& intr, const AxisAlignedBounds& bounds) {
  CamFile cam;
  cam.extrinsic = pose.world_to_camera();
  cam.intrinsic = intr.matrix();
  const double half = bounds.half_diagonal();
  const double dist = (camera_center(pose) - bounds.center()).norm();
  cam.depth_min = std::max(kNearPlane, dist - half);
  cam.depth_interval = 2.0 * half / kDepthHypotheses;
  return cam;
}

std::string format_cam_txt(const CamFile& cam) {
  using detail::format_double;
  std::string out = "extrinsic\n";
  for (int r = 0; r < 4; ++r) {
    out += fmt::format("{} {} {} {}\n", format_double(cam.extrinsic(r, 0)), format_double(cam.extrinsic(r, 1)),
                       format_double(cam.extrinsic(r, 2)), format_double(cam.extrinsic(r, 3)));
  }
  out += "\nintrinsic\n";
  for (int r = 0; r < 3; ++r) {
    out += fmt::format("{} {} {}\n", format_double(cam.intrinsic(r, 0)), format_double(cam.intrinsic(r, 1)),
                       format_double(cam.intrinsic(r, 2)));
  }
  out += fmt::format("\n{} {}\n", format_double(cam.depth_min), format_double(cam.depth_interval));
  return out;
}

CamFile parse_cam_txt(std::string_view bytes) {
  detail::LineReader reader(bytes);
  std::string_view line;
  const auto next_content = [&]() -> std::vector<std::string_view> {
    while (reader.next(line)) {
      auto tok = detail::split_ws(line);
      if (!tok.empty()) return tok;
    }
    throw Error(ErrorKind::Parse, "cam file ended early", reader.line_number());
  };
  const auto expect_header = [&](std::string_view name) {
    const auto tok = next_content();
    if (tok.size() != 1 || tok[0] != name) {
      throw Error(ErrorKind::Parse, fmt::format("expected '{}' section header", name), reader.line_number());
    }
  };
  const auto row = [&](std::size_t n) {
    const auto tok = next_content();
    if (tok.size() < n) throw Error(ErrorKind::Parse, "matrix row too short", reader.line_number());
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) {
      auto x = detail::parse_number<double>(tok[i]);
      if (!x) throw Error(ErrorKind::Parse, fmt::format("bad number '{}'", tok[i]), reader.line_number());
      v.push_back(*x);
    }
    return v;
  };

  CamFile cam;
  expect_header("extrinsic");
  for (int r = 0; r < 4; ++r) {
    const auto v = row(4);
    for (int c = 0; c < 4; ++c) cam.extrinsic(r, c) = v[static_cast<std::size_t>(c)];
  }
  expect_header("intrinsic");
  for (int r = 0; r < 3; ++r) {
    const auto v = row(3);
    for (int c = 0; c < 3; ++c) cam.intrinsic(r, c) = v[static_cast<std::size_t>(c)];
  }
  const auto depth = row(2);
  cam.depth_min = depth[0];
  cam.depth_interval = depth[1];
  return cam;
}

std::string manifest_to_json(const Manifest& m) {
  ordered_json j;
  j["version"] = m.version;
  j["method"] = m.method;
  j["k"] = m.k;
  j["scans"] = ordered_json::array();
  for (const ManifestScan& s : m.scans) {
    ordered_json scan;
    scan["id"] = s.id;
    scan["views"] = ordered_json::array();
    for (const ManifestView& v : s.views) {
      ordered_json view;
      view["image_id"] = v.image_id;
      view["source"] = v.source;
      view["cam"] = v.cam;
      if (v.image) view["image"] = *v.image;
      scan["views"].push_back(std::move(view));
    }
    j["scans"].push_back(std::move(scan));
  }
  return j.dump(2) + "\n";
}

Manifest parse_manifest(std::string_view json) {
  ordered_json j;
  try {
    j = ordered_json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("manifest is not valid JSON: ") + e.what());
  }
  const auto fail = [](const std::string& what) { throw Error(ErrorKind::Format, "manifest: " + what); };
  const auto field = [&](const ordered_json& obj, const char* key) -> const ordered_json& {
    if (!obj.is_object() || !obj.contains(key)) fail(fmt::format("missing field '{}'", key));
    return obj.at(key);
  };

  Manifest m;
  const auto& version = field(j, "version");
  if (!version.is_number_integer() || version.get<int>() != 1) fail("version must be 1");
  const auto& method = field(j, "method");
  if (!method.is_string()) fail("method must be a string");
  m.method = method.get<std::string>();
  const auto& k = field(j, "k");
  if (!k.is_number_unsigned() || k.get<std::size_t>() < 1) fail("k must be a positive integer");
  m.k = k.get<std::size_t>();
  const auto& scans = field(j, "scans");
  if (!scans.is_array()) fail("scans must be an array");
  for (const auto& sj : scans) {
    ManifestScan s;
    const auto& id = field(sj, "id");
    if (!id.is_number_unsigned() || id.get<std::size_t>() != m.scans.size()) {
      fail("scan ids must be consecutive from 0");
    }
    s.id = id.get<std::size_t>();
    const auto& views = field(sj, "views");
    if (!views.is_array() || views.size() != m.k) fail(fmt::format("scan {} must hold exactly k views", s.id));
    for (const auto& vj : views) {
      ManifestView v;
      const auto& img = field(vj, "image_id");
      if (!img.is_number_unsigned()) fail("image_id must be an unsigned integer");
      v.image_id = img.get<ImageId>();
      const auto& src = field(vj, "source");
      if (!src.is_string() || (src != "real" && src != "synthetic")) fail("source must be real or synthetic");
      v.source = src.get<std::string>();
      const auto& cam = field(vj, "cam");
      if (!cam.is_string()) fail("cam must be a string");
      v.cam = cam.get<std::string>();
      if (vj.contains("image")) {
        if (!vj["image"].is_string()) fail("image must be a string");
        v.image = vj["image"].get<std::string>();
      }
      s.views.push_back(std::move(v));
    }
    m.scans.push_back(std::move(s));
  }
  return m;
}

std::string manifest_method_label(ClusterMethod m) {
  switch (m) {
    case ClusterMethod::Sequence: return "sequence";
    case ClusterMethod::Grid: return "grid";
    case ClusterMethod::Ray: return "ray_ground";
    case ClusterMethod::Sfm: return "sfm_shared";
  }
  return "sequence";
}

std::string cam_path(std::size_t scan, std::size_t view) {
  return fmt::format("scan_{}/cams/{:08}_cam.txt", scan, view);
}

std::string image_path(std::size_t scan, std::size_t view) {
  return fmt::format("scan_{}/images/{:08}.ppm", scan, view);
}

Manifest plan_manifest(std::string method, std::size_t k, const std::vector<std::vector<ImageId>>& groups,
                       std::string_view source, bool with_images) {
  Manifest m;
  m.method = std::move(method);
  m.k = k;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].size() != k) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("group {} has {} views, expected {}", i, groups[i].size(), k));
    }
    ManifestScan s;
    s.id = i;
    for (std::size_t j = 0; j < groups[i].size(); ++j) {
      ManifestView v;
      v.image_id = groups[i][j];
      v.source = std::string(source);
      v.cam = cam_path(i, j);
      if (with_images) v.image = image_path(i, j);
      s.views.push_back(std::move(v));
    }
    m.scans.push_back(std::move(s));
  }
  return m;
}

Manifest plan_manifest(const ClusterSet& cs, std::string_view source, bool with_images) {
  std::vector<std::vector<ImageId>> groups;
  for (const Cluster& c : cs.clusters) groups.push_back(c.members);
  return plan_manifest(manifest_method_label(cs.method), cs.config.k, groups, source, with_images);
}

ClusterSet clusters_from_manifest(const Manifest& m) {
  ClusterSet cs;
  cs.config.k = m.k;
  if (m.method == "grid") cs.method = ClusterMethod::Grid;
  if (m.method == "ray_ground") cs.method = ClusterMethod::Ray;
  if (m.method == "sfm_shared") cs.method = ClusterMethod::Sfm;
  for (const ManifestScan& s : m.scans) {
    Cluster c;
    c.cluster_id = s.id;
    for (const ManifestView& v : s.views) c.members.push_back(v.image_id);
    if (!c.members.empty()) c.center_image = c.members.front();
    cs.clusters.push_back(std::move(c));
  }
  return cs;
}

namespace {

fs::path render_file(const fs::path& dir, const CameraPose& pose) {
  return dir / (fs::path(pose.name).stem().string() + ".ppm");
}

}  // namespace

Manifest export_dtu(const SceneModel& scene, const Manifest& plan, const ExportOptions& opts,
                    const fs::path& out_dir) {
  AxisAlignedBounds bounds;
  if (opts.bounds) {
    bounds = *opts.bounds;
  } else if (!scene.points.empty()) {
    bounds = scene_bounds(scene.points);
  } else {
    std::vector<Vec3> centers;
    for (const auto& [id, pose] : scene.cameras) centers.push_back(camera_center(pose));
    bounds = bounds_of(centers);
  }

  Manifest out = plan;
  for (ManifestScan& s : out.scans) {
    if (s.views.size() != out.k) throw Error(ErrorKind::InvalidArgument, "scan view count differs from k");
    for (std::size_t j = 0; j < s.views.size(); ++j) {
      ManifestView& v = s.views[j];
      const CameraPose& pose = scene.camera(v.image_id);
      scene.intrinsics_for(pose);
      v.cam = cam_path(s.id, j);
      v.image.reset();
      if (opts.images_dir) {
        const fs::path src = render_file(*opts.images_dir, pose);
        if (!fs::is_regular_file(src)) throw Error(ErrorKind::Io, "missing render " + src.string());
        v.image = image_path(s.id, j);
      }
    }
  }

  for (const ManifestScan& s : out.scans) {
    for (const ManifestView& v : s.views) {
      const CameraPose& pose = scene.camera(v.image_id);
      write_file(out_dir / v.cam, format_cam_txt(make_cam_file(pose, scene.intrinsics_for(pose), bounds)));
      if (v.image) write_file(out_dir / *v.image, read_file(render_file(*opts.images_dir, pose)));
    }
  }
  write_file(out_dir / "clusters.json", manifest_to_json(out));
  return out;
}

Manifest export_dtu(const SceneModel& scene, const ClusterSet& cs, const ExportOptions& opts,
                    const fs::path& out_dir) {
  return export_dtu(scene, plan_manifest(cs, "real", opts.images_dir.has_value()), opts, out_dir);
}

Manifest combine_manifests(const Manifest& real, const Manifest& synthetic) {
  if (real.k != synthetic.k) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("cannot combine scans of {} and {} views; cluster size must be constant", real.k,
                            synthetic.k));
  }
  Manifest out;
  out.method = real.method + "+" + synthetic.method;
  out.k = real.k;
  for (const Manifest* m : {&real, &synthetic}) {
    for (const ManifestScan& s : m->scans) {
      ManifestScan ns;
      ns.id = out.scans.size();
      for (std::size_t j = 0; j < s.views.size(); ++j) {
        ManifestView v = s.views[j];
        v.cam = cam_path(ns.id, j);
        if (v.image) v.image = image_path(ns.id, j);
        ns.views.push_back(std::move(v));
      }
      out.scans.push_back(std::move(ns));
    }
  }
  return out;
}

Manifest combine_exports(const fs::path& real_root, const fs::path& synthetic_root, const fs::path& out_dir) {
  const Manifest real = parse_manifest(read_file(real_root / "clusters.json"));
  const Manifest synthetic = parse_manifest(read_file(synthetic_root / "clusters.json"));
  const Manifest out = combine_manifests(real, synthetic);

  struct Copy {
    fs::path from;
    std::string to;
  };
  std::vector<Copy> copies;
  std::size_t next = 0;
  for (const auto& [root, m] : {std::pair{&real_root, &real}, std::pair{&synthetic_root, &synthetic}}) {
    for (const ManifestScan& s : m->scans) {
      const ManifestScan& ns = out.scans[next++];
      for (std::size_t j = 0; j < s.views.size(); ++j) {
        copies.push_back({*root / s.views[j].cam, ns.views[j].cam});
        if (s.views[j].image) copies.push_back({*root / *s.views[j].image, *ns.views[j].image});
      }
    }
  }
  for (const Copy& c : copies) {
    if (!fs::is_regular_file(c.from)) throw Error(ErrorKind::Io, "missing exported file " + c.from.string());
  }
  for (const Copy& c : copies) write_file(out_dir / c.to, read_file(c.from));
  write_file(out_dir / "clusters.json", manifest_to_json(out));
  return out;
}

}  // namespace aug3d
