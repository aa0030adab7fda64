#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

#include <fmt/format.h>

#include "aug3d/error.hpp"
#include "aug3d/scene_model.hpp"
#include "text_util.hpp"

namespace aug3d {

using detail::LineReader;
using detail::parse_number;
using detail::split_ws;

namespace {

bool is_comment(std::string_view line) {
  const auto t = detail::trim(line);
  return !t.empty() && t.front() == '#';
}

template <typename T>
T number_or_throw(std::string_view token, std::size_t line, const char* what) {
  auto v = parse_number<T>(token);
  if (!v) throw Error(ErrorKind::Parse, fmt::format("invalid {} '{}'", what, token), line);
  return *v;
}

std::map<IntrinsicsId, Intrinsics> parse_cameras(std::string_view text) {
  std::map<IntrinsicsId, Intrinsics> out;
  LineReader reader(text);
  std::string_view line;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_number();
    if (is_comment(line) || detail::trim(line).empty()) continue;
    const auto tok = split_ws(line);
    if (tok.size() < 4) throw Error(ErrorKind::Parse, "camera line needs ID MODEL WIDTH HEIGHT", ln);
    const auto id = number_or_throw<IntrinsicsId>(tok[0], ln, "camera id");
    Intrinsics in;
    in.width = number_or_throw<int>(tok[2], ln, "width");
    in.height = number_or_throw<int>(tok[3], ln, "height");
    if (tok[1] == "PINHOLE") {
      if (tok.size() != 8) throw Error(ErrorKind::Parse, "PINHOLE expects fx fy cx cy", ln);
      in.fx = number_or_throw<double>(tok[4], ln, "fx");
      in.fy = number_or_throw<double>(tok[5], ln, "fy");
      in.cx = number_or_throw<double>(tok[6], ln, "cx");
      in.cy = number_or_throw<double>(tok[7], ln, "cy");
    } else if (tok[1] == "SIMPLE_PINHOLE") {
      if (tok.size() != 7) throw Error(ErrorKind::Parse, "SIMPLE_PINHOLE expects f cx cy", ln);
      in.fx = in.fy = number_or_throw<double>(tok[4], ln, "f");
      in.cx = number_or_throw<double>(tok[5], ln, "cx");
      in.cy = number_or_throw<double>(tok[6], ln, "cy");
    } else {
      throw Error(ErrorKind::Parse, fmt::format("unsupported camera model '{}'", tok[1]), ln);
    }
    try {
      in.validate();
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, e.what(), ln);
    }
    if (!out.emplace(id, in).second) {
      throw Error(ErrorKind::Parse, fmt::format("duplicate camera id {}", id), ln);
    }
  }
  return out;
}

std::vector<Point3D> parse_points(std::string_view text) {
  std::vector<Point3D> out;
  std::unordered_set<PointId> ids;
  LineReader reader(text);
  std::string_view line;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_number();
    if (is_comment(line) || detail::trim(line).empty()) continue;
    const auto tok = split_ws(line);
    if (tok.size() < 8 || (tok.size() - 8) % 2 != 0) {
      throw Error(ErrorKind::Parse, "point line needs ID X Y Z R G B ERROR (IMAGE_ID POINT2D_IDX)*", ln);
    }
    Point3D p;
    p.point_id = number_or_throw<PointId>(tok[0], ln, "point id");
    for (int i = 0; i < 3; ++i) p.position[i] = number_or_throw<double>(tok[1 + i], ln, "coordinate");
    const auto channel = [&](std::string_view t) {
      const int v = number_or_throw<int>(t, ln, "color");
      if (v < 0 || v > 255) throw Error(ErrorKind::Parse, "color out of range", ln);
      return static_cast<std::uint8_t>(v);
    };
    p.color = {channel(tok[4]), channel(tok[5]), channel(tok[6])};
    number_or_throw<double>(tok[7], ln, "error");
    std::unordered_set<ImageId> seen;
    for (std::size_t i = 8; i < tok.size(); i += 2) {
      const auto img = number_or_throw<ImageId>(tok[i], ln, "track image id");
      number_or_throw<std::int64_t>(tok[i + 1], ln, "track point2D index");
      if (seen.insert(img).second) p.track.push_back(img);
    }
    if (!ids.insert(p.point_id).second) {
      throw Error(ErrorKind::Parse, fmt::format("duplicate point id {}", p.point_id), ln);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

SceneModel parse_sfm_model(std::string_view images_text, std::string_view cameras_text,
                           std::string_view points_text) {
  SceneModel scene;
  scene.intrinsics = parse_cameras(cameras_text);
  scene.points = parse_points(points_text);

  std::unordered_set<PointId> point_ids;
  for (const Point3D& p : scene.points) point_ids.insert(p.point_id);

  LineReader reader(images_text);
  std::string_view line;
  bool expect_header = true;
  std::size_t seq = 0;
  while (reader.next(line)) {
    const std::size_t ln = reader.line_number();
    if (is_comment(line)) continue;
    if (expect_header) {
      if (detail::trim(line).empty()) continue;
      const auto tok = split_ws(line);
      if (tok.size() != 10) {
        throw Error(ErrorKind::Parse,
                    fmt::format("image line has {} fields, expected 10 "
                                "(IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME)",
                                tok.size()),
                    ln);
      }
      CameraPose pose;
      pose.image_id = number_or_throw<ImageId>(tok[0], ln, "image id");
      const double qw = number_or_throw<double>(tok[1], ln, "qw");
      const double qx = number_or_throw<double>(tok[2], ln, "qx");
      const double qy = number_or_throw<double>(tok[3], ln, "qy");
      const double qz = number_or_throw<double>(tok[4], ln, "qz");
      Quat q(qw, qx, qy, qz);
      if (!(q.norm() > 0.0) || !std::isfinite(q.norm())) {
        throw Error(ErrorKind::Parse, "degenerate quaternion", ln);
      }
      // Already-unit quaternions are kept bit-exact so write/parse round-trips.
      pose.rotation = std::abs(q.squaredNorm() - 1.0) <= 4 * std::numeric_limits<double>::epsilon() ? q : q.normalized();
      for (int i = 0; i < 3; ++i) pose.translation[i] = number_or_throw<double>(tok[5 + i], ln, "translation");
      pose.intrinsics_id = number_or_throw<IntrinsicsId>(tok[8], ln, "camera id");
      pose.name = std::string(tok[9]);
      pose.seq_index = seq++;
      if (!scene.intrinsics.contains(pose.intrinsics_id)) {
        throw Error(ErrorKind::Reference,
                    fmt::format("image {} references unknown camera {}", pose.image_id, pose.intrinsics_id));
      }
      if (!scene.cameras.emplace(pose.image_id, std::move(pose)).second) {
        throw Error(ErrorKind::Parse, "duplicate image id", ln);
      }
      expect_header = false;
    } else {
      const auto tok = split_ws(line);
      if (tok.size() % 3 != 0) {
        throw Error(ErrorKind::Parse, "observation line must hold X Y POINT3D_ID triples", ln);
      }
      for (std::size_t i = 0; i < tok.size(); i += 3) {
        number_or_throw<double>(tok[i], ln, "observation x");
        number_or_throw<double>(tok[i + 1], ln, "observation y");
        const auto pid = number_or_throw<std::int64_t>(tok[i + 2], ln, "point3D id");
        if (pid >= 0 && !point_ids.contains(static_cast<PointId>(pid))) {
          throw Error(ErrorKind::Reference, fmt::format("observation references unknown point {}", pid));
        }
      }
      expect_header = true;
    }
  }

  if (scene.cameras.empty()) throw Error(ErrorKind::EmptyModel, "images.txt contains no images");
  for (const Point3D& p : scene.points) {
    for (ImageId id : p.track) {
      if (!scene.cameras.contains(id)) {
        throw Error(ErrorKind::Reference,
                    fmt::format("point {} tracks unknown image {}", p.point_id, id));
      }
    }
  }
  return scene;
}

SfmText write_sfm_model(const SceneModel& scene) {
  using detail::format_double;
  SfmText out;

  out.cameras = "# CAMERA_ID MODEL WIDTH HEIGHT PARAMS[]\n";
  for (const auto& [id, in] : scene.intrinsics) {
    out.cameras += fmt::format("{} PINHOLE {} {} {} {} {} {}\n", id, in.width, in.height,
                               format_double(in.fx), format_double(in.fy), format_double(in.cx),
                               format_double(in.cy));
  }

  // Rows are emitted in capture order so seq_index survives a round trip.
  std::vector<const CameraPose*> ordered;
  for (const auto& [id, pose] : scene.cameras) ordered.push_back(&pose);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const CameraPose* a, const CameraPose* b) { return a->seq_index < b->seq_index; });
  out.images = "# IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME\n# POINTS2D[] as (X, Y, POINT3D_ID)\n";
  for (const CameraPose* pose : ordered) {
    const Quat& q = pose->rotation;
    const Vec3& t = pose->translation;
    out.images += fmt::format("{} {} {} {} {} {} {} {} {} {}\n\n", pose->image_id, format_double(q.w()),
                              format_double(q.x()), format_double(q.y()), format_double(q.z()),
                              format_double(t.x()), format_double(t.y()), format_double(t.z()),
                              pose->intrinsics_id, pose->name);
  }

  out.points = "# POINT3D_ID X Y Z R G B ERROR TRACK[] as (IMAGE_ID, POINT2D_IDX)\n";
  for (const Point3D& p : scene.points) {
    out.points += fmt::format("{} {} {} {} {} {} {} 0", p.point_id, format_double(p.position.x()),
                              format_double(p.position.y()), format_double(p.position.z()),
                              int{p.color.r}, int{p.color.g}, int{p.color.b});
    for (std::size_t i = 0; i < p.track.size(); ++i) out.points += fmt::format(" {} {}", p.track[i], i);
    out.points += '\n';
  }
  return out;
}

}  // namespace aug3d
