#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "aug3d/error.hpp"
#include "aug3d/scene_model.hpp"
#include "text_util.hpp"

namespace aug3d {

using detail::split_ws;

namespace {

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<std::string> properties;
};

int index_of(const std::vector<std::string>& props, std::string_view name) {
  for (std::size_t i = 0; i < props.size(); ++i) {
    if (props[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

std::vector<Point3D> parse_ply(std::string_view bytes) {
  detail::LineReader reader(bytes);
  std::string_view line;
  if (!reader.next(line) || detail::trim(line) != "ply") {
    throw Error(ErrorKind::Format, "missing 'ply' magic");
  }

  std::vector<Element> elements;
  bool ascii = false;
  bool header_done = false;
  while (reader.next(line)) {
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "end_header") {
      header_done = true;
      break;
    }
    if (tok[0] == "format") {
      if (tok.size() < 2 || tok[1] != "ascii") throw Error(ErrorKind::Format, "only ASCII PLY is supported");
      ascii = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw Error(ErrorKind::Format, "malformed element line");
      auto n = detail::parse_number<std::size_t>(tok[2]);
      if (!n) throw Error(ErrorKind::Format, "malformed element count");
      elements.push_back({std::string(tok[1]), *n, {}});
    } else if (tok[0] == "property") {
      if (elements.empty() || tok.size() < 3) throw Error(ErrorKind::Format, "property outside an element");
      elements.back().properties.emplace_back(tok.back());
    }
  }
  if (!header_done) throw Error(ErrorKind::Format, "missing end_header");
  if (!ascii) throw Error(ErrorKind::Format, "missing format line");

  std::size_t skip = 0;
  const Element* vertex = nullptr;
  for (const Element& e : elements) {
    if (e.name == "vertex") {
      vertex = &e;
      break;
    }
    skip += e.count;
  }
  if (vertex == nullptr) throw Error(ErrorKind::Format, "no vertex element");

  const int ix = index_of(vertex->properties, "x");
  const int iy = index_of(vertex->properties, "y");
  const int iz = index_of(vertex->properties, "z");
  if (ix < 0 || iy < 0 || iz < 0) throw Error(ErrorKind::Format, "vertex element lacks x/y/z");
  const int ir = index_of(vertex->properties, "red");
  const int ig = index_of(vertex->properties, "green");
  const int ib = index_of(vertex->properties, "blue");
  const bool has_color = ir >= 0 && ig >= 0 && ib >= 0;

  for (std::size_t i = 0; i < skip;) {
    if (!reader.next(line)) throw Error(ErrorKind::Truncation, "file ends before vertex data");
    if (!detail::trim(line).empty()) ++i;
  }

  std::vector<Point3D> points;
  points.reserve(vertex->count);
  while (points.size() < vertex->count) {
    if (!reader.next(line)) {
      throw Error(ErrorKind::Truncation,
                  fmt::format("header declares {} vertices, body has {}", vertex->count, points.size()));
    }
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() < vertex->properties.size()) {
      throw Error(ErrorKind::Format,
                  fmt::format("vertex line {} has too few values", reader.line_number()));
    }
    const auto num = [&](int idx) {
      auto v = detail::parse_number<double>(tok[static_cast<std::size_t>(idx)]);
      if (!v) {
        throw Error(ErrorKind::Format, fmt::format("bad number on line {}", reader.line_number()));
      }
      return *v;
    };
    Point3D p;
    p.point_id = points.size();
    p.position = Vec3(num(ix), num(iy), num(iz));
    if (has_color) {
      const auto ch = [&](int idx) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(num(idx)), 0L, 255L));
      };
      p.color = {ch(ir), ch(ig), ch(ib)};
    }
    points.push_back(std::move(p));
  }
  return points;
}

std::string write_ply(std::span<const Point3D> points) {
  std::string out = fmt::format(
      "ply\nformat ascii 1.0\nelement vertex {}\nproperty double x\nproperty double y\n"
      "property double z\nproperty uchar red\nproperty uchar green\nproperty uchar blue\n"
      "end_header\n",
      points.size());
  for (const Point3D& p : points) {
    out += fmt::format("{} {} {} {} {} {}\n", detail::format_double(p.position.x()),
                       detail::format_double(p.position.y()), detail::format_double(p.position.z()),
                       int{p.color.r}, int{p.color.g}, int{p.color.b});
  }
  return out;
}

}  // namespace aug3d
