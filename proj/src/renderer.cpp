#include "aug3d/renderer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "aug3d/error.hpp"
#include "aug3d/io.hpp"
#include "aug3d/kernels.hpp"

namespace aug3d {

namespace {

void check_radius(int r) {
  if (r < 0) throw Error(ErrorKind::InvalidArgument, "splat radius must be >= 0");
}

}  // namespace

ImageBuffer splat_render(std::span<const Point3D> points, const CameraPose& pose, const Intrinsics& intr,
                         int splat_radius_px) {
  check_radius(splat_radius_px);
  const auto cam = kernels::ProjectionCamera::from(pose, intr);
  ImageBuffer img(intr.width, intr.height);
  const auto splats = kernels::project_splats_omp(points, cam);
  kernels::rasterize_splats_omp(splats, splat_radius_px, img);
  return img;
}

ImageBuffer splat_render_serial(std::span<const Point3D> points, const CameraPose& pose,
                                const Intrinsics& intr, int splat_radius_px) {
  check_radius(splat_radius_px);
  const auto cam = kernels::ProjectionCamera::from(pose, intr);
  ImageBuffer img(intr.width, intr.height);
  const auto splats = kernels::project_splats_serial(points, cam);
  kernels::rasterize_splats_serial(splats, splat_radius_px, img);
  return img;
}

std::string encode_image(const ImageBuffer& buf, ImageKind kind) {
  const std::size_t n = static_cast<std::size_t>(buf.width) * static_cast<std::size_t>(buf.height);
  if (buf.rgb.size() != 3 * n || buf.depth.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "image buffer size mismatch");
  }
  if (kind == ImageKind::Rgb) {
    std::string out = fmt::format("P6\n{} {}\n255\n", buf.width, buf.height);
    out.append(reinterpret_cast<const char*>(buf.rgb.data()), buf.rgb.size());
    return out;
  }

  double max_depth = kNearPlane;
  for (double d : buf.depth) {
    if (std::isfinite(d)) max_depth = std::max(max_depth, d);
  }
  const double span = max_depth - kNearPlane;
  std::string out = fmt::format("P5\n{} {}\n255\n", buf.width, buf.height);
  out.reserve(out.size() + n);
  for (double d : buf.depth) {
    std::uint8_t v = 255;
    if (std::isfinite(d)) {
      const double t = span > 0.0 ? (d - kNearPlane) / span : 0.0;
      v = static_cast<std::uint8_t>(std::clamp(std::lround(t * 255.0), 0L, 255L));
    }
    out.push_back(static_cast<char>(v));
  }
  return out;
}

void write_image(const ImageBuffer& buf, ImageKind kind, const std::filesystem::path& path) {
  write_file(path, encode_image(buf, kind));
}

Pnm parse_pnm(std::string_view bytes) {
  std::size_t pos = 0;
  const auto next_token = [&]() -> std::string_view {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    return bytes.substr(start, pos - start);
  };
  const auto to_int = [](std::string_view t) {
    int v = 0;
    if (t.empty()) throw Error(ErrorKind::Format, "truncated PNM header");
    for (char c : t) {
      if (c < '0' || c > '9') throw Error(ErrorKind::Format, "bad PNM header number");
      v = v * 10 + (c - '0');
    }
    return v;
  };

  Pnm img;
  const std::string_view magic = next_token();
  if (magic == "P6") {
    img.channels = 3;
  } else if (magic == "P5") {
    img.channels = 1;
  } else {
    throw Error(ErrorKind::Format, "not a binary PPM/PGM");
  }
  img.width = to_int(next_token());
  img.height = to_int(next_token());
  if (to_int(next_token()) != 255) throw Error(ErrorKind::Format, "only maxval 255 is supported");
  ++pos;  // single whitespace byte before the raster
  const std::size_t need =
      static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height) * img.channels;
  if (pos > bytes.size() || bytes.size() - pos < need) throw Error(ErrorKind::Truncation, "PNM raster truncated");
  img.data.assign(reinterpret_cast<const std::uint8_t*>(bytes.data() + pos),
                  reinterpret_cast<const std::uint8_t*>(bytes.data() + pos + need));
  return img;
}

}  // namespace aug3d
