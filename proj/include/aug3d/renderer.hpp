#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "aug3d/image.hpp"
#include "aug3d/scene_model.hpp"

namespace aug3d {

// Z-buffered square-splat rendering of a colored point cloud. Points at or
// in front of the near plane are culled; equal depths resolve to the lower
// point_id. Background is black with +inf depth.
ImageBuffer splat_render(std::span<const Point3D> points, const CameraPose& pose, const Intrinsics& intr,
                         int splat_radius_px = 1);

// Same output, single-threaded reference path.
ImageBuffer splat_render_serial(std::span<const Point3D> points, const CameraPose& pose,
                                const Intrinsics& intr, int splat_radius_px = 1);

enum class ImageKind { Rgb, Depth };

// P6 for color. P5 for depth: [near plane, max finite depth] maps linearly
// onto [0, 255], empty pixels are 255.
std::string encode_image(const ImageBuffer& buf, ImageKind kind);
void write_image(const ImageBuffer& buf, ImageKind kind, const std::filesystem::path& path);

struct Pnm {
  int width = 0;
  int height = 0;
  int channels = 0;  // 3 for P6, 1 for P5
  std::vector<std::uint8_t> data;
};

// Binary P5/P6 with maxval 255.
Pnm parse_pnm(std::string_view bytes);

}  // namespace aug3d
