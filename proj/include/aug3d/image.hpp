#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace aug3d {

// Row-major RGB8 color plus per-pixel camera-frame depth (+inf = empty).
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
  std::vector<double> depth;

  ImageBuffer() = default;
  ImageBuffer(int w, int h)
      : width(w),
        height(h),
        rgb(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 0),
        depth(static_cast<std::size_t>(w) * static_cast<std::size_t>(h),
              std::numeric_limits<double>::infinity()) {}

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x);
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;
};

}  // namespace aug3d
