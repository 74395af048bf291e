#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace actrec {

/// Row-major single-channel grid of reals.
struct GrayGrid {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  GrayGrid() = default;
  GrayGrid(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  bool empty() const { return values.empty(); }
};

/// Interleaved 8-bit RGB image.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}
  bool empty() const { return data.empty(); }
};

/// One RGB-D observation aligned with a skeleton frame.
struct ImageFrame {
  RgbImage rgb;
  GrayGrid depth;
};

/// Luminance 0.299 R + 0.587 G + 0.114 B.
GrayGrid to_gray(const RgbImage& rgb);

GrayGrid flip_horizontal(const GrayGrid& grid);
RgbImage flip_horizontal(const RgbImage& image);

/// Replaces zero-depth pixels by the nearest nonzero pixel in the same row
/// (left neighbour wins ties). Rows without any valid pixel are left as is.
GrayGrid fill_depth_holes(const GrayGrid& depth);

/// Binary P5 (8- or 16-bit) graymap.
GrayGrid read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const GrayGrid& grid, int max_value = 65535);

/// Binary P6 (8-bit) pixmap.
RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbImage& image);

}  // namespace actrec
