#include "actrec/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "actrec/error.hpp"

namespace actrec {

GrayGrid to_gray(const RgbImage& rgb) {
  GrayGrid out(rgb.width, rgb.height);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = 0.299 * rgb.data[3 * i] + 0.587 * rgb.data[3 * i + 1] + 0.114 * rgb.data[3 * i + 2];
  }
  return out;
}

GrayGrid flip_horizontal(const GrayGrid& grid) {
  GrayGrid out(grid.width, grid.height);
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) out.at(grid.width - 1 - x, y) = grid.at(x, y);
  }
  return out;
}

RgbImage flip_horizontal(const RgbImage& image) {
  RgbImage out(image.width, image.height);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const std::size_t src = (static_cast<std::size_t>(y) * image.width + x) * 3;
      const std::size_t dst = (static_cast<std::size_t>(y) * image.width + (image.width - 1 - x)) * 3;
      std::copy_n(image.data.begin() + src, 3, out.data.begin() + dst);
    }
  }
  return out;
}

GrayGrid fill_depth_holes(const GrayGrid& depth) {
  GrayGrid out = depth;
  for (int y = 0; y < depth.height; ++y) {
    for (int x = 0; x < depth.width; ++x) {
      if (depth.at(x, y) != 0.0) continue;
      for (int d = 1; d < depth.width; ++d) {
        if (x - d >= 0 && depth.at(x - d, y) != 0.0) {
          out.at(x, y) = depth.at(x - d, y);
          break;
        }
        if (x + d < depth.width && depth.at(x + d, y) != 0.0) {
          out.at(x, y) = depth.at(x + d, y);
          break;
        }
      }
    }
  }
  return out;
}

namespace {

struct PnmHeader {
  std::string magic;
  int width = 0;
  int height = 0;
  int max_value = 0;
};

PnmHeader read_header(std::istream& in, const std::filesystem::path& path) {
  PnmHeader h;
  auto next_token = [&]() {
    std::string token;
    while (in >> token) {
      if (token[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return token;
    }
    throw Error(ErrorCode::MalformedInput, "truncated PNM header in " + path.string());
  };
  h.magic = next_token();
  h.width = std::stoi(next_token());
  h.height = std::stoi(next_token());
  h.max_value = std::stoi(next_token());
  in.get();  // single whitespace before raster
  if (h.width <= 0 || h.height <= 0 || h.max_value <= 0 || h.max_value > 65535) {
    throw Error(ErrorCode::MalformedInput, "bad PNM header in " + path.string());
  }
  return h;
}

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
  return in;
}

}  // namespace

GrayGrid read_pgm(const std::filesystem::path& path) {
  auto in = open_binary(path);
  const PnmHeader h = read_header(in, path);
  if (h.magic != "P5") throw Error(ErrorCode::MalformedInput, path.string() + " is not a P5 graymap");
  GrayGrid grid(h.width, h.height);
  const bool wide = h.max_value > 255;
  for (double& v : grid.values) {
    if (wide) {
      const int hi = in.get();
      const int lo = in.get();
      v = static_cast<double>((hi << 8) | lo);
    } else {
      v = static_cast<double>(in.get());
    }
  }
  if (!in) throw Error(ErrorCode::MalformedInput, "truncated raster in " + path.string());
  return grid;
}

void write_pgm(const std::filesystem::path& path, const GrayGrid& grid, int max_value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  out << "P5\n" << grid.width << ' ' << grid.height << '\n' << max_value << '\n';
  const bool wide = max_value > 255;
  for (double v : grid.values) {
    const int q = static_cast<int>(std::lround(std::clamp(v, 0.0, static_cast<double>(max_value))));
    if (wide) out.put(static_cast<char>((q >> 8) & 0xff));
    out.put(static_cast<char>(q & 0xff));
  }
}

RgbImage read_ppm(const std::filesystem::path& path) {
  auto in = open_binary(path);
  const PnmHeader h = read_header(in, path);
  if (h.magic != "P6" || h.max_value > 255) {
    throw Error(ErrorCode::MalformedInput, path.string() + " is not an 8-bit P6 pixmap");
  }
  RgbImage image(h.width, h.height);
  in.read(reinterpret_cast<char*>(image.data.data()), static_cast<std::streamsize>(image.data.size()));
  if (!in) throw Error(ErrorCode::MalformedInput, "truncated raster in " + path.string());
  return image;
}

void write_ppm(const std::filesystem::path& path, const RgbImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.data.data()), static_cast<std::streamsize>(image.data.size()));
}

}  // namespace actrec
