#include "pagesplit/raster.hpp"

#include <string>

#include "pagesplit/errors.hpp"

namespace pagesplit {

std::string Region::to_string() const {
  return "(" + std::to_string(x0) + "," + std::to_string(y0) + "," + std::to_string(x1) + "," +
         std::to_string(y1) + ")";
}

Raster::Raster(int width, int height, std::vector<std::uint8_t> rgb)
    : width_(width), height_(height), rgb_(std::move(rgb)) {
  if (width < 1 || height < 1) {
    throw RegionError("raster dimensions must be positive, got " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
  const auto pixels = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (rgb_.size() != pixels * 3) {
    throw RegionError("rgb buffer holds " + std::to_string(rgb_.size()) + " bytes, expected " +
                      std::to_string(pixels * 3));
  }
  gray_.resize(pixels);
  for (std::size_t i = 0; i < pixels; ++i) {
    gray_[i] = luma_of({rgb_[3 * i], rgb_[3 * i + 1], rgb_[3 * i + 2]});
  }
}

Raster Raster::filled(int width, int height, Rgb color) {
  return from_fn(width, height, [color](int, int) { return color; });
}

Raster Raster::from_fn(int width, int height, const std::function<Rgb(int, int)>& fn) {
  if (width < 1 || height < 1) {
    throw RegionError("raster dimensions must be positive");
  }
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width) * height * 3);
  std::size_t i = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Rgb c = fn(x, y);
      rgb[i++] = c.r;
      rgb[i++] = c.g;
      rgb[i++] = c.b;
    }
  }
  return Raster(width, height, std::move(rgb));
}

}  // namespace pagesplit
