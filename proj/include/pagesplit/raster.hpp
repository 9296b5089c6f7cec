#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pagesplit/region.hpp"

namespace pagesplit {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// BT.601 luma, rounded half up: round(0.299 R + 0.587 G + 0.114 B).
constexpr std::uint8_t luma_of(Rgb c) noexcept {
  return static_cast<std::uint8_t>((299u * c.r + 587u * c.g + 114u * c.b + 500u) / 1000u);
}

/// Decoded screenshot pixels. Row-major RGB triples plus a luma plane derived
/// at construction. Immutable once built.
class Raster {
 public:
  /// Throws RegionError when a dimension is < 1 or the buffer size is wrong.
  Raster(int width, int height, std::vector<std::uint8_t> rgb);

  static Raster filled(int width, int height, Rgb color);
  static Raster from_fn(int width, int height, const std::function<Rgb(int x, int y)>& fn);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Region bounds() const noexcept { return {0, 0, width_, height_}; }

  std::span<const std::uint8_t> rgb() const noexcept { return rgb_; }
  std::span<const std::uint8_t> gray() const noexcept { return gray_; }

  Rgb pixel(int x, int y) const noexcept {
    const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
    return {rgb_[i], rgb_[i + 1], rgb_[i + 2]};
  }
  std::uint8_t luma(int x, int y) const noexcept {
    return gray_[static_cast<std::size_t>(y) * width_ + x];
  }

  friend bool operator==(const Raster& a, const Raster& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.rgb_ == b.rgb_;
  }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> rgb_;
  std::vector<std::uint8_t> gray_;
};

}  // namespace pagesplit
