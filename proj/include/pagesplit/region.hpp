#pragma once

#include <cstdint>
#include <string>

namespace pagesplit {

/// Half-open pixel rectangle: [x0, x1) x [y0, y1).
struct Region {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  std::int64_t area() const noexcept {
    return static_cast<std::int64_t>(width()) * static_cast<std::int64_t>(height());
  }
  bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }

  bool contains(const Region& o) const noexcept {
    return o.x0 >= x0 && o.y0 >= y0 && o.x1 <= x1 && o.y1 <= y1;
  }
  bool overlaps(const Region& o) const noexcept {
    return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1;
  }
  /// Non-empty and inside a width x height image.
  bool valid_within(int width, int height) const noexcept {
    return 0 <= x0 && x0 < x1 && x1 <= width && 0 <= y0 && y0 < y1 && y1 <= height;
  }

  std::string to_string() const;

  friend bool operator==(const Region&, const Region&) = default;
};

}  // namespace pagesplit
