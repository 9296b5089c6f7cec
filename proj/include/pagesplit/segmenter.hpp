#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pagesplit/config.hpp"
#include "pagesplit/raster.hpp"
#include "pagesplit/region.hpp"
#include "pagesplit/segment_tree.hpp"

namespace pagesplit {

/// Read-only strided view over a luma plane. Rows are scanned by the line
/// detector; transposing the view scans columns without copying.
class LumaView {
 public:
  LumaView(std::span<const std::uint8_t> data, int rows, int cols, std::ptrdiff_t origin,
           std::ptrdiff_t row_stride, std::ptrdiff_t col_stride) noexcept
      : data_(data),
        rows_(rows),
        cols_(cols),
        origin_(origin),
        row_stride_(row_stride),
        col_stride_(col_stride) {}

  /// Rows of `region` in `raster`, top to bottom. Throws RegionError when the
  /// region is out of bounds.
  static LumaView rows_of(const Raster& raster, const Region& region);

  LumaView transposed() const noexcept {
    return {data_, cols_, rows_, origin_, col_stride_, row_stride_};
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::uint8_t at(int row, int col) const noexcept {
    return data_[static_cast<std::size_t>(origin_ + row * row_stride_ + col * col_stride_)];
  }

 private:
  std::span<const std::uint8_t> data_;
  int rows_;
  int cols_;
  std::ptrdiff_t origin_;
  std::ptrdiff_t row_stride_;
  std::ptrdiff_t col_stride_;
};

/// Strictly increasing cut offsets, relative to the first scanned row.
using LinePositions = std::vector<int>;

/// Sliding-window separation-line detection over the rows of `view`.
///
/// For every i in [window_size + 1, rows - 1] the window is rows
/// [i - window_size, i), `upper` is row i - window_size - 1 and `lower` is
/// row i. A window is blank when its population variance is below var_thr. It
/// has a top (bottom) border when the fraction of columns whose absolute
/// difference between `upper` and the first window row (`lower` and the last
/// window row) exceeds diff_thr is greater than portion_thr. Blank windows with
/// a border emit i (bottom border) or i - window_size (top border only).
///
/// Bands touching the first or last row of the view are never reported.
LinePositions detect_lines(const LumaView& view, const SeparationConfig& cfg);

/// Horizontal lines (y offsets from region.y0).
LinePositions detect_lines_horizontal(const Raster& raster, const Region& region,
                                      const SeparationConfig& cfg);

/// Vertical lines (x offsets from region.x0); detect_lines on the transposed block.
LinePositions detect_lines_vertical(const Raster& raster, const Region& region,
                                    const SeparationConfig& cfg);

/// Alternating recursive subdivision. Even depths try horizontal cuts first,
/// odd depths vertical; when the scheduled axis yields nothing the other axis
/// is tried once before the node becomes a leaf.
SegmentTree build_tree(const Raster& raster, const SeparationConfig& cfg);

/// 1 - (largest leaf area) / (source area).
double separation_rate(const SegmentTree& tree);

/// Throws RegionError when `region` is not inside the raster.
Raster crop(const Raster& raster, const Region& region);

/// Copy of `raster` with every leaf outlined by a 2-px rectangle whose colour
/// cycles with the leaf depth. Throws RegionError on a dimension mismatch.
Raster render_overlay(const Raster& raster, const SegmentTree& tree);

/// Outline colours, indexed by depth modulo the palette size.
std::span<const Rgb> overlay_palette() noexcept;

}  // namespace pagesplit
