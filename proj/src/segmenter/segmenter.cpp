#include "pagesplit/segmenter.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

#include "pagesplit/errors.hpp"

namespace pagesplit {
namespace {

void require_inside(const Raster& raster, const Region& region) {
  if (!region.valid_within(raster.width(), raster.height())) {
    throw RegionError("region " + region.to_string() + " is outside the " +
                      std::to_string(raster.width()) + "x" + std::to_string(raster.height()) +
                      " raster");
  }
}

// Fraction of columns where |a - b| > diff_thr exceeds portion_thr.
bool is_border(const LumaView& v, int row_a, int row_b, const SeparationConfig& cfg) {
  int count = 0;
  for (int c = 0; c < v.cols(); ++c) {
    const int d = std::abs(static_cast<int>(v.at(row_a, c)) - static_cast<int>(v.at(row_b, c)));
    if (d > cfg.diff_thr) ++count;
  }
  return static_cast<double>(count) / v.cols() > cfg.portion_thr;
}

void subdivide(SegmentTree& tree, const Raster& raster, const SeparationConfig& cfg,
               const std::string& id) {
  const SegmentNode& n = tree.node(id);
  if (n.depth >= cfg.max_depth) return;
  const Region region = n.region;
  const int depth = n.depth;

  const auto scheduled = depth % 2 == 0 ? SplitOrientation::horizontal : SplitOrientation::vertical;
  const auto other = scheduled == SplitOrientation::horizontal ? SplitOrientation::vertical
                                                                : SplitOrientation::horizontal;
  for (const auto orientation : {scheduled, other}) {
    const bool horiz = orientation == SplitOrientation::horizontal;
    auto cuts = horiz ? detect_lines_horizontal(raster, region, cfg)
                      : detect_lines_vertical(raster, region, cfg);
    if (cuts.empty()) continue;
    const int base = horiz ? region.y0 : region.x0;
    for (auto& c : cuts) c += base;
    tree.split(id, orientation, cuts);
    const std::vector<std::string> children = tree.node(id).children;
    for (const auto& child : children) {
      subdivide(tree, raster, cfg, child);
    }
    return;
  }
}

constexpr std::array<Rgb, 4> kPalette = {{
    {230, 25, 75},
    {60, 180, 75},
    {0, 130, 200},
    {245, 130, 48},
}};

}  // namespace

LumaView LumaView::rows_of(const Raster& raster, const Region& region) {
  require_inside(raster, region);
  return {raster.gray(),
          region.height(),
          region.width(),
          static_cast<std::ptrdiff_t>(region.y0) * raster.width() + region.x0,
          raster.width(),
          1};
}

LinePositions detect_lines(const LumaView& view, const SeparationConfig& cfg) {
  const int ws = cfg.window_size;
  const int rows = view.rows();
  const int cols = view.cols();
  if (ws < 1 || cols < 1 || rows <= ws + 1) return {};

  // Prefix sums of per-row luma sums and squared sums give O(1) window variance.
  std::vector<std::int64_t> sum(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<std::int64_t> sq(static_cast<std::size_t>(rows) + 1, 0);
  for (int r = 0; r < rows; ++r) {
    std::int64_t s = 0;
    std::int64_t q = 0;
    for (int c = 0; c < cols; ++c) {
      const std::int64_t v = view.at(r, c);
      s += v;
      q += v * v;
    }
    sum[r + 1] = sum[r] + s;
    sq[r + 1] = sq[r] + q;
  }

  const auto n = static_cast<std::int64_t>(ws) * cols;
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  LinePositions lines;
  for (int i = ws + 1; i <= rows - 1; ++i) {
    const std::int64_t s = sum[i] - sum[i - ws];
    const std::int64_t q = sq[i] - sq[i - ws];
    // Population variance: (n*q - s^2) / n^2, numerator exact in 64 bits.
    const double variance = static_cast<double>(n * q - s * s) / n2;
    if (!(variance < cfg.var_thr)) continue;

    const bool border_bottom = is_border(view, i, i - 1, cfg);
    if (border_bottom) {
      lines.push_back(i);
    } else if (is_border(view, i - ws - 1, i - ws, cfg)) {
      lines.push_back(i - ws);
    }
  }
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  return lines;
}

LinePositions detect_lines_horizontal(const Raster& raster, const Region& region,
                                      const SeparationConfig& cfg) {
  return detect_lines(LumaView::rows_of(raster, region), cfg);
}

LinePositions detect_lines_vertical(const Raster& raster, const Region& region,
                                    const SeparationConfig& cfg) {
  return detect_lines(LumaView::rows_of(raster, region).transposed(), cfg);
}

SegmentTree build_tree(const Raster& raster, const SeparationConfig& cfg) {
  cfg.validate();
  SegmentTree tree(raster.width(), raster.height());
  subdivide(tree, raster, cfg, tree.root_id());
  return tree;
}

double separation_rate(const SegmentTree& tree) {
  std::int64_t largest = 0;
  for (const auto& [id, n] : tree.nodes()) {
    if (n.is_leaf()) largest = std::max(largest, n.region.area());
  }
  const auto total = static_cast<double>(tree.source_width()) * tree.source_height();
  return 1.0 - static_cast<double>(largest) / total;
}

Raster crop(const Raster& raster, const Region& region) {
  require_inside(raster, region);
  const auto src = raster.rgb();
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(region.area()) * 3);
  for (int y = region.y0; y < region.y1; ++y) {
    const auto begin = (static_cast<std::size_t>(y) * raster.width() + region.x0) * 3;
    const auto end = begin + static_cast<std::size_t>(region.width()) * 3;
    out.insert(out.end(), src.begin() + static_cast<std::ptrdiff_t>(begin),
               src.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return Raster(region.width(), region.height(), std::move(out));
}

std::span<const Rgb> overlay_palette() noexcept { return kPalette; }

Raster render_overlay(const Raster& raster, const SegmentTree& tree) {
  if (tree.source_width() != raster.width() || tree.source_height() != raster.height()) {
    throw RegionError("tree is " + std::to_string(tree.source_width()) + "x" +
                      std::to_string(tree.source_height()) + " but raster is " +
                      std::to_string(raster.width()) + "x" + std::to_string(raster.height()));
  }
  std::vector<std::uint8_t> rgb(raster.rgb().begin(), raster.rgb().end());
  const int w = raster.width();
  const auto paint = [&](int x, int y, Rgb c) {
    const auto i = (static_cast<std::size_t>(y) * w + x) * 3;
    rgb[i] = c.r;
    rgb[i + 1] = c.g;
    rgb[i + 2] = c.b;
  };
  constexpr int kThickness = 2;
  for (const auto& id : tree.leaves()) {
    const auto& n = tree.node(id);
    const Rgb c = kPalette[static_cast<std::size_t>(n.depth) % kPalette.size()];
    const Region& r = n.region;
    for (int y = r.y0; y < r.y1; ++y) {
      for (int x = r.x0; x < r.x1; ++x) {
        const bool edge = x < r.x0 + kThickness || x >= r.x1 - kThickness ||
                          y < r.y0 + kThickness || y >= r.y1 - kThickness;
        if (edge) paint(x, y, c);
      }
    }
  }
  return Raster(raster.width(), raster.height(), std::move(rgb));
}

}  // namespace pagesplit
