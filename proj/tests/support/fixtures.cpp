#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>

namespace fixtures {

using pagesplit::Rgb;
using pagesplit::SplitOrientation;

namespace {

Rgb gray(std::uint8_t v) { return {v, v, v}; }

std::uint8_t clamp_luma(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

}  // namespace

Raster horizontal_bands(const std::vector<std::pair<int, std::uint8_t>>& bands, int width) {
  std::vector<std::uint8_t> per_row;
  for (const auto& [count, luma] : bands) per_row.insert(per_row.end(), count, luma);
  return Raster::from_fn(width, static_cast<int>(per_row.size()),
                         [&](int, int y) { return gray(per_row[y]); });
}

Raster vertical_bands(const std::vector<std::pair<int, std::uint8_t>>& bands, int height) {
  std::vector<std::uint8_t> per_col;
  for (const auto& [count, luma] : bands) per_col.insert(per_col.end(), count, luma);
  return Raster::from_fn(static_cast<int>(per_col.size()), height,
                         [&](int x, int) { return gray(per_col[x]); });
}

Raster transpose(const Raster& raster) {
  return Raster::from_fn(raster.height(), raster.width(),
                         [&](int x, int y) { return raster.pixel(y, x); });
}

std::vector<std::vector<int>> luma_rows(const Raster& raster) {
  std::vector<std::vector<int>> rows(raster.height(), std::vector<int>(raster.width()));
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width(); ++x) rows[y][x] = raster.luma(x, y);
  }
  return rows;
}

std::vector<int> naive_detect_lines(const std::vector<std::vector<int>>& img,
                                    const SeparationConfig& cfg) {
  const int ws = cfg.window_size;
  const int len = static_cast<int>(img.size());
  std::vector<int> lines;
  for (int i = ws + 1; i <= len - 1; ++i) {
    const auto& upper = img[i - ws - 1];
    const auto& lower = img[i];
    double mean = 0;
    int count = 0;
    for (int r = i - ws; r < i; ++r) {
      for (int v : img[r]) {
        mean += v;
        ++count;
      }
    }
    mean /= count;
    double var = 0;
    for (int r = i - ws; r < i; ++r) {
      for (int v : img[r]) var += (v - mean) * (v - mean);
    }
    var /= count;
    const bool is_blank = var < cfg.var_thr;

    const auto portion = [&](const std::vector<int>& a, const std::vector<int>& b) {
      int hits = 0;
      for (std::size_t c = 0; c < a.size(); ++c) {
        if (std::abs(a[c] - b[c]) > cfg.diff_thr) ++hits;
      }
      return static_cast<double>(hits) / static_cast<double>(a.size());
    };
    const bool is_border_top = portion(upper, img[i - ws]) > cfg.portion_thr;
    const bool is_border_bottom = portion(lower, img[i - 1]) > cfg.portion_thr;
    if (is_blank && (is_border_top || is_border_bottom)) {
      lines.push_back(is_border_bottom ? i : i - ws);
    }
  }
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  return lines;
}

Raster three_band_10x10() { return horizontal_bands({{3, 10}, {4, 200}, {3, 10}}, 10); }

Raster random_blocky_raster(std::mt19937& rng, int max_side) {
  std::uniform_int_distribution<int> side(1, max_side);
  std::uniform_int_distribution<int> luma(0, 255);
  const int w = side(rng);
  const int h = side(rng);
  std::vector<int> px(static_cast<std::size_t>(w) * h, luma(rng));
  const int rects = std::uniform_int_distribution<int>(0, 6)(rng);
  for (int k = 0; k < rects; ++k) {
    const int x0 = std::uniform_int_distribution<int>(0, w - 1)(rng);
    const int y0 = std::uniform_int_distribution<int>(0, h - 1)(rng);
    const int x1 = std::uniform_int_distribution<int>(x0 + 1, w)(rng);
    const int y1 = std::uniform_int_distribution<int>(y0 + 1, h)(rng);
    const int v = luma(rng);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) px[static_cast<std::size_t>(y) * w + x] = v;
    }
  }
  const int noise = std::uniform_int_distribution<int>(0, 3)(rng);
  if (noise > 0) {
    std::uniform_int_distribution<int> jitter(-noise, noise);
    for (auto& v : px) v += jitter(rng);
  }
  return Raster::from_fn(w, h, [&](int x, int y) {
    return gray(clamp_luma(px[static_cast<std::size_t>(y) * w + x]));
  });
}

Raster random_layout_raster(std::mt19937& rng, int max_side) {
  std::uniform_int_distribution<int> side(8, max_side);
  std::uniform_int_distribution<int> luma(0, 255);
  const int w = side(rng);
  const int h = side(rng);
  std::vector<int> px(static_cast<std::size_t>(w) * h, luma(rng));
  const auto fill = [&](int x0, int y0, int x1, int y1, int v) {
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) px[static_cast<std::size_t>(y) * w + x] = v;
    }
  };
  int y = std::uniform_int_distribution<int>(0, 6)(rng);
  while (y < h - 2) {
    const int y1 = std::min(h, y + std::uniform_int_distribution<int>(2, std::max(2, h / 3))(rng));
    fill(0, y, w, y1, luma(rng));
    int x = std::uniform_int_distribution<int>(0, 6)(rng);
    while (std::uniform_int_distribution<int>(0, 2)(rng) > 0 && x < w - 2) {
      const int x1 = std::min(w, x + std::uniform_int_distribution<int>(2, std::max(2, w / 3))(rng));
      fill(x, y, x1, y1, luma(rng));
      x = x1 + std::uniform_int_distribution<int>(1, 8)(rng);
    }
    y = y1 + std::uniform_int_distribution<int>(1, 10)(rng);
  }
  return Raster::from_fn(w, h, [&](int x, int y) {
    return gray(static_cast<std::uint8_t>(px[static_cast<std::size_t>(y) * w + x]));
  });
}

SeparationConfig random_small_config(std::mt19937& rng) {
  SeparationConfig cfg;
  cfg.window_size = std::uniform_int_distribution<int>(1, 5)(rng);
  cfg.var_thr = std::uniform_real_distribution<double>(0.5, 60.0)(rng);
  cfg.diff_thr = std::uniform_real_distribution<double>(5.0, 80.0)(rng);
  cfg.portion_thr = std::uniform_real_distribution<double>(0.3, 0.95)(rng);
  cfg.max_depth = std::uniform_int_distribution<int>(0, 4)(rng);
  return cfg;
}

Raster synthetic_page() {
  constexpr int kW = 1200;
  constexpr int kH = 2000;
  std::vector<std::uint8_t> px(static_cast<std::size_t>(kW) * kH, 255);
  const auto fill = [&](int x0, int y0, int x1, int y1, std::uint8_t v) {
    for (int y = y0; y < y1; ++y) {
      std::fill_n(px.begin() + static_cast<std::ptrdiff_t>(y) * kW + x0, x1 - x0, v);
    }
  };
  // Header band with a light title strip inside.
  fill(0, 100, kW, 600, 40);
  fill(150, 250, 1050, 330, 230);
  // Content band: dark frame holding two light column panels.
  fill(0, 750, kW, 1450, 50);
  fill(100, 760, 550, 1440, 235);
  fill(650, 760, 1100, 1440, 235);
  // Text-like stripes inside the panels.
  for (int y = 800; y < 1400; y += 24) {
    fill(130, y, 520, y + 10, 70);
    fill(680, y, 1070, y + 10, 70);
  }
  // Footer band.
  fill(0, 1600, kW, 1900, 30);
  for (int x = 200; x < 1000; x += 200) fill(x, 1700, x + 120, 1800, 200);

  // Deterministic low-amplitude noise, variance well below the default blank threshold.
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> jitter(-1, 1);
  for (auto& v : px) v = clamp_luma(v + jitter(rng));
  return Raster::from_fn(kW, kH, [&](int x, int y) {
    return gray(px[static_cast<std::size_t>(y) * kW + x]);
  });
}

SegmentTree random_tree(std::mt19937& rng, int width, int height, int max_depth) {
  SegmentTree tree(width, height);
  std::vector<std::string> frontier{tree.root_id()};
  while (!frontier.empty()) {
    const std::string id = frontier.back();
    frontier.pop_back();
    const auto n = tree.node(id);
    if (n.depth >= max_depth) continue;
    if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) continue;
    const bool horiz = std::uniform_int_distribution<int>(0, 1)(rng) == 0;
    const int lo = horiz ? n.region.y0 : n.region.x0;
    const int hi = horiz ? n.region.y1 : n.region.x1;
    if (hi - lo < 2) continue;
    const int want = std::uniform_int_distribution<int>(1, std::min(4, hi - lo - 1))(rng);
    std::vector<int> cuts;
    while (static_cast<int>(cuts.size()) < want) {
      const int c = std::uniform_int_distribution<int>(lo + 1, hi - 1)(rng);
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    tree.split(id, horiz ? SplitOrientation::horizontal : SplitOrientation::vertical, cuts);
    for (const auto& c : tree.node(id).children) frontier.push_back(c);
  }
  return tree;
}

SegmentTree strip_tree(int width, int height, int strips, int columns) {
  SegmentTree tree(width, height);
  std::vector<int> ycuts;
  for (int k = 1; k < strips; ++k) ycuts.push_back(height * k / strips);
  if (!ycuts.empty()) tree.split(tree.root_id(), SplitOrientation::horizontal, ycuts);
  if (columns > 1) {
    const auto strip_ids = tree.root().children;
    for (const auto& id : strip_ids) {
      const auto r = tree.node(id).region;
      std::vector<int> xcuts;
      for (int k = 1; k < columns; ++k) xcuts.push_back(r.x0 + r.width() * k / columns);
      tree.split(id, SplitOrientation::vertical, xcuts);
    }
  }
  return tree;
}

SegmentTree two_by_two_tree(int width, int height) { return strip_tree(width, height, 2, 2); }

Raster gradient(int width, int height) {
  return Raster::from_fn(width, height, [](int x, int y) {
    return Rgb{static_cast<std::uint8_t>(x * 17 % 256), static_cast<std::uint8_t>(y * 29 % 256),
               static_cast<std::uint8_t>((x + y) * 7 % 256)};
  });
}

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
  if (needle.empty()) return 0;
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

TempDir::TempDir() {
  static std::mt19937_64 rng{std::random_device{}()};
  auto base = std::filesystem::temp_directory_path();
  for (;;) {
    auto candidate = base / ("pagesplit-test-" + std::to_string(rng()));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate.string();
      break;
    }
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace fixtures
