#pragma once

// Deterministic test fixtures and independent oracles shared by the unit and
// acceptance suites.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pagesplit/config.hpp"
#include "pagesplit/raster.hpp"
#include "pagesplit/segment_tree.hpp"

namespace fixtures {

using pagesplit::Raster;
using pagesplit::SegmentTree;
using pagesplit::SeparationConfig;

/// Gray raster built from horizontal bands: {row count, luma} pairs.
Raster horizontal_bands(const std::vector<std::pair<int, std::uint8_t>>& bands, int width);

/// Gray raster built from vertical bands: {column count, luma} pairs.
Raster vertical_bands(const std::vector<std::pair<int, std::uint8_t>>& bands, int height);

Raster transpose(const Raster& raster);

/// Row-major luma matrix of the raster.
std::vector<std::vector<int>> luma_rows(const Raster& raster);

/// Literal transcription of the line-detection pseudocode over a plain luma
/// matrix: per-window mean/variance in double, no prefix sums, no
/// short-circuiting, raw appends followed by sort + unique.
std::vector<int> naive_detect_lines(const std::vector<std::vector<int>>& rows,
                                    const SeparationConfig& cfg);

/// The ten-row [10x3, 200x4, 10x3] band image used by several examples.
Raster three_band_10x10();

/// Random raster <= max_side x max_side made of flat rectangles over a flat
/// background, with optional +-noise. Designed to contain detectable lines
/// at small window sizes.
Raster random_blocky_raster(std::mt19937& rng, int max_side);

/// Random page-like raster <= max_side x max_side: flat background crossed by
/// full-width bands, some holding flat vertical panels. Splits far more often
/// than random_blocky_raster.
Raster random_layout_raster(std::mt19937& rng, int max_side);

/// Random separation config suited to small rasters.
SeparationConfig random_small_config(std::mt19937& rng);

/// 1200x2000 synthetic page: three full-width horizontal bands on a white
/// background, the middle band holding two text-striped column panels.
Raster synthetic_page();

/// Random valid tree over a width x height image, up to `max_depth` levels.
SegmentTree random_tree(std::mt19937& rng, int width, int height, int max_depth);

/// Root split into `strips` horizontal strips, each split vertically into
/// `columns` children (depth 2 when columns > 0).
SegmentTree strip_tree(int width, int height, int strips, int columns);

/// 2x2 layout: two horizontal strips, each split into two columns.
SegmentTree two_by_two_tree(int width, int height);

/// Gradient raster used for crop oracles.
Raster gradient(int width, int height);

/// Counts non-overlapping occurrences of `needle` in `hay`.
std::size_t count_occurrences(const std::string& hay, const std::string& needle);

/// Temporary directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace fixtures
