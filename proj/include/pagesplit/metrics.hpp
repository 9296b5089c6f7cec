#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pagesplit/config.hpp"
#include "pagesplit/region.hpp"
#include "pagesplit/segment_tree.hpp"
#include "pagesplit/types.hpp"

namespace pagesplit {

/// Insert/delete edit distance over code points: l1 + l2 - 2 * LCS.
std::size_t indel_distance(std::string_view a, std::string_view b);

/// 1 - indel_distance / (l1 + l2); 1.0 when both are empty.
double code_similarity(std::string_view a, std::string_view b);

/// Throws EvaluationError when either box has zero area.
double iou(const Region& a, const Region& b);
double iou(const NormBox& a, const NormBox& b);

/// Mean over predicted boxes of the best IoU against any ground-truth box.
double evaluate_segmentation(const std::vector<NormBox>& predicted,
                             const std::vector<NormBox>& ground_truth);

/// Sorensen-Dice over character multisets; 1.0 when both are empty.
double dice_text(std::string_view a, std::string_view b);

struct Lab {
  double L = 0;
  double a = 0;
  double b = 0;
};

/// sRGB (D65) to CIELAB.
Lab srgb_to_lab(const Rgb& c);

/// CIEDE2000 with kL = kC = kH = 1.
double ciede2000(const Lab& x, const Lab& y);

struct AssignmentResult {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), ascending rows
  double total_cost = 0;
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;
};

/// Minimum-cost assignment of min(rows, cols) pairs on a rectangular matrix
/// of finite non-negative costs. Throws EvaluationError on an empty or
/// ragged matrix.
AssignmentResult solve_assignment(const std::vector<std::vector<double>>& cost);

struct BlockScores {
  double block_match = 0;
  double text_sim = 0;
  double position_sim = 0;
  double color_sim = 0;
};

BlockScores block_metrics(const std::vector<Block>& ref, const std::vector<Block>& gen);

struct BlockSet {
  int page_width = 0;
  int page_height = 0;
  std::vector<Block> blocks;

  /// {"page": {"width", "height"}, "blocks": [{"text", "bbox": [x0,y0,x1,y1], "color": [r,g,b]}]}
  /// with bbox normalized to the page.
  static BlockSet from_json(const nlohmann::json& j);
  static BlockSet load(const std::filesystem::path& path);
};

/// Ground-truth boxes in pixels, normalized on load:
/// {"page": {"width", "height"}, "boxes": [[x0,y0,x1,y1], ...]}.
std::vector<NormBox> load_ground_truth_boxes(const std::filesystem::path& path);

/// Leaf regions normalized by the source image size.
std::vector<NormBox> leaf_boxes(const SegmentTree& tree);

/// Optional evaluation artifacts. Each metric is computed when its inputs are
/// present; an explicitly requested metric with a missing input is an error.
struct EvaluationInputs {
  std::optional<std::filesystem::path> original_html;
  std::optional<std::filesystem::path> generated_html;
  std::optional<std::filesystem::path> original_png;
  std::optional<std::filesystem::path> generated_png;
  std::optional<std::filesystem::path> ref_blocks;
  std::optional<std::filesystem::path> gen_blocks;
  std::optional<std::filesystem::path> gt_boxes;
  std::optional<std::filesystem::path> tree;  // tree.json; else segmented from original_png
  std::optional<double> clip_score;           // computed externally
  SeparationConfig separation;
  /// Metric names that must be produced: code_similarity, block, mean_iou,
  /// separation_rate. Empty means "whatever the inputs allow".
  std::vector<std::string> required;
};

MetricsReport build_report(const EvaluationInputs& inputs);

}  // namespace pagesplit
