#include <algorithm>
#include <future>

#include "pagesplit/errors.hpp"
#include "pagesplit/image_io.hpp"
#include "pagesplit/metrics.hpp"
#include "pagesplit/segmenter.hpp"
#include "pagesplit/text.hpp"

namespace pagesplit {
namespace {

bool wanted(const EvaluationInputs& in, std::string_view metric) {
  return std::find(in.required.begin(), in.required.end(), metric) != in.required.end();
}

void require(const EvaluationInputs& in, std::string_view metric,
             const std::optional<std::filesystem::path>& file, std::string_view what) {
  if (!file && wanted(in, metric)) {
    throw EvaluationError(std::string(metric) + " needs the " + std::string(what) +
                          " file, which was not given");
  }
}

}  // namespace

std::vector<NormBox> leaf_boxes(const SegmentTree& tree) {
  const double w = tree.source_width();
  const double h = tree.source_height();
  std::vector<NormBox> out;
  for (const auto& id : tree.leaves()) {
    const Region& r = tree.node(id).region;
    out.push_back({r.x0 / w, r.y0 / h, r.x1 / w, r.y1 / h});
  }
  return out;
}

MetricsReport build_report(const EvaluationInputs& in) {
  for (const auto& m : in.required) {
    if (m != "code_similarity" && m != "block" && m != "mean_iou" && m != "separation_rate") {
      throw EvaluationError("unknown metric '" + m + "'");
    }
  }
  require(in, "code_similarity", in.original_html, "original html");
  require(in, "code_similarity", in.generated_html, "generated html");
  require(in, "block", in.ref_blocks, "reference blocks");
  require(in, "block", in.gen_blocks, "generated blocks");
  require(in, "mean_iou", in.gt_boxes, "ground-truth boxes");
  const bool has_tree_source = in.tree || in.original_png;
  if (!has_tree_source && (wanted(in, "mean_iou") || wanted(in, "separation_rate"))) {
    throw EvaluationError(std::string(wanted(in, "mean_iou") ? "mean_iou" : "separation_rate") +
                          " needs the tree or the original screenshot file, neither was given");
  }

  MetricsReport report;
  report.clip_score = in.clip_score;

  std::future<double> code;
  if (in.original_html && in.generated_html) {
    code = std::async(std::launch::async, [&in] {
      return code_similarity(read_text_file(*in.original_html), read_text_file(*in.generated_html));
    });
  }

  if (in.ref_blocks && in.gen_blocks) {
    const auto ref = BlockSet::load(*in.ref_blocks);
    const auto gen = BlockSet::load(*in.gen_blocks);
    const auto scores = block_metrics(ref.blocks, gen.blocks);
    report.block_match = scores.block_match;
    report.text_sim = scores.text_sim;
    report.position_sim = scores.position_sim;
    report.color_sim = scores.color_sim;
  }

  if (has_tree_source) {
    const SegmentTree tree =
        in.tree ? SegmentTree::from_json(nlohmann::json::parse(read_text_file(*in.tree)))
                : build_tree(load_raster(*in.original_png), in.separation);
    report.separation_rate = separation_rate(tree);
    if (in.gt_boxes) {
      report.mean_iou = evaluate_segmentation(leaf_boxes(tree), load_ground_truth_boxes(*in.gt_boxes));
    }
  }

  if (code.valid()) report.code_similarity = code.get();
  return report;
}

}  // namespace pagesplit
