#include <algorithm>
#include <cmath>
#include <tuple>

#include "pagesplit/errors.hpp"
#include "pagesplit/metrics.hpp"
#include "pagesplit/text.hpp"

namespace pagesplit {

namespace {

// Optimal assignments can tie; solving on a content-sorted copy makes the
// chosen pairs independent of the order the blocks were listed in.
std::vector<Block> canonical(std::vector<Block> blocks) {
  const auto key = [](const Block& b) {
    return std::tuple(b.text, b.bbox.x0, b.bbox.y0, b.bbox.x1, b.bbox.y1, b.color.r, b.color.g,
                      b.color.b);
  };
  std::stable_sort(blocks.begin(), blocks.end(),
                   [&key](const Block& a, const Block& b) { return key(a) < key(b); });
  return blocks;
}

}  // namespace

BlockScores block_metrics(const std::vector<Block>& ref_in, const std::vector<Block>& gen_in) {
  if (ref_in.empty() || gen_in.empty()) return {};
  const auto ref = canonical(ref_in);
  const auto gen = canonical(gen_in);

  std::vector<std::vector<double>> cost(ref.size(), std::vector<double>(gen.size()));
  std::vector<std::vector<double>> dice(ref.size(), std::vector<double>(gen.size()));
  for (std::size_t i = 0; i < ref.size(); ++i) {
    for (std::size_t j = 0; j < gen.size(); ++j) {
      dice[i][j] = dice_text(ref[i].text, gen[j].text);
      cost[i][j] = 1.0 - dice[i][j];
    }
  }
  const auto assignment = solve_assignment(cost);

  std::size_t total_size = 0;
  for (const auto& b : ref) total_size += b.size();
  for (const auto& b : gen) total_size += b.size();
  // Blocks with no text at all carry no size; weigh by count instead.
  const bool by_count = total_size == 0;
  const auto weight = [by_count](const Block& a, const Block& b) {
    return by_count ? 2.0 : static_cast<double>(a.size() + b.size());
  };
  const double total_weight =
      by_count ? static_cast<double>(ref.size() + gen.size()) : static_cast<double>(total_size);

  double matched = 0, text = 0, position = 0, color = 0;
  std::size_t pairs = 0;
  double plain_text = 0, plain_position = 0, plain_color = 0;
  for (const auto& [i, j] : assignment.pairs) {
    if (dice[i][j] <= 0) continue;
    const Block& r = ref[i];
    const Block& g = gen[j];
    const double w = weight(r, g);
    const double pos = std::max(0.0, 1.0 - (std::abs(r.bbox.center_x() - g.bbox.center_x()) +
                              std::abs(r.bbox.center_y() - g.bbox.center_y())) /
                                 2.0);
    const double col = std::max(0.0, 1.0 - ciede2000(srgb_to_lab(r.color), srgb_to_lab(g.color)) / 100.0);
    matched += w;
    text += w * dice[i][j];
    position += w * pos;
    color += w * col;
    ++pairs;
    plain_text += dice[i][j];
    plain_position += pos;
    plain_color += col;
  }
  if (pairs == 0) return {};

  BlockScores out;
  out.block_match = matched / total_weight;
  if (matched > 0) {
    out.text_sim = text / matched;
    out.position_sim = position / matched;
    out.color_sim = color / matched;
  } else {
    // Every matched pair has empty text on both sides.
    const double n = static_cast<double>(pairs);
    out.text_sim = plain_text / n;
    out.position_sim = plain_position / n;
    out.color_sim = plain_color / n;
  }
  return out;
}

BlockSet BlockSet::from_json(const nlohmann::json& j) {
  try {
    BlockSet set;
    set.page_width = j.at("page").at("width").get<int>();
    set.page_height = j.at("page").at("height").get<int>();
    if (set.page_width <= 0 || set.page_height <= 0) {
      throw EvaluationError("block file page dimensions must be positive");
    }
    for (const auto& b : j.at("blocks")) {
      Block block;
      block.text = b.value("text", "");
      const auto box = b.at("bbox").get<std::vector<double>>();
      if (box.size() != 4) throw EvaluationError("block bbox needs 4 numbers");
      block.bbox = {box[0], box[1], box[2], box[3]};
      const auto rgb = b.at("color").get<std::vector<int>>();
      if (rgb.size() != 3) throw EvaluationError("block color needs 3 channels");
      for (const int c : rgb) {
        if (c < 0 || c > 255) throw EvaluationError("block color channel out of range");
      }
      block.color = {static_cast<std::uint8_t>(rgb[0]), static_cast<std::uint8_t>(rgb[1]),
                     static_cast<std::uint8_t>(rgb[2])};
      set.blocks.push_back(std::move(block));
    }
    return set;
  } catch (const nlohmann::json::exception& e) {
    throw EvaluationError(std::string("malformed block file: ") + e.what());
  }
}

BlockSet BlockSet::load(const std::filesystem::path& path) {
  try {
    return from_json(nlohmann::json::parse(read_text_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw EvaluationError(path.string() + ": " + e.what());
  } catch (const EvaluationError& e) {
    throw EvaluationError(path.string() + ": " + e.what());
  }
}

std::vector<NormBox> load_ground_truth_boxes(const std::filesystem::path& path) {
  try {
    const auto j = nlohmann::json::parse(read_text_file(path));
    const double w = j.at("page").at("width").get<double>();
    const double h = j.at("page").at("height").get<double>();
    if (w <= 0 || h <= 0) throw EvaluationError("page dimensions must be positive");
    std::vector<NormBox> out;
    for (const auto& b : j.at("boxes")) {
      const auto v = b.get<std::vector<double>>();
      if (v.size() != 4) throw EvaluationError("box needs 4 numbers");
      out.push_back({v[0] / w, v[1] / h, v[2] / w, v[3] / h});
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw EvaluationError(path.string() + ": " + e.what());
  } catch (const EvaluationError& e) {
    throw EvaluationError(path.string() + ": " + e.what());
  }
}

}  // namespace pagesplit
