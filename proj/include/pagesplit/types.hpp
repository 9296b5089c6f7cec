#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pagesplit/raster.hpp"

namespace pagesplit {

/// Which prompt produced a piece of code.
enum class PromptRole { leaf, node, final };

std::string_view to_string(PromptRole role) noexcept;
PromptRole parse_prompt_role(std::string_view text);

struct ProviderMeta {
  std::string model;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  double latency_ms = 0.0;
  int attempts = 1;
};

/// Generated code for one segment (or for the final page).
struct CodeFragment {
  std::string segment_id;
  std::string html;
  PromptRole role_used = PromptRole::leaf;
  int version = 1;
  bool truncated = false;  // provider stopped at the output-token cap
  ProviderMeta provider_meta;

  nlohmann::json to_json() const;
  static CodeFragment from_json(const nlohmann::json& j);
};

struct HtmlDocument {
  std::string html;
  std::string source_run;
};

/// Normalized rectangle in the unit square.
struct NormBox {
  double x0 = 0;
  double y0 = 0;
  double x1 = 0;
  double y1 = 0;

  double width() const noexcept { return x1 - x0; }
  double height() const noexcept { return y1 - y0; }
  double area() const noexcept { return width() * height(); }
  double center_x() const noexcept { return (x0 + x1) / 2; }
  double center_y() const noexcept { return (y0 + y1) / 2; }
};

/// A visual text block of a rendered page.
struct Block {
  std::string text;
  NormBox bbox;
  Rgb color;

  /// Character (code point) count of `text`.
  std::size_t size() const;
};

struct MetricsReport {
  std::optional<double> code_similarity;
  std::optional<double> block_match;
  std::optional<double> text_sim;
  std::optional<double> position_sim;
  std::optional<double> color_sim;
  std::optional<double> mean_iou;
  std::optional<double> separation_rate;
  std::optional<double> clip_score;  // external; never computed here

  /// Flat object; absent fields are omitted, values rounded to 6 decimals.
  nlohmann::json to_json() const;
};

}  // namespace pagesplit
