#include "pagesplit/types.hpp"

#include <cmath>

#include "pagesplit/errors.hpp"
#include "pagesplit/text.hpp"

namespace pagesplit {

std::string_view to_string(PromptRole role) noexcept {
  switch (role) {
    case PromptRole::leaf:
      return "leaf";
    case PromptRole::node:
      return "node";
    case PromptRole::final:
      break;
  }
  return "final";
}

PromptRole parse_prompt_role(std::string_view text) {
  if (text == "leaf") return PromptRole::leaf;
  if (text == "node") return PromptRole::node;
  if (text == "final") return PromptRole::final;
  throw Error("unknown prompt role '" + std::string(text) + "'");
}

nlohmann::json CodeFragment::to_json() const {
  return {
      {"segment_id", segment_id},
      {"role_used", std::string(to_string(role_used))},
      {"version", version},
      {"truncated", truncated},
      {"provider_meta",
       {{"model", provider_meta.model},
        {"prompt_tokens", provider_meta.prompt_tokens},
        {"completion_tokens", provider_meta.completion_tokens},
        {"latency_ms", provider_meta.latency_ms},
        {"attempts", provider_meta.attempts}}},
  };
}

CodeFragment CodeFragment::from_json(const nlohmann::json& j) {
  CodeFragment f;
  f.segment_id = j.at("segment_id").get<std::string>();
  f.role_used = parse_prompt_role(j.at("role_used").get<std::string>());
  f.version = j.at("version").get<int>();
  f.truncated = j.value("truncated", false);
  if (j.contains("provider_meta")) {
    const auto& m = j["provider_meta"];
    f.provider_meta.model = m.value("model", "");
    f.provider_meta.prompt_tokens = m.value("prompt_tokens", std::int64_t{0});
    f.provider_meta.completion_tokens = m.value("completion_tokens", std::int64_t{0});
    f.provider_meta.latency_ms = m.value("latency_ms", 0.0);
    f.provider_meta.attempts = m.value("attempts", 1);
  }
  return f;
}

std::size_t Block::size() const { return utf8_decode(text).size(); }

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  const auto put = [&j](const char* name, const std::optional<double>& v) {
    if (v) j[name] = std::round(*v * 1e6) / 1e6;
  };
  put("code_similarity", code_similarity);
  put("block_match", block_match);
  put("text_sim", text_sim);
  put("position_sim", position_sim);
  put("color_sim", color_sim);
  put("mean_iou", mean_iou);
  put("separation_rate", separation_rate);
  put("clip_score", clip_score);
  return j;
}

}  // namespace pagesplit
