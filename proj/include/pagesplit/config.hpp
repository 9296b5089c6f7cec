#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace pagesplit {

/// Separation-line detection and subdivision parameters.
struct SeparationConfig {
  int window_size = 50;     // rows in the sliding window
  double var_thr = 50.0;    // luma^2; windows below this variance are blank
  double diff_thr = 45.0;   // luma; per-column border contrast
  double portion_thr = 0.9; // fraction of the row that must exceed diff_thr
  int max_depth = 2;

  void validate() const;
  friend bool operator==(const SeparationConfig&, const SeparationConfig&) = default;
};

struct ModelConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-4o";
  double temperature = 0.0;
  int max_output_tokens = 8192;
  std::string api_key_env = "OPENAI_API_KEY";
  int concurrency_limit = 8;
  int retry_budget = 3;
  int backoff_base_ms = 1000;
  std::size_t max_image_bytes = 20u * 1024u * 1024u;
  int timeout_s = 300;

  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum class AssemblyMode { agent, rule };

std::string_view to_string(AssemblyMode mode) noexcept;
AssemblyMode parse_assembly_mode(std::string_view text);

struct PipelineOptions {
  AssemblyMode mode = AssemblyMode::agent;
  std::string prompts_dir;  // empty: built-in prompts
  std::string runs_root = "runs";

  friend bool operator==(const PipelineOptions&, const PipelineOptions&) = default;
};

struct Settings {
  SeparationConfig separation;
  ModelConfig model;
  PipelineOptions pipeline;

  void validate() const;
  nlohmann::json to_json() const;
  friend bool operator==(const Settings&, const Settings&) = default;
};

/// Overrides are keyed "section.key" (e.g. "separation.max_depth").
using ConfigOverrides = std::map<std::string, std::string>;

/// Parses the INI-style config text ([separation], [model], [pipeline]).
/// Absent keys keep their defaults; overrides win over file values.
/// Throws ConfigError naming the offending key.
Settings parse_config(std::string_view text, const ConfigOverrides& overrides = {});

/// Reads `path` (when given) and applies `overrides`.
Settings load_config(const std::optional<std::filesystem::path>& path,
                     const ConfigOverrides& overrides = {});

/// Applies "section.key" overrides on top of `base` and validates.
Settings apply_overrides(Settings base, const ConfigOverrides& overrides);

/// Rebuilds settings from the snapshot produced by Settings::to_json.
Settings settings_from_json(const nlohmann::json& j);

}  // namespace pagesplit
