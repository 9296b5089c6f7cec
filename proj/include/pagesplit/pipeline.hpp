#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pagesplit/config.hpp"
#include "pagesplit/prompts.hpp"
#include "pagesplit/provider.hpp"
#include "pagesplit/raster.hpp"
#include "pagesplit/segment_tree.hpp"
#include "pagesplit/types.hpp"

namespace pagesplit {

struct PipelineStats {
  int total_calls = 0;
  std::vector<int> calls_per_depth;
  std::vector<std::int64_t> output_chars_per_depth;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  double wall_time_ms = 0.0;

  /// `include_timing = false` drops the latency-dependent fields.
  nlohmann::json to_json(bool include_timing = true) const;
  static PipelineStats from_json(const nlohmann::json& j);
};

/// Grid track indices, half-open: columns [col_start, col_end), rows [row_start, row_end).
struct GridPlacement {
  int col_start = 0;
  int col_end = 0;
  int row_start = 0;
  int row_end = 0;

  friend bool operator==(const GridPlacement&, const GridPlacement&) = default;
};

struct GridTemplate {
  std::vector<double> column_tracks;  // fractions of the image width, sum to 1
  std::vector<double> row_tracks;     // fractions of the image height, sum to 1
  std::map<std::string, GridPlacement> placements;  // leaf id -> tracks
  std::string scaffold_html;
};

/// Places every leaf fragment in a CSS grid whose lines are the distinct leaf
/// edges. Throws PipelineError when a leaf has no fragment.
GridTemplate build_grid_template(const SegmentTree& tree,
                                 const std::map<std::string, std::string>& fragments);

class PipelineError : public Error {
 public:
  using Error::Error;
};

class UnknownSegmentError : public Error {
 public:
  using Error::Error;
};

/// A provider call failed mid-run. Carries the fragments completed so far.
class GenerationError : public Error {
 public:
  GenerationError(const std::string& message, std::string failed_segment,
                  std::map<std::string, CodeFragment> partial)
      : Error(message), failed_segment_(std::move(failed_segment)), partial_(std::move(partial)) {}

  const std::string& failed_segment() const noexcept { return failed_segment_; }
  const std::map<std::string, CodeFragment>& partial() const noexcept { return partial_; }

 private:
  std::string failed_segment_;
  std::map<std::string, CodeFragment> partial_;
};

/// Result of a full generation, and the state regeneration works on.
struct GenerationRun {
  std::string run_id;
  AssemblyMode mode = AssemblyMode::agent;
  SegmentTree tree;
  std::map<std::string, CodeFragment> fragments;  // latest fragment per segment
  std::optional<std::string> scaffold_html;       // rule mode only
  CodeFragment final_fragment;
  HtmlDocument document;
  PipelineStats stats;
};

/// Bottom-up assembly: leaves use the leaf prompt, every internal node the
/// node prompt with its children's code in reading order. Nodes run in waves
/// by subtree height; calls within a wave are concurrent. The root's code is
/// the document.
GenerationRun agent_generate(const Raster& raster, const SegmentTree& tree, ChatProvider& provider,
                             const PromptSet& prompts, std::string run_id = {});

/// All leaves concurrently, then one final call on the grid scaffold and the
/// full screenshot.
GenerationRun rule_generate(const Raster& raster, const SegmentTree& tree, ChatProvider& provider,
                            const PromptSet& prompts, std::string run_id = {});

GenerationRun generate(AssemblyMode mode, const Raster& raster, const SegmentTree& tree,
                       ChatProvider& provider, const PromptSet& prompts, std::string run_id = {});

struct Regeneration {
  HtmlDocument document;
  CodeFragment fragment;
  /// Ids of re-issued calls in issue order; rule mode ends with "final".
  std::vector<std::string> reissued;
};

/// Re-issues the call for one segment and whatever depends on it: in rule mode
/// the final call (the segment must be a leaf); in agent mode every ancestor
/// up to the root. `run` is updated only when every call succeeds.
Regeneration regenerate_segment(GenerationRun& run, const Raster& raster,
                                std::string_view segment_id, ChatProvider& provider,
                                const PromptSet& prompts);

}  // namespace pagesplit
