#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "pagesplit/config.hpp"
#include "pagesplit/errors.hpp"
#include "pagesplit/pipeline.hpp"
#include "pagesplit/raster.hpp"
#include "pagesplit/segment_tree.hpp"

namespace pagesplit {

enum class RunStatus { running, complete, failed };

std::string_view to_string(RunStatus s) noexcept;
RunStatus parse_run_status(std::string_view text);

class RunNotFoundError : public Error {
 public:
  using Error::Error;
};

/// manifest.json. `fragments` holds the metadata of the current version of
/// every segment fragment; `final` that of the current final.html.
struct RunManifest {
  static constexpr int kSchemaVersion = 1;

  std::string run_id;
  std::string created_at;  // ISO 8601 UTC
  AssemblyMode mode = AssemblyMode::agent;
  nlohmann::json config;   // Settings::to_json snapshot
  RunStatus status = RunStatus::running;
  std::optional<std::string> failure_detail;
  std::optional<std::string> failed_segment;
  std::map<std::string, CodeFragment> fragments;
  std::optional<CodeFragment> final;

  /// Only running -> complete and running -> failed are allowed.
  void transition(RunStatus next);

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

/// Random UUID (version 4).
std::string new_run_id();

/// Current UTC time, e.g. "2024-05-01T12:00:00Z".
std::string utc_timestamp();

/// Filesystem store: one directory per run under `root`.
///
///   manifest.json, input.png, tree.json, overlay.png, mock.json (optional)
///   segments/{id}.png
///   fragments/{id}.html (version 1), fragments/{id}.v{N}.html (later versions)
///   scaffold.html (rule mode), final.html (current), final.v{N}.html
///   stats.json
///
/// Every file is written to a temporary sibling and renamed into place.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path dir(std::string_view run_id) const;
  bool exists(std::string_view run_id) const;

  /// Creates the run directory; throws Error when it already exists or the
  /// id is not a plain name.
  void create(const RunManifest& manifest) const;

  RunManifest load_manifest(std::string_view run_id) const;
  void save_manifest(const RunManifest& manifest) const;

  void write_input(std::string_view run_id, const Raster& raster) const;
  Raster load_input(std::string_view run_id) const;
  void write_tree(std::string_view run_id, const SegmentTree& tree) const;
  SegmentTree load_tree(std::string_view run_id) const;
  /// overlay.png and segments/{id}.png for every node.
  void write_segments(std::string_view run_id, const Raster& raster, const SegmentTree& tree) const;

  static std::string fragment_file(std::string_view segment_id, int version);
  void write_fragment(std::string_view run_id, const CodeFragment& fragment) const;
  std::string read_fragment(std::string_view run_id, std::string_view segment_id, int version) const;

  void write_scaffold(std::string_view run_id, std::string_view html) const;
  /// Writes final.v{version}.html, then replaces final.html.
  void write_final(std::string_view run_id, std::string_view html, int version) const;
  std::optional<std::string> read_final(std::string_view run_id) const;

  void write_stats(std::string_view run_id, const PipelineStats& stats) const;
  void write_text(std::string_view run_id, std::string_view name, std::string_view text) const;
  std::optional<std::string> read_text(std::string_view run_id, std::string_view name) const;

  /// Reassembles a complete run for regeneration.
  GenerationRun load_run(std::string_view run_id) const;

 private:
  std::filesystem::path root_;
};

/// Creates the run and writes the manifest (status running), input.png,
/// tree.json, overlay.png and the segment crops.
void prepare_run(const RunStore& store, const RunManifest& manifest, const Raster& raster,
                 const SegmentTree& tree);

/// Runs the pipeline on a prepared run and persists fragments, scaffold,
/// final.html, stats and the completed manifest. On failure the partial
/// fragments are written, the manifest is marked failed and the error is
/// rethrown.
GenerationRun execute_run(const RunStore& store, std::string_view run_id, ChatProvider& provider,
                          const PromptSet& prompts);

/// Regenerates one segment of a complete run and records the new versions.
Regeneration regenerate_in_store(const RunStore& store, std::string_view run_id,
                                 std::string_view segment_id, ChatProvider& provider,
                                 const PromptSet& prompts);

}  // namespace pagesplit
