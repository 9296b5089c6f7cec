#include "pagesplit/run_store.hpp"

#include <chrono>
#include <ctime>

#include <boost/uuid/random_generator.hpp>
#include <boost/uuid/uuid_io.hpp>

#include "pagesplit/image_io.hpp"
#include "pagesplit/segmenter.hpp"
#include "pagesplit/text.hpp"

namespace pagesplit {
namespace fs = std::filesystem;

namespace {

bool plain_name(std::string_view id) {
  if (id.empty() || id == "." || id == "..") return false;
  for (const char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string_view to_string(RunStatus s) noexcept {
  switch (s) {
    case RunStatus::running:
      return "running";
    case RunStatus::complete:
      return "complete";
    case RunStatus::failed:
      break;
  }
  return "failed";
}

RunStatus parse_run_status(std::string_view text) {
  if (text == "running") return RunStatus::running;
  if (text == "complete") return RunStatus::complete;
  if (text == "failed") return RunStatus::failed;
  throw Error("unknown run status '" + std::string(text) + "'");
}

void RunManifest::transition(RunStatus next) {
  if (status != RunStatus::running || next == RunStatus::running) {
    throw Error("run " + run_id + ": cannot move from " + std::string(to_string(status)) + " to " +
                std::string(to_string(next)));
  }
  status = next;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json frags = nlohmann::json::object();
  for (const auto& [id, f] : fragments) frags[id] = f.to_json();
  nlohmann::json j = {
      {"schema", kSchemaVersion},
      {"run_id", run_id},
      {"created_at", created_at},
      {"mode", std::string(pagesplit::to_string(mode))},
      {"config", config},
      {"status", std::string(pagesplit::to_string(status))},
      {"failure_detail", failure_detail ? nlohmann::json(*failure_detail) : nlohmann::json()},
      {"failed_segment", failed_segment ? nlohmann::json(*failed_segment) : nlohmann::json()},
      {"fragments", frags},
      {"final", final ? final->to_json() : nlohmann::json()},
  };
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  if (j.at("schema").get<int>() != kSchemaVersion) {
    throw Error("unsupported manifest schema " + j.at("schema").dump());
  }
  RunManifest m;
  m.run_id = j.at("run_id").get<std::string>();
  m.created_at = j.at("created_at").get<std::string>();
  m.mode = parse_assembly_mode(j.at("mode").get<std::string>());
  m.config = j.at("config");
  m.status = parse_run_status(j.at("status").get<std::string>());
  if (j.contains("failure_detail") && j["failure_detail"].is_string()) {
    m.failure_detail = j["failure_detail"].get<std::string>();
  }
  if (j.contains("failed_segment") && j["failed_segment"].is_string()) {
    m.failed_segment = j["failed_segment"].get<std::string>();
  }
  for (const auto& [id, f] : j.at("fragments").items()) m.fragments.emplace(id, CodeFragment::from_json(f));
  if (j.contains("final") && j["final"].is_object()) m.final = CodeFragment::from_json(j["final"]);
  return m;
}

std::string new_run_id() {
  thread_local boost::uuids::random_generator gen;
  return boost::uuids::to_string(gen());
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunStore::RunStore(fs::path root) : root_(std::move(root)) {}

fs::path RunStore::dir(std::string_view run_id) const {
  if (!plain_name(run_id)) throw RunNotFoundError("invalid run id '" + std::string(run_id) + "'");
  return root_ / std::string(run_id);
}

bool RunStore::exists(std::string_view run_id) const {
  return plain_name(run_id) && fs::exists(root_ / std::string(run_id) / "manifest.json");
}

void RunStore::create(const RunManifest& manifest) const {
  const auto d = dir(manifest.run_id);
  fs::create_directories(root_);
  if (!fs::create_directory(d)) throw Error("run directory already exists: " + d.string());
  fs::create_directory(d / "segments");
  fs::create_directory(d / "fragments");
  save_manifest(manifest);
}

RunManifest RunStore::load_manifest(std::string_view run_id) const {
  if (!exists(run_id)) throw RunNotFoundError("unknown run '" + std::string(run_id) + "'");
  return RunManifest::from_json(nlohmann::json::parse(read_text_file(dir(run_id) / "manifest.json")));
}

void RunStore::save_manifest(const RunManifest& manifest) const {
  write_file_atomic(dir(manifest.run_id) / "manifest.json", dump(manifest.to_json()));
}

void RunStore::write_input(std::string_view run_id, const Raster& raster) const {
  save_png(raster, dir(run_id) / "input.png");
}

Raster RunStore::load_input(std::string_view run_id) const {
  return load_raster(dir(run_id) / "input.png");
}

void RunStore::write_tree(std::string_view run_id, const SegmentTree& tree) const {
  write_file_atomic(dir(run_id) / "tree.json", dump(tree.to_json()));
}

SegmentTree RunStore::load_tree(std::string_view run_id) const {
  return SegmentTree::from_json(nlohmann::json::parse(read_text_file(dir(run_id) / "tree.json")));
}

void RunStore::write_segments(std::string_view run_id, const Raster& raster,
                              const SegmentTree& tree) const {
  const auto d = dir(run_id);
  save_png(render_overlay(raster, tree), d / "overlay.png");
  for (const auto& [id, node] : tree.nodes()) save_png(crop(raster, node.region), d / "segments" / (id + ".png"));
}

std::string RunStore::fragment_file(std::string_view segment_id, int version) {
  std::string name(segment_id);
  if (version > 1) name += ".v" + std::to_string(version);
  return name + ".html";
}

void RunStore::write_fragment(std::string_view run_id, const CodeFragment& fragment) const {
  write_file_atomic(dir(run_id) / "fragments" / fragment_file(fragment.segment_id, fragment.version),
                    fragment.html);
}

std::string RunStore::read_fragment(std::string_view run_id, std::string_view segment_id,
                                    int version) const {
  return read_text_file(dir(run_id) / "fragments" / fragment_file(segment_id, version));
}

void RunStore::write_scaffold(std::string_view run_id, std::string_view html) const {
  write_file_atomic(dir(run_id) / "scaffold.html", html);
}

void RunStore::write_final(std::string_view run_id, std::string_view html, int version) const {
  const auto d = dir(run_id);
  write_file_atomic(d / ("final.v" + std::to_string(version) + ".html"), html);
  write_file_atomic(d / "final.html", html);
}

std::optional<std::string> RunStore::read_final(std::string_view run_id) const {
  return read_text(run_id, "final.html");
}

void RunStore::write_stats(std::string_view run_id, const PipelineStats& stats) const {
  write_file_atomic(dir(run_id) / "stats.json", dump(stats.to_json()));
}

void RunStore::write_text(std::string_view run_id, std::string_view name,
                          std::string_view text) const {
  write_file_atomic(dir(run_id) / std::string(name), text);
}

std::optional<std::string> RunStore::read_text(std::string_view run_id, std::string_view name) const {
  const auto p = dir(run_id) / std::string(name);
  if (!fs::exists(p)) return std::nullopt;
  return read_text_file(p);
}

GenerationRun RunStore::load_run(std::string_view run_id) const {
  const auto m = load_manifest(run_id);
  if (m.status != RunStatus::complete || !m.final) {
    throw Error("run " + m.run_id + " is " + std::string(to_string(m.status)) +
                "; only complete runs can be regenerated");
  }
  GenerationRun run{m.run_id, m.mode, load_tree(run_id), {}, std::nullopt, *m.final, {}, {}};
  for (const auto& [id, meta] : m.fragments) {
    CodeFragment f = meta;
    f.html = read_fragment(run_id, id, f.version);
    run.fragments.emplace(id, std::move(f));
  }
  run.scaffold_html = read_text(run_id, "scaffold.html");
  run.final_fragment.html = read_text_file(dir(run_id) / ("final.v" + std::to_string(m.final->version) + ".html"));
  run.document = {run.final_fragment.html, m.run_id};
  if (const auto stats = read_text(run_id, "stats.json")) {
    run.stats = PipelineStats::from_json(nlohmann::json::parse(*stats));
  }
  return run;
}

void prepare_run(const RunStore& store, const RunManifest& manifest, const Raster& raster,
                 const SegmentTree& tree) {
  store.create(manifest);
  store.write_input(manifest.run_id, raster);
  store.write_tree(manifest.run_id, tree);
  store.write_segments(manifest.run_id, raster, tree);
}

GenerationRun execute_run(const RunStore& store, std::string_view run_id, ChatProvider& provider,
                          const PromptSet& prompts) {
  auto manifest = store.load_manifest(run_id);
  const auto fail = [&](const std::string& detail, std::optional<std::string> segment) {
    manifest.failure_detail = detail;
    manifest.failed_segment = std::move(segment);
    manifest.transition(RunStatus::failed);
    store.save_manifest(manifest);
  };
  try {
    const Raster raster = store.load_input(run_id);
    const SegmentTree tree = store.load_tree(run_id);
    auto run = generate(manifest.mode, raster, tree, provider, prompts, manifest.run_id);
    for (const auto& [id, f] : run.fragments) {
      store.write_fragment(run_id, f);
      manifest.fragments[id] = f;
    }
    if (run.scaffold_html) store.write_scaffold(run_id, *run.scaffold_html);
    store.write_final(run_id, run.document.html, run.final_fragment.version);
    store.write_stats(run_id, run.stats);
    manifest.final = run.final_fragment;
    manifest.transition(RunStatus::complete);
    store.save_manifest(manifest);
    return run;
  } catch (const GenerationError& e) {
    for (const auto& [id, f] : e.partial()) {
      store.write_fragment(run_id, f);
      manifest.fragments[id] = f;
    }
    fail(e.what(), e.failed_segment());
    throw;
  } catch (const std::exception& e) {
    if (manifest.status == RunStatus::running) fail(e.what(), std::nullopt);
    throw;
  }
}

Regeneration regenerate_in_store(const RunStore& store, std::string_view run_id,
                                 std::string_view segment_id, ChatProvider& provider,
                                 const PromptSet& prompts) {
  auto run = store.load_run(run_id);
  const Raster raster = store.load_input(run_id);
  auto regen = regenerate_segment(run, raster, segment_id, provider, prompts);

  auto manifest = store.load_manifest(run_id);
  for (const auto& id : regen.reissued) {
    if (id == "final") continue;
    const auto& f = run.fragments.at(id);
    store.write_fragment(run_id, f);
    manifest.fragments[id] = f;
  }
  if (run.scaffold_html) store.write_scaffold(run_id, *run.scaffold_html);
  store.write_final(run_id, run.document.html, run.final_fragment.version);
  manifest.final = run.final_fragment;
  store.save_manifest(manifest);
  return regen;
}

}  // namespace pagesplit
