#include "pagesplit/commands.hpp"

#include <cstdlib>
#include <iomanip>

#include "pagesplit/http_provider.hpp"
#include "pagesplit/image_io.hpp"
#include "pagesplit/resilience.hpp"
#include "pagesplit/run_store.hpp"
#include "pagesplit/segmenter.hpp"
#include "pagesplit/text.hpp"

namespace pagesplit {
namespace fs = std::filesystem;

namespace {

std::string fixed6(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << v;
  return s.str();
}

void row(std::ostream& out, std::string_view key, std::string_view value) {
  out << key << '\t' << value << '\n';
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

RunManifest new_manifest(const Settings& settings, const std::optional<std::string>& run_id) {
  RunManifest m;
  m.run_id = run_id ? *run_id : new_run_id();
  m.created_at = utc_timestamp();
  m.mode = settings.pipeline.mode;
  m.config = settings.to_json();
  return m;
}

PromptSet prompts_for(const Settings& settings) {
  return settings.pipeline.prompts_dir.empty() ? PromptSet::defaults()
                                               : PromptSet::load(settings.pipeline.prompts_dir);
}

}  // namespace

std::shared_ptr<ChatProvider> make_provider(const ModelConfig& model,
                                            const std::optional<MockScript>& mock,
                                            std::function<void(const std::string&)> debug_log) {
  std::shared_ptr<ChatProvider> inner;
  if (mock) inner = std::make_shared<MockProvider>(*mock);
  else inner = std::make_shared<HttpChatProvider>(model, std::move(debug_log));
  return std::make_shared<ResilientProvider>(std::move(inner), model.retry_budget,
                                             std::chrono::milliseconds(model.backoff_base_ms),
                                             ConcurrencyGate::shared_for(model));
}

int cmd_segment(const SegmentArgs& args, std::ostream& out, std::ostream& err) {
  try {
    args.settings.validate();
    const Raster raster = load_raster(args.image);
    const SegmentTree tree = build_tree(raster, args.settings.separation);
    RunStore store(args.settings.pipeline.runs_root);
    auto manifest = new_manifest(args.settings, args.run_id);
    prepare_run(store, manifest, raster, tree);
    manifest.transition(RunStatus::complete);
    store.save_manifest(manifest);

    row(out, "run_id", manifest.run_id);
    row(out, "run_dir", store.dir(manifest.run_id).string());
    row(out, "node_count", std::to_string(tree.size()));
    row(out, "leaf_count", std::to_string(tree.leaves().size()));
    row(out, "depth", std::to_string(tree.height()));
    row(out, "separation_rate", fixed6(separation_rate(tree)));
    return 0;
  } catch (const std::exception& e) {
    err << "segment: " << e.what() << '\n';
    return 1;
  }
}

int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
  std::optional<RunStore> store;
  std::string run_id;
  try {
    args.settings.validate();
    std::optional<MockScript> mock;
    if (args.mock) mock = MockScript::load(*args.mock);
    const Raster raster = load_raster(args.image);
    const SegmentTree tree = build_tree(raster, args.settings.separation);
    const PromptSet prompts = prompts_for(args.settings);
    std::function<void(const std::string&)> log;
    if (args.debug) log = [&err](const std::string& line) { err << "[debug] " << line << '\n'; };
    auto provider = make_provider(args.settings.model, mock, log);

    store.emplace(args.settings.pipeline.runs_root);
    const auto manifest = new_manifest(args.settings, args.run_id);
    run_id = manifest.run_id;
    prepare_run(*store, manifest, raster, tree);
    if (mock) store->write_text(run_id, "mock.json", mock->to_json().dump(2) + "\n");

    const auto run = execute_run(*store, run_id, *provider, prompts);
    row(out, "run_id", run_id);
    row(out, "run_dir", store->dir(run_id).string());
    row(out, "mode", std::string(to_string(run.mode)));
    row(out, "status", "complete");
    row(out, "leaf_count", std::to_string(tree.leaves().size()));
    row(out, "total_calls", std::to_string(run.stats.total_calls));
    row(out, "final_html", (store->dir(run_id) / "final.html").string());
    return 0;
  } catch (const std::exception& e) {
    if (!run_id.empty()) {
      row(out, "run_id", run_id);
      row(out, "status", "failed");
    }
    err << "generate: " << e.what() << '\n';
    return 1;
  }
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    EvaluationInputs inputs = args.inputs;
    if (args.renderer && !inputs.generated_png) {
      if (!inputs.generated_html) {
        throw EvaluationError("the renderer needs the generated html file, which was not given");
      }
      const fs::path png = fs::absolute(args.out).parent_path() / "generated.png";
      fs::create_directories(png.parent_path());
      std::string cmd = replace_all(*args.renderer, "{html}", shell_quote(inputs.generated_html->string()));
      cmd = replace_all(std::move(cmd), "{png}", shell_quote(png.string()));
      if (std::system(cmd.c_str()) != 0 || !fs::exists(png)) {
        throw EvaluationError("renderer failed: " + cmd);
      }
      inputs.generated_png = png;
    }

    const auto report = build_report(inputs);
    const auto j = report.to_json();
    if (args.out.has_parent_path()) fs::create_directories(args.out.parent_path());
    write_file_atomic(args.out, j.dump(2) + "\n");
    for (const auto& [key, value] : j.items()) row(out, key, fixed6(value.get<double>()));
    if (inputs.generated_png) row(out, "generated_screenshot", inputs.generated_png->string());
    row(out, "metrics_json", args.out.string());
    return 0;
  } catch (const std::exception& e) {
    err << "evaluate: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace pagesplit
