// pagesplit: segment | generate | evaluate | serve

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "pagesplit/commands.hpp"
#include "pagesplit/service.hpp"
#include "pagesplit/text.hpp"

using namespace pagesplit;
namespace fs = std::filesystem;

namespace {

// Every config key, exposed as --<key with dashes>.
constexpr const char* kConfigKeys[] = {
    "separation.window_size", "separation.var_thr",      "separation.diff_thr",
    "separation.portion_thr", "separation.max_depth",    "model.endpoint",
    "model.model_name",       "model.temperature",       "model.max_output_tokens",
    "model.api_key_env",      "model.concurrency_limit", "model.retry_budget",
    "model.backoff_base_ms",  "model.max_image_bytes",   "model.timeout_s",
    "pipeline.mode",          "pipeline.prompts_dir",    "pipeline.runs_root",
};

struct ConfigFlags {
  std::optional<fs::path> file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "INI config file")->check(CLI::ExistingFile);
    app->add_option("--set", sets, "Override a config key (section.key=value)");
    for (const std::string key : kConfigKeys) {
      const auto name = key.substr(key.find('.') + 1);
      app->add_option("--" + replace_all(name, "_", "-"), flags[key], key);
    }
  }

  Settings settings() const {
    ConfigOverrides o;
    for (const auto& [key, value] : flags) {
      if (!value.empty()) o[key] = value;
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError(s, "expected section.key=value");
      o[s.substr(0, eq)] = s.substr(eq + 1);
    }
    return load_config(file, o);
  }
};

int serve(const Settings& settings, const std::string& host, int port, bool debug) {
  // Block the signals before any thread starts so only sigwait sees them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  ServiceOptions opts;
  opts.settings = settings;
  opts.debug = debug;
  Service service(opts);
  const int bound = service.start(host, port);
  std::cout << "listening\thttp://" << host << ':' << bound << '\n'
            << "runs_root\t" << settings.pipeline.runs_root << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  service.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Screenshot to HTML by recursive segmentation"};
  app.require_subcommand(1);
  bool debug = false;
  app.add_flag("--debug", debug, "Log provider traffic (API key redacted) to stderr");

  ConfigFlags seg_cfg, gen_cfg, srv_cfg, eval_cfg;
  fs::path seg_image, gen_image;
  std::optional<std::string> seg_run_id, gen_run_id;
  std::optional<fs::path> mock;

  auto* seg = app.add_subcommand("segment", "Split a screenshot into a segment tree");
  seg->add_option("image", seg_image, "Screenshot (PNG or JPEG)")->required()->check(CLI::ExistingFile);
  seg->add_option("--run-id", seg_run_id, "Run directory name");
  seg_cfg.attach(seg);

  auto* gen = app.add_subcommand("generate", "Segment a screenshot and generate HTML");
  gen->add_option("image", gen_image, "Screenshot (PNG or JPEG)")->required()->check(CLI::ExistingFile);
  gen->add_option("--run-id", gen_run_id, "Run directory name");
  gen->add_option("--mock", mock, "Mock provider script (JSON)")->check(CLI::ExistingFile);
  gen_cfg.attach(gen);

  EvaluateArgs eval_args;
  std::optional<double> clip;
  auto* ev = app.add_subcommand("evaluate", "Score generated HTML against a reference");
  ev->add_option("--original-html", eval_args.inputs.original_html);
  ev->add_option("--generated-html", eval_args.inputs.generated_html);
  ev->add_option("--original-png", eval_args.inputs.original_png);
  ev->add_option("--generated-png", eval_args.inputs.generated_png);
  ev->add_option("--ref-blocks", eval_args.inputs.ref_blocks, "Blocks extracted from the original page");
  ev->add_option("--gen-blocks", eval_args.inputs.gen_blocks, "Blocks extracted from the generated page");
  ev->add_option("--gt-boxes", eval_args.inputs.gt_boxes, "Ground-truth segment boxes");
  ev->add_option("--tree", eval_args.inputs.tree, "tree.json; otherwise the original png is segmented");
  ev->add_option("--clip-score", clip, "CLIP score computed elsewhere, copied into the report");
  ev->add_option("--require", eval_args.inputs.required,
                 "Metrics that must be produced: code_similarity, block, mean_iou, separation_rate");
  ev->add_option("--out", eval_args.out, "Report path")->capture_default_str();
  ev->add_option("--renderer", eval_args.renderer,
                 "Command template with {html} and {png} that screenshots the generated html");
  eval_cfg.attach(ev);

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* srv = app.add_subcommand("serve", "Serve the HTTP API");
  srv->add_option("--host", host)->capture_default_str();
  srv->add_option("--port", port)->capture_default_str();
  srv_cfg.attach(srv);

  CLI11_PARSE(app, argc, argv);

  try {
    if (seg->parsed()) {
      return cmd_segment({seg_image, seg_cfg.settings(), seg_run_id}, std::cout, std::cerr);
    }
    if (gen->parsed()) {
      return cmd_generate({gen_image, gen_cfg.settings(), gen_run_id, mock, debug}, std::cout, std::cerr);
    }
    if (ev->parsed()) {
      eval_args.inputs.separation = eval_cfg.settings().separation;
      eval_args.inputs.clip_score = clip;
      return cmd_evaluate(eval_args, std::cout, std::cerr);
    }
    return serve(srv_cfg.settings(), host, port, debug);
  } catch (const std::exception& e) {
    std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what() << '\n';
    return 1;
  }
}
