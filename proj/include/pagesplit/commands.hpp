#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "pagesplit/config.hpp"
#include "pagesplit/metrics.hpp"
#include "pagesplit/mock_provider.hpp"
#include "pagesplit/provider.hpp"

namespace pagesplit {

/// Provider for a run: the mock script when given, else the HTTP transport.
/// Either way wrapped with retries and the process-wide concurrency gate for
/// the model settings. `debug_log` receives redacted wire logs.
std::shared_ptr<ChatProvider> make_provider(const ModelConfig& model,
                                            const std::optional<MockScript>& mock,
                                            std::function<void(const std::string&)> debug_log = {});

struct SegmentArgs {
  std::filesystem::path image;
  Settings settings;
  std::optional<std::string> run_id;  // random UUID when absent
};

struct GenerateArgs {
  std::filesystem::path image;
  Settings settings;
  std::optional<std::string> run_id;
  std::optional<std::filesystem::path> mock;
  bool debug = false;
};

struct EvaluateArgs {
  EvaluationInputs inputs;
  std::filesystem::path out = "metrics.json";
  /// Command template with {html} and {png}; renders generated_html into a
  /// screenshot when generated_png is absent.
  std::optional<std::string> renderer;
};

/// Each command writes a tab-separated key/value table to `out`, diagnostics
/// to `err`, and returns the process exit status.
int cmd_segment(const SegmentArgs& args, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);

}  // namespace pagesplit
