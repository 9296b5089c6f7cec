#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pagesplit/provider.hpp"

namespace pagesplit {

/// One scripted reply: either text or a failure status.
struct ScriptedReply {
  std::string text;
  int status = 200;
  std::string finish_reason = "stop";
};

/// Deterministic provider script.
///
/// JSON form:
///   {"mode": "echo" | "by_hash" | "sequence",
///    "latency_ms": 0,
///    "echo": {"leaf": "...", "node": "...", "final": "..."},
///    "responses": {"<sha256 of image png>": "raw text" | {reply}},
///    "sequence": ["raw text" | {"text": "...", "status": 500, "finish_reason": "length"}],
///    "fail_first": 0, "fail_status": 500}
///
/// Echo templates expand {id}, {role}, {version} and {children} (child code
/// joined by newlines). fail_first < 0 fails every call.
struct MockScript {
  enum class Mode { echo, by_hash, sequence };

  Mode mode = Mode::echo;
  int latency_ms = 0;
  std::string echo_leaf = "<!--seg:{id}-->";
  std::string echo_node = "<div data-seg=\"{id}\">\n{children}\n</div>";
  std::string echo_final = "{children}";
  std::map<std::string, ScriptedReply> by_hash;
  std::vector<ScriptedReply> sequence;
  int fail_first = 0;
  int fail_status = 500;

  /// Throws Error when the script is empty or malformed.
  static MockScript from_json(const nlohmann::json& j);
  static MockScript load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

struct MockCall {
  std::size_t order = 0;
  PromptRole role = PromptRole::leaf;
  std::string segment_id;
  int version = 1;
  std::string image_hash;
  std::vector<std::string> child_code;
  double latency_ms = 0.0;
  bool failed = false;
};

/// Scripted provider. Safe to call concurrently; the call log is ordered by
/// arrival.
class MockProvider final : public ChatProvider {
 public:
  explicit MockProvider(MockScript script);

  ChatResponse complete(const ChatRequest& request) override;

  std::vector<MockCall> calls() const;
  std::size_t call_count() const;
  /// Highest number of simultaneously executing complete() calls observed.
  int peak_concurrency() const noexcept { return peak_.load(); }

 private:
  ScriptedReply next_reply(const ChatRequest& request, const std::string& hash,
                           std::size_t order);

  MockScript script_;
  mutable std::mutex mu_;
  std::vector<MockCall> calls_;
  std::size_t sequence_pos_ = 0;
  std::atomic<int> active_{0};
  std::atomic<int> peak_{0};
};

}  // namespace pagesplit
