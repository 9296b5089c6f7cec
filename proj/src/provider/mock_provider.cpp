#include "pagesplit/mock_provider.hpp"

#include <chrono>
#include <thread>

#include "pagesplit/text.hpp"

namespace pagesplit {
namespace {

ScriptedReply reply_from_json(const nlohmann::json& j) {
  if (j.is_string()) return {j.get<std::string>(), 200, "stop"};
  ScriptedReply r;
  r.text = j.value("text", "");
  r.status = j.value("status", 200);
  r.finish_reason = j.value("finish_reason", "stop");
  return r;
}

nlohmann::json reply_to_json(const ScriptedReply& r) {
  return {{"text", r.text}, {"status", r.status}, {"finish_reason", r.finish_reason}};
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += '\n';
    out += parts[i];
  }
  return out;
}

}  // namespace

MockScript MockScript::from_json(const nlohmann::json& j) {
  MockScript s;
  try {
    const auto mode = j.value("mode", "echo");
    if (mode == "echo") {
      s.mode = Mode::echo;
    } else if (mode == "by_hash") {
      s.mode = Mode::by_hash;
    } else if (mode == "sequence") {
      s.mode = Mode::sequence;
    } else {
      throw Error("mock script: unknown mode '" + mode + "'");
    }
    s.latency_ms = j.value("latency_ms", 0);
    if (j.contains("echo")) {
      const auto& e = j["echo"];
      s.echo_leaf = e.value("leaf", s.echo_leaf);
      s.echo_node = e.value("node", s.echo_node);
      s.echo_final = e.value("final", s.echo_final);
    }
    if (j.contains("responses")) {
      for (const auto& [hash, reply] : j["responses"].items()) s.by_hash[hash] = reply_from_json(reply);
    }
    if (j.contains("sequence")) {
      for (const auto& reply : j["sequence"]) s.sequence.push_back(reply_from_json(reply));
    }
    s.fail_first = j.value("fail_first", 0);
    s.fail_status = j.value("fail_status", 500);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("mock script: ") + e.what());
  }
  if (s.latency_ms < 0) throw Error("mock script: latency_ms must be >= 0");
  if (s.mode == Mode::by_hash && s.by_hash.empty()) {
    throw Error("mock script: by_hash mode needs at least one response");
  }
  if (s.mode == Mode::sequence && s.sequence.empty()) {
    throw Error("mock script: sequence mode needs at least one response");
  }
  return s;
}

MockScript MockScript::load(const std::filesystem::path& path) {
  try {
    return from_json(nlohmann::json::parse(read_text_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error("mock script " + path.string() + ": " + e.what());
  }
}

nlohmann::json MockScript::to_json() const {
  nlohmann::json j;
  j["mode"] = mode == Mode::echo ? "echo" : mode == Mode::by_hash ? "by_hash" : "sequence";
  j["latency_ms"] = latency_ms;
  j["echo"] = {{"leaf", echo_leaf}, {"node", echo_node}, {"final", echo_final}};
  j["responses"] = nlohmann::json::object();
  for (const auto& [hash, reply] : by_hash) j["responses"][hash] = reply_to_json(reply);
  j["sequence"] = nlohmann::json::array();
  for (const auto& reply : sequence) j["sequence"].push_back(reply_to_json(reply));
  j["fail_first"] = fail_first;
  j["fail_status"] = fail_status;
  return j;
}

MockProvider::MockProvider(MockScript script) : script_(std::move(script)) {}

ScriptedReply MockProvider::next_reply(const ChatRequest& request, const std::string& hash,
                                       std::size_t order) {
  if (script_.fail_first < 0 || order < static_cast<std::size_t>(script_.fail_first)) {
    return {"", script_.fail_status, "stop"};
  }
  switch (script_.mode) {
    case MockScript::Mode::echo: {
      const std::string& tmpl = request.role == PromptRole::leaf   ? script_.echo_leaf
                                : request.role == PromptRole::node ? script_.echo_node
                                                                   : script_.echo_final;
      std::string text = replace_all(tmpl, "{id}", request.segment_id);
      text = replace_all(std::move(text), "{role}", to_string(request.role));
      text = replace_all(std::move(text), "{version}", std::to_string(request.version));
      text = replace_all(std::move(text), "{children}", join(request.child_code));
      return {std::move(text), 200, "stop"};
    }
    case MockScript::Mode::by_hash: {
      const auto it = script_.by_hash.find(hash);
      if (it == script_.by_hash.end()) {
        throw ScriptGapError("mock script has no reply for image " + hash + " (segment '" +
                             request.segment_id + "')");
      }
      return it->second;
    }
    case MockScript::Mode::sequence: {
      std::lock_guard lock(mu_);
      if (sequence_pos_ >= script_.sequence.size()) {
        throw ScriptGapError("mock script sequence exhausted after " +
                             std::to_string(script_.sequence.size()) + " replies");
      }
      return script_.sequence[sequence_pos_++];
    }
  }
  throw ScriptGapError("unreachable mock mode");
}

ChatResponse MockProvider::complete(const ChatRequest& request) {
  validate_request(request);
  const int now_active = ++active_;
  int prev = peak_.load();
  while (now_active > prev && !peak_.compare_exchange_weak(prev, now_active)) {
  }
  struct Leave {
    std::atomic<int>& a;
    ~Leave() { --a; }
  } leave{active_};

  const auto start = std::chrono::steady_clock::now();
  const std::string hash = sha256_hex(request.image_png);
  std::size_t order = 0;
  {
    std::lock_guard lock(mu_);
    order = calls_.size();
    calls_.push_back({order, request.role, request.segment_id, request.version, hash,
                      request.child_code, 0.0, false});
  }

  const auto finish = [&](bool failed) {
    if (script_.latency_ms > 0) {
      std::this_thread::sleep_until(start + std::chrono::milliseconds(script_.latency_ms));
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    std::lock_guard lock(mu_);
    calls_[order].latency_ms = ms;
    calls_[order].failed = failed;
    return ms;
  };

  ScriptedReply reply;
  try {
    reply = next_reply(request, hash, order);
  } catch (const ScriptGapError&) {
    finish(true);
    throw;
  }
  if (reply.status != 200) {
    finish(true);
    throw ProviderError("mock provider returned status " + std::to_string(reply.status),
                        reply.status, is_retryable_status(reply.status));
  }
  ChatResponse out;
  out.raw_text = reply.text;
  out.extracted_html = extract_code(reply.text);
  out.truncated = reply.finish_reason == "length";
  out.model = "mock";
  out.usage.prompt_tokens = static_cast<std::int64_t>(request.prompt_text.size() / 4);
  out.usage.completion_tokens = static_cast<std::int64_t>(reply.text.size() / 4);
  out.latency_ms = finish(false);
  return out;
}

std::vector<MockCall> MockProvider::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::size_t MockProvider::call_count() const {
  std::lock_guard lock(mu_);
  return calls_.size();
}

}  // namespace pagesplit
