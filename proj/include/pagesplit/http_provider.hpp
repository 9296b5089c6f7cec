#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "pagesplit/config.hpp"
#include "pagesplit/provider.hpp"

namespace pagesplit {

/// Chat-completions JSON body for one request: a user message with a text part
/// and an image_url part carrying the PNG as a base64 data URL.
nlohmann::json build_chat_body(const ModelConfig& model, const ChatRequest& request);

/// Parses a chat-completions response body. Throws ProviderError on a
/// malformed body.
ChatResponse parse_chat_response(const std::string& body);

/// Copy of a request body with image data URLs shortened, for debug logs.
nlohmann::json redact_body(nlohmann::json body);

/// Single-attempt HTTP(S) chat-completions client. Wrap in ResilientProvider
/// for retries and the concurrency gate.
class HttpChatProvider final : public ChatProvider {
 public:
  using Logger = std::function<void(const std::string&)>;

  /// The API key is read from the environment variable named by
  /// model.api_key_env at construction; an unset variable sends no key.
  explicit HttpChatProvider(ModelConfig model, Logger debug_log = nullptr);

  ChatResponse complete(const ChatRequest& request) override;

 private:
  ModelConfig model_;
  std::string api_key_;
  std::string scheme_host_port_;
  std::string path_;
  Logger log_;
};

}  // namespace pagesplit
