#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pagesplit/errors.hpp"
#include "pagesplit/types.hpp"

namespace pagesplit {

/// One multimodal generation request.
struct ChatRequest {
  PromptRole role = PromptRole::leaf;
  std::string segment_id;
  int version = 1;  // fragment version this call produces
  std::string prompt_text;
  std::vector<std::uint8_t> image_png;
  std::vector<std::string> child_code;  // reading order; empty for leaves
};

struct TokenUsage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
};

struct ChatResponse {
  std::string raw_text;
  std::string extracted_html;
  TokenUsage usage;
  double latency_ms = 0.0;
  int attempts = 1;
  bool truncated = false;  // finish reason "length"
  std::string model;
};

/// Transport or provider-side failure. `status` is the HTTP status, or 0 for
/// transport errors.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& message, int status, bool retryable, int attempts = 1)
      : Error(message), status_(status), retryable_(retryable), attempts_(attempts) {}

  int status() const noexcept { return status_; }
  bool retryable() const noexcept { return retryable_; }
  int attempts() const noexcept { return attempts_; }

 private:
  int status_;
  bool retryable_;
  int attempts_;
};

/// The mock provider has no scripted answer for a request.
class ScriptGapError : public ProviderError {
 public:
  explicit ScriptGapError(const std::string& message) : ProviderError(message, 0, false) {}
};

/// Retry policy shared by all transports: transport errors, 429 and 5xx retry;
/// everything else (including 401/403) does not.
bool is_retryable_status(int status) noexcept;

/// Throws ProviderError when leaf requests carry child code or node/final
/// requests carry none.
void validate_request(const ChatRequest& request);

/// Contents of the first ```html fence, else of the first fence of any label,
/// else the trimmed input. Fence contents are trimmed too.
std::string extract_code(std::string_view raw);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

std::string base64_encode(std::span<const std::uint8_t> bytes);

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;

  /// One chat completion. Throws ProviderError.
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

}  // namespace pagesplit
