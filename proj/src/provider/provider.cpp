#include "pagesplit/provider.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include <openssl/evp.h>

#include "pagesplit/text.hpp"

namespace pagesplit {
namespace {

struct Fence {
  std::string label;
  std::string body;
};

std::vector<Fence> find_fences(std::string_view raw) {
  std::vector<Fence> fences;
  std::optional<Fence> open;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    const auto eol = raw.find('\n', pos);
    const auto line = raw.substr(pos, eol == std::string_view::npos ? raw.size() - pos : eol - pos);
    const auto stripped = trim(line);
    const bool fence_line = stripped.substr(0, 3) == "```";
    if (open) {
      if (fence_line) {
        fences.push_back(std::move(*open));
        open.reset();
      } else {
        if (!open->body.empty()) open->body += '\n';
        open->body += line;
      }
    } else if (fence_line) {
      open = Fence{std::string(trim(stripped.substr(3))), {}};
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  if (open) fences.push_back(std::move(*open));
  return fences;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

bool is_retryable_status(int status) noexcept {
  return status == 0 || status == 429 || (status >= 500 && status <= 599);
}

void validate_request(const ChatRequest& request) {
  if (request.role == PromptRole::leaf && !request.child_code.empty()) {
    throw ProviderError("leaf request for '" + request.segment_id + "' carries child code", 0,
                        false);
  }
  if (request.role != PromptRole::leaf && request.child_code.empty()) {
    throw ProviderError(std::string(to_string(request.role)) + " request for '" +
                            request.segment_id + "' has no child code",
                        0, false);
  }
}

std::string extract_code(std::string_view raw) {
  const auto fences = find_fences(raw);
  if (fences.empty()) return std::string(trim(raw));
  for (const auto& f : fences) {
    if (lower(f.label) == "html") return std::string(trim(f.body));
  }
  return std::string(trim(fences.front().body));
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

}  // namespace pagesplit
