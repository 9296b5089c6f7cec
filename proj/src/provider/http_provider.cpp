#include "pagesplit/http_provider.hpp"

#include <chrono>
#include <cstdlib>

#include <httplib.h>

namespace pagesplit {
namespace {

std::string content_text(const nlohmann::json& content) {
  if (content.is_string()) return content.get<std::string>();
  std::string out;
  if (content.is_array()) {
    for (const auto& part : content) {
      if (part.value("type", "") == "text") out += part.value("text", "");
    }
  }
  return out;
}

}  // namespace

nlohmann::json build_chat_body(const ModelConfig& model, const ChatRequest& request) {
  const std::string data_url = "data:image/png;base64," + base64_encode(request.image_png);
  return {
      {"model", model.model_name},
      {"temperature", model.temperature},
      {"max_tokens", model.max_output_tokens},
      {"messages",
       {{{"role", "user"},
         {"content",
          {{{"type", "text"}, {"text", request.prompt_text}},
           {{"type", "image_url"}, {"image_url", {{"url", data_url}}}}}}}}},
  };
}

ChatResponse parse_chat_response(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    const auto& choice = j.at("choices").at(0);
    ChatResponse out;
    out.raw_text = content_text(choice.at("message").at("content"));
    out.extracted_html = extract_code(out.raw_text);
    const auto finish = choice.value("finish_reason", nlohmann::json());
    out.truncated = finish.is_string() && finish.get<std::string>() == "length";
    out.model = j.value("model", "");
    if (j.contains("usage") && j["usage"].is_object()) {
      out.usage.prompt_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
      out.usage.completion_tokens = j["usage"].value("completion_tokens", std::int64_t{0});
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed chat response: ") + e.what(), 200, false);
  }
}

nlohmann::json redact_body(nlohmann::json body) {
  if (!body.contains("messages")) return body;
  for (auto& m : body["messages"]) {
    if (!m.contains("content") || !m["content"].is_array()) continue;
    for (auto& part : m["content"]) {
      if (part.value("type", "") != "image_url") continue;
      auto& url = part["image_url"]["url"];
      const auto s = url.get<std::string>();
      url = s.substr(0, std::min<std::size_t>(s.size(), 40)) + "...(" + std::to_string(s.size()) +
            " chars)";
    }
  }
  return body;
}

HttpChatProvider::HttpChatProvider(ModelConfig model, Logger debug_log)
    : model_(std::move(model)), log_(std::move(debug_log)) {
  if (const char* key = std::getenv(model_.api_key_env.c_str())) api_key_ = key;
  const auto scheme_end = model_.endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw ProviderError("endpoint must be an http(s) URL: " + model_.endpoint, 0, false);
  }
  const auto path_start = model_.endpoint.find('/', scheme_end + 3);
  scheme_host_port_ = model_.endpoint.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : model_.endpoint.substr(path_start);
}

ChatResponse HttpChatProvider::complete(const ChatRequest& request) {
  validate_request(request);
  if (request.image_png.size() > model_.max_image_bytes) {
    throw ProviderError("segment '" + request.segment_id + "' image is " +
                            std::to_string(request.image_png.size()) +
                            " bytes, over the provider limit of " +
                            std::to_string(model_.max_image_bytes),
                        0, false);
  }

  const auto body = build_chat_body(model_, request);
  if (log_) {
    log_("POST " + model_.endpoint + " Authorization: " + (api_key_.empty() ? "<none>" : "Bearer <redacted>") +
         "\n" + redact_body(body).dump());
  }

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(std::chrono::seconds(10));
  client.set_read_timeout(std::chrono::seconds(model_.timeout_s));
  client.set_write_timeout(std::chrono::seconds(model_.timeout_s));
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(path_, headers, body.dump(), "application/json");
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (!res) {
    throw ProviderError("transport error calling " + model_.endpoint + ": " +
                            httplib::to_string(res.error()),
                        0, true);
  }
  if (log_) log_("<- " + std::to_string(res->status) + " " + res->body);
  if (res->status != 200) {
    const bool auth = res->status == 401 || res->status == 403;
    throw ProviderError((auth ? "authentication failed (" : "provider returned status (") +
                            std::to_string(res->status) + "): " + res->body.substr(0, 300),
                        res->status, is_retryable_status(res->status));
  }
  ChatResponse out = parse_chat_response(res->body);
  if (out.model.empty()) out.model = model_.model_name;
  out.latency_ms = ms;
  return out;
}

}  // namespace pagesplit
