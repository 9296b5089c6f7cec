#include "pagesplit/config.hpp"

#include <charconv>
#include <functional>
#include <sstream>
#include <system_error>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pagesplit/errors.hpp"
#include "pagesplit/text.hpp"

namespace pagesplit {
namespace {

template <typename T>
T parse_number(const std::string& key, std::string_view raw) {
  const auto text = trim(raw);
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ConfigError(key, "expected a number, got '" + std::string(raw) + "'");
  }
  return value;
}

void require(bool ok, const char* key, const char* constraint) {
  if (!ok) throw ConfigError(key, std::string("must satisfy ") + constraint);
}

using Setter = std::function<void(Settings&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"separation.window_size",
       [](Settings& s, const std::string& k, const std::string& v) {
         s.separation.window_size = parse_number<int>(k, v);
       }},
      {"separation.var_thr",
       [](Settings& s, const std::string& k, const std::string& v) {
         s.separation.var_thr = parse_number<double>(k, v);
       }},
      {"separation.diff_thr",
       [](Settings& s, const std::string& k, const std::string& v) {
         s.separation.diff_thr = parse_number<double>(k, v);
       }},
      {"separation.portion_thr",
       [](Settings& s, const std::string& k, const std::string& v) {
         s.separation.portion_thr = parse_number<double>(k, v);
       }},
      {"separation.max_depth",
       [](Settings& s, const std::string& k, const std::string& v) {
         s.separation.max_depth = parse_number<int>(k, v);
       }},
      {"model.endpoint",
       [](Settings& s, const std::string&, const std::string& v) {
         s.model.endpoint = std::string(trim(v));
       }},
      {"model.model_name",
       [](Settings& s, const std::string&, const std::string& v) {
         s.model.model_name = std::string(trim(v));
       }},
      {"model.temperature",
       [](Settings& s, const std::string& k, const std::string& v) {
         s.model.temperature = parse_number<double>(k, v);
       }},
      {"model.max_output_tokens",
       [](Settings& s, const std::string& k, const std::string& v) {
         s.model.max_output_tokens = parse_number<int>(k, v);
       }},
      {"model.api_key_env",
       [](Settings& s, const std::string&, const std::string& v) {
         s.model.api_key_env = std::string(trim(v));
       }},
      {"model.concurrency_limit",
       [](Settings& s, const std::string& k, const std::string& v) {
         s.model.concurrency_limit = parse_number<int>(k, v);
       }},
      {"model.retry_budget",
       [](Settings& s, const std::string& k, const std::string& v) {
         s.model.retry_budget = parse_number<int>(k, v);
       }},
      {"model.backoff_base_ms",
       [](Settings& s, const std::string& k, const std::string& v) {
         s.model.backoff_base_ms = parse_number<int>(k, v);
       }},
      {"model.max_image_bytes",
       [](Settings& s, const std::string& k, const std::string& v) {
         s.model.max_image_bytes = parse_number<std::size_t>(k, v);
       }},
      {"model.timeout_s",
       [](Settings& s, const std::string& k, const std::string& v) {
         s.model.timeout_s = parse_number<int>(k, v);
       }},
      {"pipeline.mode",
       [](Settings& s, const std::string& k, const std::string& v) {
         try {
           s.pipeline.mode = parse_assembly_mode(trim(v));
         } catch (const Error&) {
           throw ConfigError(k, "must be 'agent' or 'rule'");
         }
       }},
      {"pipeline.prompts_dir",
       [](Settings& s, const std::string&, const std::string& v) {
         s.pipeline.prompts_dir = std::string(trim(v));
       }},
      {"pipeline.runs_root",
       [](Settings& s, const std::string&, const std::string& v) {
         s.pipeline.runs_root = std::string(trim(v));
       }},
  };
  return table;
}

void apply(Settings& s, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key, "unknown key");
  it->second(s, key, value);
}

}  // namespace

std::string_view to_string(AssemblyMode mode) noexcept {
  return mode == AssemblyMode::agent ? "agent" : "rule";
}

AssemblyMode parse_assembly_mode(std::string_view text) {
  if (text == "agent") return AssemblyMode::agent;
  if (text == "rule") return AssemblyMode::rule;
  throw Error("unknown assembly mode '" + std::string(text) + "'");
}

void SeparationConfig::validate() const {
  require(window_size >= 1, "separation.window_size", ">= 1");
  require(var_thr >= 0, "separation.var_thr", ">= 0");
  require(diff_thr >= 0, "separation.diff_thr", ">= 0");
  require(portion_thr > 0 && portion_thr <= 1, "separation.portion_thr", "0 < value <= 1");
  require(max_depth >= 0, "separation.max_depth", ">= 0");
}

void ModelConfig::validate() const {
  require(!endpoint.empty(), "model.endpoint", "non-empty");
  require(!model_name.empty(), "model.model_name", "non-empty");
  require(temperature >= 0, "model.temperature", ">= 0");
  require(max_output_tokens >= 1, "model.max_output_tokens", ">= 1");
  require(concurrency_limit >= 1, "model.concurrency_limit", ">= 1");
  require(retry_budget >= 1, "model.retry_budget", ">= 1");
  require(backoff_base_ms >= 0, "model.backoff_base_ms", ">= 0");
  require(max_image_bytes >= 1, "model.max_image_bytes", ">= 1");
  require(timeout_s >= 1, "model.timeout_s", ">= 1");
}

void Settings::validate() const {
  separation.validate();
  model.validate();
}

nlohmann::json Settings::to_json() const {
  return {
      {"separation",
       {{"window_size", separation.window_size},
        {"var_thr", separation.var_thr},
        {"diff_thr", separation.diff_thr},
        {"portion_thr", separation.portion_thr},
        {"max_depth", separation.max_depth}}},
      {"model",
       {{"endpoint", model.endpoint},
        {"model_name", model.model_name},
        {"temperature", model.temperature},
        {"max_output_tokens", model.max_output_tokens},
        {"api_key_env", model.api_key_env},
        {"concurrency_limit", model.concurrency_limit},
        {"retry_budget", model.retry_budget},
        {"backoff_base_ms", model.backoff_base_ms},
        {"max_image_bytes", model.max_image_bytes},
        {"timeout_s", model.timeout_s}}},
      {"pipeline",
       {{"mode", std::string(to_string(pipeline.mode))},
        {"prompts_dir", pipeline.prompts_dir},
        {"runs_root", pipeline.runs_root}}},
  };
}

Settings settings_from_json(const nlohmann::json& j) {
  Settings s;
  for (const auto& [section, body] : j.items()) {
    for (const auto& [key, value] : body.items()) {
      const std::string text = value.is_string() ? value.get<std::string>() : value.dump();
      apply(s, section + "." + key, text);
    }
  }
  s.validate();
  return s;
}

Settings parse_config(std::string_view text, const ConfigOverrides& overrides) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("<file>", "malformed config: " + e.message() + " (line " +
                                    std::to_string(e.line()) + ")");
  }

  Settings s;
  for (const auto& [section, body] : tree) {
    if (section != "separation" && section != "model" && section != "pipeline") {
      throw ConfigError(section, "unknown section");
    }
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(section, "key outside of a section");
    }
    for (const auto& [key, value] : body) {
      apply(s, section + "." + key, value.data());
    }
  }
  for (const auto& [key, value] : overrides) {
    apply(s, key, value);
  }
  s.validate();
  return s;
}

Settings apply_overrides(Settings base, const ConfigOverrides& overrides) {
  for (const auto& [key, value] : overrides) apply(base, key, value);
  base.validate();
  return base;
}

Settings load_config(const std::optional<std::filesystem::path>& path,
                     const ConfigOverrides& overrides) {
  if (!path) return parse_config({}, overrides);
  std::string text;
  try {
    text = read_text_file(*path);
  } catch (const Error&) {
    throw ConfigError("<file>", "cannot read config file " + path->string());
  }
  return parse_config(text, overrides);
}

}  // namespace pagesplit
