#include "pagesplit/service.hpp"

#include <httplib.h>

#include "pagesplit/commands.hpp"
#include "pagesplit/image_io.hpp"
#include "pagesplit/segmenter.hpp"
#include "pagesplit/text.hpp"

namespace pagesplit {
namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(2), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

std::string field(const httplib::Request& req, const char* name) {
  return req.has_file(name) ? req.get_file_value(name).content : std::string();
}

nlohmann::json fragment_body(const CodeFragment& f) {
  auto j = f.to_json();
  j["html"] = f.html;
  return j;
}

ConfigOverrides overrides_from(const std::string& text) {
  ConfigOverrides out;
  if (trim(text).empty()) return out;
  const auto j = nlohmann::json::parse(text);
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object of \"section.key\" values");
  for (const auto& [key, value] : j.items()) {
    out[key] = value.is_string() ? value.get<std::string>() : value.dump();
  }
  return out;
}

}  // namespace

Service::Service(ServiceOptions options)
    : options_(std::move(options)),
      store_(options_.settings.pipeline.runs_root),
      server_(std::make_unique<httplib::Server>()) {
  if (!options_.provider_factory) {
    const bool debug = options_.debug;
    options_.provider_factory = [debug](const ModelConfig& model, const std::optional<MockScript>& mock) {
      std::function<void(const std::string&)> log;
      if (debug) log = [](const std::string& line) { std::fprintf(stderr, "[debug] %s\n", line.c_str()); };
      return make_provider(model, mock, log);
    };
  }
  // SO_REUSEPORT would let a second server share the port silently.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  routes();
}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  listener_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void Service::stop() {
  std::map<std::string, std::shared_ptr<RunSlot>> slots;
  {
    std::lock_guard lk(slots_mu_);
    if (stopped_) return;
    stopped_ = true;
    slots = slots_;
  }
  server_->stop();
  if (listener_.joinable()) listener_.join();
  for (auto& [id, s] : slots) {
    if (s->worker.joinable()) s->worker.join();
  }
}

std::shared_ptr<Service::RunSlot> Service::slot(const std::string& run_id) {
  std::lock_guard lk(slots_mu_);
  auto& s = slots_[run_id];
  if (!s) s = std::make_shared<RunSlot>();
  return s;
}

std::shared_ptr<ChatProvider> Service::provider_for(const RunManifest& manifest) const {
  std::optional<MockScript> mock;
  if (const auto text = store_.read_text(manifest.run_id, "mock.json")) {
    mock = MockScript::from_json(nlohmann::json::parse(*text));
  }
  return options_.provider_factory(settings_from_json(manifest.config).model, mock);
}

PromptSet Service::prompts() const {
  const auto& dir = options_.settings.pipeline.prompts_dir;
  return dir.empty() ? PromptSet::defaults() : PromptSet::load(dir);
}

void Service::routes() {
  auto& srv = *server_;

  srv.Post("/api/runs", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_file("image")) return send_error(res, 400, "multipart field 'image' is required");
    Settings settings;
    std::optional<MockScript> mock;
    std::optional<Raster> raster;
    try {
      const auto& bytes = req.get_file_value("image").content;
      raster = decode_image(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
      settings = apply_overrides(options_.settings, overrides_from(field(req, "config")));
      settings.pipeline.runs_root = options_.settings.pipeline.runs_root;
      if (const auto mode = field(req, "mode"); !mode.empty()) settings.pipeline.mode = parse_assembly_mode(mode);
      if (const auto text = field(req, "mock"); !trim(text).empty()) {
        mock = MockScript::from_json(nlohmann::json::parse(text));
      }
    } catch (const ConfigError& e) {
      return send_error(res, 400, std::string("config: ") + e.what());
    } catch (const std::exception& e) {
      return send_error(res, 400, e.what());
    }

    RunManifest manifest;
    manifest.run_id = new_run_id();
    manifest.created_at = utc_timestamp();
    manifest.mode = settings.pipeline.mode;
    manifest.config = settings.to_json();
    const std::string id = manifest.run_id;
    std::shared_ptr<RunSlot> s;
    {
      std::lock_guard lk(slots_mu_);
      if (stopped_) return send_error(res, 503, "service is shutting down");
      s = slots_[id] = std::make_shared<RunSlot>();
    }
    try {
      prepare_run(store_, manifest, *raster, build_tree(*raster, settings.separation));
      if (mock) store_.write_text(id, "mock.json", mock->to_json().dump(2) + "\n");
    } catch (const std::exception& e) {
      return send_error(res, 400, e.what());
    }

    const auto work = [this, id, s] {
      std::lock_guard lk(s->mu);
      try {
        auto provider = provider_for(store_.load_manifest(id));
        execute_run(store_, id, *provider, prompts());
      } catch (const std::exception&) {
        // execute_run records the failure in the manifest.
      }
    };
    if (field(req, "wait") == "true") {
      work();
    } else {
      s->worker = std::thread(work);
    }
    send_json(res, 201, {{"run_id", id}, {"status", std::string(to_string(store_.load_manifest(id).status))}});
  });

  srv.Get(R"(/api/runs/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!store_.exists(id)) return send_error(res, 404, "unknown run '" + id + "'");
    send_json(res, 200, store_.load_manifest(id).to_json());
  });

  srv.Get(R"(/api/runs/([^/]+)/tree)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!store_.exists(id)) return send_error(res, 404, "unknown run '" + id + "'");
    res.set_content(*store_.read_text(id, "tree.json"), "application/json");
  });

  srv.Get(R"(/api/runs/([^/]+)/segments/([^/]+)/image)",
          [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1], sid = req.matches[2];
            if (!store_.exists(id)) return send_error(res, 404, "unknown run '" + id + "'");
            if (!store_.load_tree(id).contains(sid)) return send_error(res, 404, "unknown segment '" + sid + "'");
            res.set_content(*store_.read_text(id, "segments/" + sid + ".png"), "image/png");
          });

  srv.Get(R"(/api/runs/([^/]+)/segments/([^/]+)/code)",
          [this](const httplib::Request& req, httplib::Response& res) {
            const std::string id = req.matches[1], sid = req.matches[2];
            if (!store_.exists(id)) return send_error(res, 404, "unknown run '" + id + "'");
            if (!store_.load_tree(id).contains(sid)) return send_error(res, 404, "unknown segment '" + sid + "'");
            const auto manifest = store_.load_manifest(id);
            const auto it = manifest.fragments.find(sid);
            if (it == manifest.fragments.end()) return send_error(res, 404, "segment '" + sid + "' has no code yet");
            CodeFragment f = it->second;
            f.html = store_.read_fragment(id, sid, f.version);
            send_json(res, 200, fragment_body(f));
          });

  srv.Post(R"(/api/runs/([^/]+)/segments/([^/]+)/regenerate)",
           [this](const httplib::Request& req, httplib::Response& res) {
             const std::string id = req.matches[1], sid = req.matches[2];
             if (!store_.exists(id)) return send_error(res, 404, "unknown run '" + id + "'");
             const auto s = slot(id);
             std::unique_lock lk(s->mu, std::try_to_lock);
             if (!lk.owns_lock()) return send_error(res, 409, "run '" + id + "' is busy");
             const auto manifest = store_.load_manifest(id);
             if (manifest.status != RunStatus::complete) {
               return send_error(res, 409, "run '" + id + "' is " + std::string(to_string(manifest.status)));
             }
             if (!store_.load_tree(id).contains(sid)) return send_error(res, 404, "unknown segment '" + sid + "'");
             try {
               auto provider = provider_for(manifest);
               const auto regen = regenerate_in_store(store_, id, sid, *provider, prompts());
               const auto updated = store_.load_manifest(id);
               send_json(res, 200,
                         {{"run_id", id},
                          {"segment_id", sid},
                          {"fragment", fragment_body(regen.fragment)},
                          {"reissued", regen.reissued},
                          {"final_version", updated.final->version},
                          {"html", regen.document.html}});
             } catch (const UnknownSegmentError& e) {
               send_error(res, 404, e.what());
             } catch (const PipelineError& e) {
               send_error(res, 400, e.what());
             } catch (const GenerationError& e) {
               send_error(res, 502, e.what());
             } catch (const ProviderError& e) {
               send_error(res, 502, e.what());
             }
           });

  srv.Get(R"(/api/runs/([^/]+)/html)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!store_.exists(id)) return send_error(res, 404, "unknown run '" + id + "'");
    const auto html = store_.read_final(id);
    if (!html) return send_error(res, 404, "run '" + id + "' has no final.html yet");
    res.set_content(*html, "text/html; charset=utf-8");
  });

  srv.Get(R"(/api/runs/([^/]+)/stats)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!store_.exists(id)) return send_error(res, 404, "unknown run '" + id + "'");
    const auto stats = store_.read_text(id, "stats.json");
    if (!stats) return send_error(res, 404, "run '" + id + "' has no stats yet");
    res.set_content(*stats, "application/json");
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const RunNotFoundError& e) {
      send_error(res, 404, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  });
}

}  // namespace pagesplit
