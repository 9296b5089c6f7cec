#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pagesplit/config.hpp"
#include "pagesplit/mock_provider.hpp"
#include "pagesplit/provider.hpp"
#include "pagesplit/run_store.hpp"

namespace httplib {
class Server;
}

namespace pagesplit {

struct ServiceOptions {
  Settings settings;  // defaults for new runs; runs_root is the store
  /// Builds the provider for a run. Receives the run's model settings and its
  /// mock script, when one was uploaded. Defaults to make_provider.
  std::function<std::shared_ptr<ChatProvider>(const ModelConfig&, const std::optional<MockScript>&)>
      provider_factory;
  bool debug = false;
};

/// HTTP API over a RunStore.
///
///   POST /api/runs                                 multipart: image, mode, config, mock, wait
///   GET  /api/runs/{id}                            manifest
///   GET  /api/runs/{id}/tree                       tree.json
///   GET  /api/runs/{id}/segments/{sid}/image       PNG crop
///   GET  /api/runs/{id}/segments/{sid}/code        fragment text + version
///   POST /api/runs/{id}/segments/{sid}/regenerate  updated fragment + new final
///   GET  /api/runs/{id}/html                       final.html
///   GET  /api/runs/{id}/stats                      stats.json
///
/// Errors are {"error": message} with 400 (bad request), 404 (unknown run or
/// segment, or not produced yet), 409 (run busy or not complete) or 502
/// (provider failure).
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and starts serving on a background thread. Port 0 picks a free
  /// port. Throws Error when the port cannot be bound.
  int start(const std::string& host, int port);

  /// Stops accepting requests and waits for in-flight generations.
  void stop();

  int port() const noexcept { return port_; }
  const RunStore& store() const noexcept { return store_; }

 private:
  struct RunSlot {
    std::mutex mu;  // held by generation and by regeneration
    std::thread worker;
  };

  void routes();
  std::shared_ptr<RunSlot> slot(const std::string& run_id);
  std::shared_ptr<ChatProvider> provider_for(const RunManifest& manifest) const;
  PromptSet prompts() const;

  ServiceOptions options_;
  RunStore store_;
  std::unique_ptr<httplib::Server> server_;
  std::thread listener_;
  int port_ = 0;

  std::mutex slots_mu_;
  std::map<std::string, std::shared_ptr<RunSlot>> slots_;
  bool stopped_ = false;
};

}  // namespace pagesplit
