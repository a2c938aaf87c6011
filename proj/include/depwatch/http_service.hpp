#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>

#include "depwatch/config.hpp"
#include "depwatch/graph.hpp"

namespace httplib {
class Server;
}

namespace depwatch {

/// Read-only query/alert endpoint over the persisted store. Requests run
/// against an immutable snapshot; the store file is re-read when its
/// modification time changes or after invalidate() (wired to SIGHUP by the
/// CLI).
class Service {
 public:
  explicit Service(PipelineConfig cfg);

  /// Registers GET /health, POST /query, GET /alerts on the server.
  void attach(httplib::Server& server);

  /// Forces a reload before the next request.
  void invalidate() { dirty_.store(true); }

  /// Current snapshot (reloading first when the store changed).
  std::shared_ptr<const Graph> snapshot();

 private:
  void reload_locked();

  PipelineConfig cfg_;
  std::mutex mutex_;
  std::shared_ptr<const Graph> graph_;
  std::filesystem::file_time_type loaded_mtime_{};
  std::atomic<bool> dirty_{true};
};

/// Blocking entry point used by `depwatch serve`; returns false when the
/// port cannot be bound.
bool serve_forever(Service& service, const std::string& host, int port,
                   std::string* error);

}  // namespace depwatch
