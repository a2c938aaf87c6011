#include "depwatch/http_service.hpp"

#include <httplib.h>

#include "depwatch/errors.hpp"
#include "depwatch/pipeline.hpp"

namespace fs = std::filesystem;

namespace depwatch {

Service::Service(PipelineConfig cfg) : cfg_(std::move(cfg)) {}

void Service::reload_locked() {
  graph_ = std::make_shared<const Graph>(load_store(cfg_));
  std::error_code ec;
  loaded_mtime_ = fs::last_write_time(cfg_.store_path, ec);
  dirty_.store(false);
}

std::shared_ptr<const Graph> Service::snapshot() {
  std::scoped_lock lock(mutex_);
  if (!graph_ || dirty_.load()) {
    reload_locked();
    return graph_;
  }
  std::error_code ec;
  auto mtime = fs::last_write_time(cfg_.store_path, ec);
  if (!ec && mtime != loaded_mtime_) reload_locked();
  return graph_;
}

void Service::attach(httplib::Server& server) {
  server.set_exception_handler([](const httplib::Request&,
                                  httplib::Response& res, std::exception_ptr ep) {
    nlohmann::json err;
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      err["error"] = e.what();
    } catch (...) {
      err["error"] = "internal error";
    }
    res.status = 500;
    res.set_content(err.dump(2), "application/json");
  });

  server.Get("/health", [this](const httplib::Request&,
                               httplib::Response& res) {
    auto graph = snapshot();
    nlohmann::json body;
    body["status"] = "ok";
    body["triples"] = graph->size();
    res.set_content(body.dump(2), "application/json");
  });

  server.Post("/query", [this](const httplib::Request& req,
                               httplib::Response& res) {
    std::string query_text = req.body;
    // Accept either a raw query or a JSON wrapper {"query": "..."}.
    if (!query_text.empty() && query_text.front() == '{') {
      auto wrapper = nlohmann::json::parse(query_text, nullptr, false);
      if (!wrapper.is_discarded() && wrapper.contains("query") &&
          wrapper["query"].is_string()) {
        query_text = wrapper["query"].get<std::string>();
      }
    }
    auto graph = snapshot();
    try {
      res.set_content(query_payload(*graph, query_text), "application/json");
    } catch (const ParseError& e) {
      nlohmann::json err;
      err["error"] = e.what();
      err["line"] = e.line;
      err["column"] = e.col;
      res.status = 400;
      res.set_content(err.dump(2), "application/json");
    }
  });

  server.Get("/alerts", [this](const httplib::Request& req,
                               httplib::Response& res) {
    AlertRequest request;
    if (req.has_param("product")) {
      request.product_filter = req.get_param_value("product");
    }
    for (const auto& [key, value] : req.params) {
      if (key == "candidate-lib") request.candidate_libs.push_back(value);
    }
    try {
      auto graph = snapshot();
      std::vector<Alert> alerts = run_alerts_on(*graph, cfg_, request);
      res.set_content(alerts_payload(alerts), "application/json");
    } catch (const Error& e) {
      nlohmann::json err;
      err["error"] = e.what();
      res.status = 500;
      res.set_content(err.dump(2), "application/json");
    }
  });
}

bool serve_forever(Service& service, const std::string& host, int port,
                   std::string* error) {
  httplib::Server server;
  service.attach(server);
  if (!server.bind_to_port(host.c_str(), port)) {
    if (error) {
      *error = "cannot bind " + host + ":" + std::to_string(port) +
               " (port in use?)";
    }
    return false;
  }
  return server.listen_after_bind();
}

}  // namespace depwatch
