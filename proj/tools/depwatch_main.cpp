// depwatch: scan installed binaries, mine repository issues, and answer
// queries and alerts over the resulting security knowledge graph.

#include <csignal>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "depwatch/config.hpp"
#include "depwatch/errors.hpp"
#include "depwatch/http_service.hpp"
#include "depwatch/pipeline.hpp"
#include "depwatch/turtle.hpp"
#include "depwatch/util.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUserError = 1;
constexpr int kExitInternalError = 2;

depwatch::Service* g_service = nullptr;

void on_sighup(int) {
  if (g_service) g_service->invalidate();
}

struct CommonArgs {
  std::string config_path;
  std::optional<std::string> store_override;
};

depwatch::PipelineConfig load_config(const CommonArgs& args) {
  depwatch::PipelineConfig cfg =
      depwatch::PipelineConfig::load(args.config_path);
  if (args.store_override) cfg.store_path = *args.store_override;
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "pipeline config file")
      ->required();
  cmd->add_option("--store", args.store_override,
                  "override the store path from the config");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"security knowledge graph pipeline"};
  app.require_subcommand(1);

  CommonArgs scan_args, ingest_args, query_args, alerts_args, serve_args;

  auto* scan = app.add_subcommand(
      "scan", "scan binaries and persist the dependency graph");
  add_common(scan, scan_args);
  int max_depth_override = 0;
  scan->add_option("--max-depth", max_depth_override,
                   "override scan.max_depth");

  auto* ingest = app.add_subcommand(
      "ingest", "fetch issues, extract intelligence, assert it");
  add_common(ingest, ingest_args);
  std::string since_override, mode_override, aliases_override;
  bool exclude_pulls = false;
  ingest->add_option("--since", since_override,
                     "only issues created on or after this ISO date");
  ingest->add_option("--mode", mode_override,
                     "discard rule mode: literal or strict");
  ingest->add_option("--aliases", aliases_override, "alias table file");
  ingest->add_flag("--exclude-pulls", exclude_pulls,
                   "drop pull requests from the issue stream");

  auto* query =
      app.add_subcommand("query", "run a SELECT query against the store");
  add_common(query, query_args);
  std::string query_text;
  query->add_option("query", query_text, "query text")->required();

  auto* alerts = app.add_subcommand("alerts", "evaluate the alert rules");
  add_common(alerts, alerts_args);
  std::string product_filter, rules_override;
  std::vector<std::string> candidate_libs;
  bool materialize = false;
  alerts->add_option("--product", product_filter,
                     "report alerts for this product only");
  alerts->add_option("--candidate-lib", candidate_libs,
                     "hypothetical library link to check before adopting");
  alerts->add_option("--rules", rules_override, "rule file overriding the "
                     "built-in rules");
  alerts->add_flag("--materialize", materialize,
                   "write RaiseAlert triples back to the store");

  auto* serve = app.add_subcommand("serve", "HTTP endpoint for query/alerts");
  add_common(serve, serve_args);
  std::string host_override;
  int port_override = 0;
  serve->add_option("--host", host_override, "bind address");
  serve->add_option("--port", port_override, "bind port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUserError;
  }

  try {
    if (scan->parsed()) {
      depwatch::PipelineConfig cfg = load_config(scan_args);
      if (max_depth_override > 0) cfg.max_depth = max_depth_override;
      depwatch::ScanStats stats = depwatch::run_scan(cfg);
      for (const std::string& w : stats.warnings) {
        std::cerr << "warning: " << w << "\n";
      }
      std::cout << "products: " << stats.products
                << "\nlibraries: " << stats.libraries
                << "\nlinks: " << stats.links
                << "\nutilizes: " << stats.utilizes
                << "\nstore: " << cfg.store_path.string() << "\n";
      return kExitOk;
    }

    if (ingest->parsed()) {
      depwatch::PipelineConfig cfg = load_config(ingest_args);
      if (!since_override.empty()) cfg.since = since_override;
      if (!aliases_override.empty()) cfg.aliases = aliases_override;
      if (exclude_pulls) cfg.include_pulls = false;
      if (!mode_override.empty()) {
        if (mode_override == "literal") {
          cfg.mode = depwatch::Mode::Literal;
        } else if (mode_override == "strict") {
          cfg.mode = depwatch::Mode::Strict;
        } else {
          std::cerr << "error: --mode must be literal or strict\n";
          return kExitUserError;
        }
      }
      depwatch::IngestStats stats = depwatch::run_ingest(cfg);
      for (const std::string& e : stats.errors) {
        std::cerr << "warning: " << e << "\n";
      }
      std::cout << "issues: " << stats.issues << "\nkept: " << stats.kept
                << "\ndiscarded: " << stats.discarded
                << "\ndowngraded: " << stats.downgraded
                << "\ntriples added: " << stats.triples_added << "\n";
      return kExitOk;
    }

    if (query->parsed()) {
      depwatch::PipelineConfig cfg = load_config(query_args);
      depwatch::Graph g = depwatch::load_store(cfg);
      std::cout << depwatch::query_payload(g, query_text) << "\n";
      return kExitOk;
    }

    if (alerts->parsed()) {
      depwatch::PipelineConfig cfg = load_config(alerts_args);
      if (!rules_override.empty()) cfg.rules_path = rules_override;
      if (materialize) cfg.materialize_alerts = true;
      depwatch::AlertRequest request;
      if (!product_filter.empty()) request.product_filter = product_filter;
      request.candidate_libs = candidate_libs;
      std::vector<std::string> warnings;
      std::vector<depwatch::Alert> result =
          depwatch::run_alerts(cfg, request, &warnings);
      for (const std::string& w : warnings) {
        std::cerr << "warning: " << w << "\n";
      }
      std::cout << depwatch::alerts_payload(result) << "\n";
      return kExitOk;
    }

    if (serve->parsed()) {
      depwatch::PipelineConfig cfg = load_config(serve_args);
      if (!host_override.empty()) cfg.host = host_override;
      if (port_override > 0) cfg.port = port_override;
      depwatch::Service service(cfg);
      g_service = &service;
      std::signal(SIGHUP, on_sighup);
      std::string error;
      std::cerr << "listening on " << cfg.host << ":" << cfg.port << "\n";
      if (!depwatch::serve_forever(service, cfg.host, cfg.port, &error)) {
        std::cerr << "error: " << error << "\n";
        return kExitUserError;
      }
      return kExitOk;
    }
  } catch (const depwatch::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const depwatch::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const depwatch::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternalError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitUserError;
}
