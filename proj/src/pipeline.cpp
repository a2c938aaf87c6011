#include "depwatch/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>

#include "depwatch/errors.hpp"
#include "depwatch/issues.hpp"
#include "depwatch/ontology.hpp"
#include "depwatch/query.hpp"
#include "depwatch/turtle.hpp"
#include "depwatch/util.hpp"

namespace fs = std::filesystem;

namespace depwatch {

namespace {

std::string replace_ws(std::string s) {
  for (char& c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) c = '_';
  }
  return s;
}

/// Node name used for alias matching: the basename for path IRIs, the IRI
/// itself otherwise.
std::string node_name(const Term& node) {
  if (!node.value.empty() && node.value.front() == '/') {
    return fs::path(node.value).filename().string();
  }
  return node.value;
}

std::optional<Term> find_named_node(const Graph& g,
                                    const std::string& surface) {
  std::string wanted = normalize_surface(surface);
  for (const Term& cls :
       {vocab::product(), vocab::library(), vocab::uco_product()}) {
    for (const Triple& t : g.match(std::nullopt, vocab::rdf_type(), cls)) {
      if (normalize_surface(node_name(t.subject)) == wanted) {
        return t.subject;
      }
    }
  }
  return std::nullopt;
}

AliasTable load_aliases(const PipelineConfig& cfg, const Graph& g) {
  if (cfg.aliases.empty()) return AliasTable{};
  return AliasTable::load(cfg.aliases, g);
}

std::vector<Rule> load_configured_rules(const PipelineConfig& cfg) {
  if (cfg.rules_path) return load_rules(*cfg.rules_path);
  return shipped_rules();
}

}  // namespace

Term vulnerability_iri(const std::string& term) {
  return Term::iri(replace_ws(ascii_lower(trim(term))));
}

Term product_iri(const std::string& surface) {
  return Term::iri(replace_ws(trim(surface)));
}

Graph load_store(const PipelineConfig& cfg) {
  Graph g;
  if (fs::exists(cfg.store_path)) {
    g = load_turtle_file(cfg.store_path);
  }
  g.merge(bootstrap_graph());
  return g;
}

ScanStats run_scan(const PipelineConfig& cfg) {
  Graph g = bootstrap_graph();
  ScanOptions options;
  options.roots = cfg.scan_roots;
  options.search_paths = cfg.search_paths;
  options.max_depth = cfg.max_depth;
  options.sysroot = cfg.sysroot;
  options.utilizes = cfg.utilizes;
  for (const RepoRef& repo : cfg.repos) {
    options.tracked_projects.push_back(repo.name);
  }
  ScanStats stats = scan_to_triples(g, options);
  save_turtle_file(g, cfg.store_path);
  return stats;
}

void assert_intelligence(Graph& g, const Intelligence& intel,
                         const AliasTable& aliases) {
  Term intel_node = Term::iri(intel.id);
  Term vuln = vulnerability_iri(intel.vulnerability_term);

  g.insert(intel_node, vocab::rdf_type(), vocab::intelligence());
  g.insert(intel_node, vocab::intel_has_vulnerability(), vuln);
  g.insert(vuln, vocab::rdf_type(), vocab::vulnerability());
  if (auto canonical = link_entity(intel.vulnerability_term, aliases)) {
    emit_sameas(g, vuln, *canonical);
  }

  if (intel.affected_product) {
    Term product;
    if (auto existing = find_named_node(g, *intel.affected_product)) {
      product = *existing;
    } else {
      product = product_iri(*intel.affected_product);
      g.insert(product, vocab::rdf_type(), vocab::uco_product());
    }
    g.insert(product, vocab::has_vulnerability(), vuln);
    g.insert(vuln, vocab::affects_product(), product);
    if (auto canonical = link_entity(*intel.affected_product, aliases)) {
      emit_sameas(g, product, *canonical);
    }
  }
}

IngestStats run_ingest(const PipelineConfig& cfg) {
  Graph g = load_store(cfg);
  AliasTable aliases = load_aliases(cfg, g);
  if (cfg.gazetteer_dir.empty()) {
    throw ConfigError("ingest requires a gazetteer directory");
  }
  Gazetteer gaz = Gazetteer::load(cfg.gazetteer_dir);

  FetchOptions fetch_options;
  fetch_options.since = cfg.since;
  fetch_options.page_size = cfg.page_size;
  fetch_options.include_pulls = cfg.include_pulls;

  IngestStats stats;
  std::size_t before = g.size();
  for (const RepoRef& repo : cfg.repos) {
    std::vector<IssueRecord> issues;
    try {
      if (!cfg.fixture_dir.empty()) {
        fs::path file =
            cfg.fixture_dir / (repo.owner + "__" + repo.name + ".json");
        issues = load_fixture(file, repo, fetch_options);
      } else if (!cfg.api_base.empty()) {
        const char* token = std::getenv("DEPWATCH_TOKEN");
        auto backend =
            make_httplib_backend(cfg.api_base, token ? token : "");
        issues = fetch_issues(*backend, repo, fetch_options);
      } else {
        throw ConfigError(
            "ingest needs ingest.api_base or ingest.fixtures in the config");
      }
    } catch (const TransportError& e) {
      stats.errors.push_back(repo.full() + ": " + e.what());
      continue;
    }
    stats.issues += issues.size();
    for (const IssueRecord& issue : issues) {
      Classification result = classify_issue(issue, gaz, cfg.mode);
      if (!result.kept) {
        ++stats.discarded;
        continue;
      }
      auto intel = extract_intelligence(issue, result.spans);
      if (!intel) {
        ++stats.downgraded;
        continue;
      }
      ++stats.kept;
      assert_intelligence(g, *intel, aliases);
    }
  }
  stats.triples_added = g.size() - before;
  save_turtle_file(g, cfg.store_path);
  return stats;
}

std::vector<Alert> run_alerts_on(const Graph& g, const PipelineConfig& cfg,
                                 const AlertRequest& request,
                                 std::vector<std::string>* warnings) {
  std::vector<Rule> rules = load_configured_rules(cfg);

  Graph overlay;
  const Graph* target = &g;
  if (!request.candidate_libs.empty()) {
    // Developer-initiated scenario: overlay the proposed link set on a
    // scratch copy of the graph before evaluating.
    overlay = g;
    std::string product_name =
        request.product_filter.value_or("candidate-product");
    Term product = product_iri(product_name);
    overlay.insert(product, vocab::rdf_type(), vocab::product());
    for (const std::string& soname : request.candidate_libs) {
      Term lib = Term::iri(soname);
      overlay.insert(lib, vocab::rdf_type(), vocab::library());
      overlay.insert(product, vocab::is_linked_to(), lib);
    }
    target = &overlay;
  }

  std::string raised_at = format_iso8601_utc(now_utc());
  std::vector<Alert> alerts = evaluate(*target, rules, warnings, raised_at);

  if (request.product_filter) {
    Term wanted = product_iri(*request.product_filter);
    std::string wanted_name = normalize_surface(*request.product_filter);
    std::erase_if(alerts, [&](const Alert& alert) {
      if (alert.subject == wanted) return false;
      return normalize_surface(node_name(alert.subject)) != wanted_name;
    });
  }
  return alerts;
}

std::vector<Alert> run_alerts(const PipelineConfig& cfg,
                              const AlertRequest& request,
                              std::vector<std::string>* warnings) {
  Graph g = load_store(cfg);
  std::vector<Alert> alerts = run_alerts_on(g, cfg, request, warnings);
  if (cfg.materialize_alerts) {
    materialize_alerts(g, alerts);
    save_turtle_file(g, cfg.store_path);
  }
  return alerts;
}

std::string query_payload(const Graph& g, const std::string& query_text) {
  Query query = parse_query(query_text);
  return to_sparql_json(execute(query, g)).dump(2);
}

std::string alerts_payload(const std::vector<Alert>& alerts) {
  nlohmann::json out = nlohmann::json::array();
  for (const Alert& alert : alerts) {
    nlohmann::json entry;
    entry["subject"] = alert.subject.value;
    entry["vulnerability"] = alert.vulnerability.value;
    entry["rule"] = alert.rule_name;
    entry["raised_at"] = alert.raised_at;
    nlohmann::json bindings = nlohmann::json::array();
    for (const Binding& binding : alert.bindings) {
      nlohmann::json row = nlohmann::json::object();
      for (const auto& [var, term] : binding) {
        nlohmann::json cell;
        cell["type"] = term.is_literal() ? "literal" : "uri";
        cell["value"] = term.value;
        row[var] = std::move(cell);
      }
      bindings.push_back(std::move(row));
    }
    entry["bindings"] = std::move(bindings);
    out.push_back(std::move(entry));
  }
  return out.dump(2);
}

}  // namespace depwatch
