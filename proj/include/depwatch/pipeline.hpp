#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "depwatch/config.hpp"
#include "depwatch/entity_link.hpp"
#include "depwatch/graph.hpp"
#include "depwatch/rules.hpp"
#include "depwatch/scanner.hpp"
#include "depwatch/svce.hpp"

namespace depwatch {

/// Loads the persisted store (or a fresh bootstrap when none exists) and
/// guarantees the schema triples and default prefixes are present.
Graph load_store(const PipelineConfig& cfg);

/// Rebuilds the store from a scan of the configured roots: bootstrap plus
/// the dependency fragment, persisted as canonical Turtle.
ScanStats run_scan(const PipelineConfig& cfg);

struct IngestStats {
  std::size_t issues = 0;
  std::size_t kept = 0;
  std::size_t discarded = 0;
  std::size_t downgraded = 0;
  std::size_t triples_added = 0;
  std::vector<std::string> errors;  // per-repo transport failures
};

/// Asserts the intelligence triple shape for one finding: the typed
/// intelligence node, its vulnerability link, the affected product's
/// vulnerability and affectsProduct edges, and sameAs links for every
/// surface the alias table covers. The affected product reuses an existing
/// product or library node when the alias-normalized name matches one;
/// otherwise a product node is minted.
void assert_intelligence(Graph& g, const Intelligence& intel,
                         const AliasTable& aliases);

/// Fetch (or load fixtures), classify, extract, assert, persist.
IngestStats run_ingest(const PipelineConfig& cfg);

/// Rule evaluation over the persisted store. The developer-initiated
/// scenario overlays a hypothetical product with Is_Linked_To edges to the
/// candidate libraries before evaluating; `product_filter` narrows the
/// report to one subject.
struct AlertRequest {
  std::optional<std::string> product_filter;
  std::vector<std::string> candidate_libs;
};

/// Alert evaluation against an in-memory snapshot; no store I/O.
std::vector<Alert> run_alerts_on(const Graph& g, const PipelineConfig& cfg,
                                 const AlertRequest& request = {},
                                 std::vector<std::string>* warnings = nullptr);

std::vector<Alert> run_alerts(const PipelineConfig& cfg,
                              const AlertRequest& request = {},
                              std::vector<std::string>* warnings = nullptr);

/// JSON payloads shared verbatim by the CLI and the HTTP endpoints.
std::string query_payload(const Graph& g, const std::string& query_text);
std::string alerts_payload(const std::vector<Alert>& alerts);

/// IRI minted for a vulnerability term ("buffer overflow" ->
/// buffer_overflow).
Term vulnerability_iri(const std::string& term);

/// IRI minted for an unmatched product surface form.
Term product_iri(const std::string& surface);

}  // namespace depwatch
