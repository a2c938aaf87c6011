#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "depwatch/graph.hpp"

namespace depwatch {

/// One basic graph pattern position set; any position may be a Variable.
struct TriplePattern {
  Term subject;
  Term predicate;
  Term object;

  bool operator==(const TriplePattern&) const = default;
};

struct Query {
  std::vector<std::string> select_vars;
  std::vector<TriplePattern> patterns;
};

/// Parses `SELECT ?vars WHERE { pattern . pattern . }`. Prefixed names
/// resolve against the default prefixes; a non-absolute predicate token
/// like <hasVulnerability> resolves against the ontology vocabulary.
/// Selecting a variable that no pattern binds is an error, as is any
/// malformed pattern (reported with line and column).
Query parse_query(std::string_view text);

struct ResultTable {
  std::vector<std::string> header;
  std::vector<std::vector<Term>> rows;  // aligned with header, deduplicated,
                                        // sorted

  bool operator==(const ResultTable&) const = default;
};

/// Natural join of the pattern solutions, projected to the selected
/// variables, deduplicated, in lexicographic term order.
ResultTable execute(const Query& q, const Graph& g);

/// Standard SPARQL JSON results shape: head.vars + results.bindings.
nlohmann::json to_sparql_json(const ResultTable& table);

}  // namespace depwatch
