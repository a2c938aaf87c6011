// Shared test scaffolding: fixture paths, a tiny deterministic RNG wrapper,
// random graph/query generators, and the independent oracles the
// implementation is checked against. Everything here is test-only and
// deliberately avoids the production code paths it verifies.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "depwatch/graph.hpp"
#include "depwatch/query.hpp"
#include "depwatch/rules.hpp"

namespace depwatch::testing {

inline std::filesystem::path fixture_dir() { return DEPWATCH_FIXTURE_DIR; }
inline std::filesystem::path data_dir() { return DEPWATCH_DATA_DIR; }
inline std::string cli_bin() { return DEPWATCH_CLI_BIN; }

/// Fresh scratch directory under the system temp root.
std::filesystem::path make_temp_dir(const std::string& tag);

/// mt19937 with modulo draws; avoids std distributions so sequences are
/// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint32_t seed) : engine_(seed) {}
  std::size_t below(std::size_t n) { return n == 0 ? 0 : engine_() % n; }
  bool chance(int percent) { return below(100) < static_cast<std::size_t>(percent); }
 private:
  std::mt19937 engine_;
};

/// Arbitrary graph over small IRI/literal pools (round-trip and match
/// tests).
Graph random_graph(Rng& rng, std::size_t max_triples);

/// Graph shaped like pipeline output: typed products, libraries, projects
/// and vulnerabilities over the bootstrap schema; Is_Linked_To subjects are
/// products, objects are libraries.
Graph random_schema_graph(Rng& rng, std::size_t max_triples);

/// Query with <= max_patterns patterns over terms appearing in the graph.
Query random_query(Rng& rng, const Graph& g, std::size_t max_patterns);

/// Nested-loop join evaluated directly over the raw triple list; the
/// independent route for checking execute().
ResultTable oracle_execute(const Query& q, const Graph& g);

/// Linear scan; the independent route for checking Graph::match.
std::vector<Triple> oracle_match(const Graph& g,
                                 const std::optional<Term>& s,
                                 const std::optional<Term>& p,
                                 const std::optional<Term>& o);

/// Exhaustive enumeration of variable assignments over the graph's term
/// universe; the independent route for checking evaluate(). Returns the
/// (subject, vulnerability, rule) triples with their full binding sets.
struct OracleAlert {
  Term subject;
  Term vulnerability;
  std::string rule_name;
  std::set<Binding> bindings;
  auto operator<=>(const OracleAlert&) const = default;
};
std::vector<OracleAlert> oracle_evaluate(const Graph& g,
                                         const std::vector<Rule>& rules);

/// Runs a command, captures stdout, returns the exit status.
int run_command(const std::string& command, std::string* stdout_text);

}  // namespace depwatch::testing
