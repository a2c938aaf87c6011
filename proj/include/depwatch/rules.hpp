#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "depwatch/graph.hpp"

namespace depwatch {

/// C(?x): holds for nodes typed C or any schema subclass of C.
struct ClassAtom {
  Term cls;
  std::string var;
  bool operator==(const ClassAtom&) const = default;
};

/// p(s, o): either position may be a variable or a concrete term.
struct PropertyAtom {
  Term property;
  Term subject;
  Term object;
  bool operator==(const PropertyAtom&) const = default;
};

using Atom = std::variant<ClassAtom, PropertyAtom>;

/// Horn rule in the alert dialect: a conjunctive body and a
/// RaiseAlert(?var, "Yes") head whose variable is bound by the body.
struct Rule {
  std::string name;
  std::vector<Atom> body;
  std::string head_var;
};

/// Parses one rule. Accepts an optional `Rule for <name>:` header, atoms
/// joined with `^`, then `==> RaiseAlert(?var, "Yes")`. Whitespace
/// insensitive; atom names may be bare ontology names, prefixed names, or
/// angle-bracket IRIs. Throws ParseError with position on malformed atoms
/// or a head variable missing from the body.
Rule parse_rule(std::string_view text);

/// Parses a rule file: `#` comments, one rule per `Rule for …:` block.
std::vector<Rule> parse_rules(std::string_view text);
std::vector<Rule> load_rules(const std::filesystem::path& path);

/// The five built-in alert rules (project utilization, linked library,
/// secondary linked library, vulnerable libraries, vulnerable projects).
const std::vector<Rule>& shipped_rules();

/// Text of the built-in rules, as shipped in rule-file syntax.
std::string_view shipped_rules_text();

using Binding = std::map<std::string, Term>;

struct Alert {
  Term subject;        // the at-risk product
  Term vulnerability;  // object of the rule's hasVulnerability atom
  std::string rule_name;
  std::vector<Binding> bindings;  // every satisfying assignment, sorted
  std::string raised_at;

  bool operator==(const Alert&) const = default;
};

/// Evaluates the rules over one graph snapshot. Alerts are deduplicated by
/// (subject, vulnerability, rule name) with all bindings kept, and ordered
/// by (subject, rule name, vulnerability). Properties that are not part of
/// the bootstrapped schema produce a warning; such atoms simply bind
/// nothing.
std::vector<Alert> evaluate(const Graph& g, const std::vector<Rule>& rules,
                            std::vector<std::string>* warnings = nullptr,
                            const std::string& raised_at = {});

/// Optionally reflect alerts back into the graph as
/// (subject, soft:RaiseAlert, "Yes") triples.
void materialize_alerts(Graph& g, const std::vector<Alert>& alerts);

}  // namespace depwatch
