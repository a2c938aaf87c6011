#include "depwatch/rules.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "depwatch/errors.hpp"
#include "depwatch/ontology.hpp"
#include "depwatch/util.hpp"

namespace depwatch {

namespace {

constexpr std::string_view kShippedRules = R"(# Alert rules evaluated over the security knowledge graph.
# Body atoms are joined with '^'; the head names the node to alert on.

Rule for vulnerable project utilization:
Product(?x) ^ Utilizes(?x, ?y) ^ hasVulnerability(?y, ?z)
==> RaiseAlert(?x, "Yes")

Rule for linked library vulnerability check:
Product(?x) ^ Is_Linked_To(?x, ?y) ^ hasVulnerability(?y, ?z)
==> RaiseAlert(?x, "Yes")

Rule for secondary linked library vulnerability check:
Product(?x) ^ Is_Linked_To(?x, ?y) ^ Is_Linked_To(?y, ?z) ^ hasVulnerability(?z, ?u)
==> RaiseAlert(?x, "Yes")

Rule for vulnerable libraries:
Library(?x) ^ hasVulnerability(?x, ?y) ^ Is_Linked_To(?z, ?x)
==> RaiseAlert(?z, "Yes")

Rule for vulnerable projects:
Project(?x) ^ hasVulnerability(?x, ?y) ^ Utilizes(?z, ?x)
==> RaiseAlert(?z, "Yes")
)";

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  std::size_t line = 1;
  std::size_t col = 1;

  bool at_end() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_ws() {
    while (!at_end()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        advance();
      } else if (peek() == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, col);
  }
};

bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
         c == '-' || c == '.';
}

std::string read_word(Cursor& cur) {
  std::string word;
  while (!cur.at_end() && (name_char(cur.peek()) || cur.peek() == ':')) {
    word.push_back(cur.peek());
    cur.advance();
  }
  return word;
}

// A name in atom position: bare ontology name, prefixed name, or <iri>.
Term atom_name_term(Cursor& cur) {
  cur.skip_ws();
  if (cur.at_end()) cur.fail("expected atom name");
  if (cur.peek() == '<') {
    cur.advance();
    std::string iri;
    while (!cur.at_end() && cur.peek() != '>') {
      iri.push_back(cur.peek());
      cur.advance();
    }
    if (cur.at_end()) cur.fail("unterminated IRI");
    cur.advance();
    if (auto resolved = vocab::resolve_name(iri)) return *resolved;
    return Term::iri(iri);
  }
  std::string word = read_word(cur);
  if (word.empty()) cur.fail("expected atom name");
  auto colon = word.find(':');
  if (colon != std::string::npos && colon + 1 < word.size()) {
    static const Graph defaults = bootstrap_graph();
    auto it = defaults.prefixes().find(word.substr(0, colon));
    if (it == defaults.prefixes().end()) {
      cur.fail("undeclared prefix '" + word.substr(0, colon) + ":'");
    }
    return Term::iri(it->second + word.substr(colon + 1));
  }
  if (auto resolved = vocab::resolve_name(word)) return *resolved;
  return Term::iri(word);
}

// An argument inside an atom: variable, literal, IRI, or bare name.
Term atom_argument(Cursor& cur) {
  cur.skip_ws();
  if (cur.at_end()) cur.fail("expected atom argument");
  if (cur.peek() == '?') {
    cur.advance();
    std::string name = read_word(cur);
    if (name.empty()) cur.fail("expected variable name after '?'");
    return Term::variable(name);
  }
  if (cur.peek() == '"') {
    cur.advance();
    std::string value;
    while (!cur.at_end() && cur.peek() != '"') {
      value.push_back(cur.peek());
      cur.advance();
    }
    if (cur.at_end()) cur.fail("unterminated string literal");
    cur.advance();
    return Term::literal(value);
  }
  return atom_name_term(cur);
}

void expect_char(Cursor& cur, char c, const char* what) {
  cur.skip_ws();
  if (cur.at_end() || cur.peek() != c) cur.fail(std::string("expected ") + what);
  cur.advance();
}

}  // namespace

Rule parse_rule(std::string_view text) {
  Cursor cur{text};
  cur.skip_ws();

  Rule rule;
  // Optional "Rule for <name>:" header.
  if (text.substr(cur.pos, 4) == "Rule") {
    std::size_t colon = text.find(':', cur.pos);
    if (colon == std::string_view::npos) cur.fail("rule header missing ':'");
    std::string header = std::string(text.substr(cur.pos, colon - cur.pos));
    while (cur.pos <= colon) cur.advance();
    std::string name = trim(header);
    if (starts_with(name, "Rule for ")) {
      name = trim(name.substr(9));
    } else if (starts_with(name, "Rule ")) {
      name = trim(name.substr(5));
    }
    rule.name = name;
  }

  std::set<std::string> body_vars;
  while (true) {
    Term name = atom_name_term(cur);
    expect_char(cur, '(', "'(' after atom name");
    Term first = atom_argument(cur);
    cur.skip_ws();
    if (!cur.at_end() && cur.peek() == ',') {
      cur.advance();
      Term second = atom_argument(cur);
      expect_char(cur, ')', "')' closing atom");
      for (const Term* arg : {&first, &second}) {
        if (arg->is_variable()) body_vars.insert(arg->value);
      }
      rule.body.push_back(PropertyAtom{name, first, second});
    } else {
      expect_char(cur, ')', "')' closing atom");
      if (!first.is_variable()) {
        cur.fail("class atom argument must be a variable");
      }
      body_vars.insert(first.value);
      rule.body.push_back(ClassAtom{name, first.value});
    }
    cur.skip_ws();
    if (!cur.at_end() && cur.peek() == '^') {
      cur.advance();
      continue;
    }
    break;
  }

  cur.skip_ws();
  if (cur.at_end() || text.substr(cur.pos, 3) != "==>") {
    cur.fail("expected '==>' after rule body");
  }
  cur.advance();
  cur.advance();
  cur.advance();

  cur.skip_ws();
  std::string head_name = read_word(cur);
  if (head_name != "RaiseAlert") cur.fail("rule head must be RaiseAlert");
  expect_char(cur, '(', "'(' after RaiseAlert");
  Term head_arg = atom_argument(cur);
  if (!head_arg.is_variable()) cur.fail("RaiseAlert subject must be a variable");
  cur.skip_ws();
  if (!cur.at_end() && cur.peek() == ',') {
    cur.advance();
    Term flag = atom_argument(cur);
    if (!flag.is_literal()) cur.fail("RaiseAlert flag must be a literal");
  }
  expect_char(cur, ')', "')' closing RaiseAlert");

  if (body_vars.count(head_arg.value) == 0) {
    cur.fail("head variable ?" + head_arg.value +
             " does not appear in the rule body");
  }
  rule.head_var = head_arg.value;

  cur.skip_ws();
  if (!cur.at_end()) cur.fail("unexpected text after rule head");
  if (rule.body.empty()) cur.fail("rule body must not be empty");
  return rule;
}

std::vector<Rule> parse_rules(std::string_view text) {
  // Blocks start at "Rule for" headers; a file without headers is one rule.
  std::vector<std::size_t> starts;
  std::size_t search = 0;
  while (true) {
    std::size_t at = text.find("Rule for", search);
    if (at == std::string_view::npos) break;
    bool line_start = at == 0 || text[at - 1] == '\n';
    if (line_start) starts.push_back(at);
    search = at + 1;
  }
  std::vector<Rule> rules;
  if (starts.empty()) {
    if (!trim(text).empty()) rules.push_back(parse_rule(text));
    return rules;
  }
  for (std::size_t i = 0; i < starts.size(); ++i) {
    std::size_t begin = starts[i];
    std::size_t end = i + 1 < starts.size() ? starts[i + 1] : text.size();
    rules.push_back(parse_rule(text.substr(begin, end - begin)));
  }
  return rules;
}

std::vector<Rule> load_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rule file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_rules(buf.str());
}

std::string_view shipped_rules_text() { return kShippedRules; }

const std::vector<Rule>& shipped_rules() {
  static const std::vector<Rule> rules = parse_rules(kShippedRules);
  return rules;
}

namespace {

// Extends the binding rows with every solution of one atom.
std::vector<Binding> extend(const Graph& g, const std::vector<Binding>& rows,
                            const Atom& atom) {
  std::vector<Binding> out;
  if (const auto* cls = std::get_if<ClassAtom>(&atom)) {
    std::set<Term> classes = subclasses_of(g, cls->cls);
    for (const Binding& row : rows) {
      auto bound = row.find(cls->var);
      if (bound != row.end()) {
        for (const Term& c : classes) {
          if (g.contains(Triple{bound->second, vocab::rdf_type(), c})) {
            out.push_back(row);
            break;
          }
        }
      } else {
        std::set<Term> nodes;
        for (const Term& c : classes) {
          for (const Triple& t : g.match(std::nullopt, vocab::rdf_type(), c)) {
            nodes.insert(t.subject);
          }
        }
        for (const Term& node : nodes) {
          Binding next = row;
          next[cls->var] = node;
          out.push_back(std::move(next));
        }
      }
    }
    return out;
  }

  const auto& prop = std::get<PropertyAtom>(atom);
  for (const Binding& row : rows) {
    auto substitute = [&](const Term& t) -> std::optional<Term> {
      if (!t.is_variable()) return t;
      auto it = row.find(t.value);
      if (it != row.end()) return it->second;
      return std::nullopt;
    };
    std::optional<Term> s = substitute(prop.subject);
    std::optional<Term> o = substitute(prop.object);
    for (const Triple& t : g.match(s, prop.property, o)) {
      Binding next = row;
      if (!s) {
        auto [it, fresh] = next.emplace(prop.subject.value, t.subject);
        if (!fresh && it->second != t.subject) continue;
      }
      if (!o) {
        auto [it, fresh] = next.emplace(prop.object.value, t.object);
        if (!fresh && it->second != t.object) continue;
      }
      out.push_back(std::move(next));
    }
  }
  return out;
}

const Term* vulnerability_of(const Rule& rule, const Binding& row) {
  for (const Atom& atom : rule.body) {
    if (const auto* prop = std::get_if<PropertyAtom>(&atom)) {
      if (prop->property == vocab::has_vulnerability()) {
        if (prop->object.is_variable()) {
          auto it = row.find(prop->object.value);
          if (it != row.end()) return &it->second;
        } else {
          return &prop->object;
        }
      }
    }
  }
  return nullptr;
}

}  // namespace

std::vector<Alert> evaluate(const Graph& g, const std::vector<Rule>& rules,
                            std::vector<std::string>* warnings,
                            const std::string& raised_at) {
  std::vector<Alert> alerts;
  for (const Rule& rule : rules) {
    if (warnings) {
      for (const Atom& atom : rule.body) {
        if (const auto* prop = std::get_if<PropertyAtom>(&atom)) {
          bool known = g.contains(Triple{prop->property, vocab::rdf_type(),
                                         vocab::rdf_property()});
          if (!known &&
              g.match(std::nullopt, prop->property, std::nullopt).empty()) {
            warnings->push_back("rule '" + rule.name +
                                "': unknown property <" +
                                prop->property.value + ">");
          }
        }
      }
    }

    std::vector<Binding> rows{{}};
    for (const Atom& atom : rule.body) {
      rows = extend(g, rows, atom);
      if (rows.empty()) break;
    }
    std::set<Binding> unique(rows.begin(), rows.end());

    // One alert per (subject, vulnerability); all satisfying bindings kept.
    std::map<std::pair<Term, Term>, Alert> grouped;
    for (const Binding& row : unique) {
      Term subject = row.at(rule.head_var);
      const Term* vuln = vulnerability_of(rule, row);
      Term vulnerability = vuln ? *vuln : Term{};
      auto key = std::make_pair(subject, vulnerability);
      auto it = grouped.find(key);
      if (it == grouped.end()) {
        Alert alert;
        alert.subject = subject;
        alert.vulnerability = vulnerability;
        alert.rule_name = rule.name;
        alert.raised_at = raised_at;
        it = grouped.emplace(key, std::move(alert)).first;
      }
      it->second.bindings.push_back(row);
    }
    for (auto& [key, alert] : grouped) {
      std::sort(alert.bindings.begin(), alert.bindings.end());
      alerts.push_back(std::move(alert));
    }
  }
  std::sort(alerts.begin(), alerts.end(),
            [](const Alert& a, const Alert& b) {
              return std::tie(a.subject, a.rule_name, a.vulnerability) <
                     std::tie(b.subject, b.rule_name, b.vulnerability);
            });
  return alerts;
}

void materialize_alerts(Graph& g, const std::vector<Alert>& alerts) {
  for (const Alert& alert : alerts) {
    g.insert(alert.subject, vocab::raise_alert(), Term::literal("Yes"));
  }
}

}  // namespace depwatch
