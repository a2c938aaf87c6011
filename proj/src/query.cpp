#include "depwatch/query.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "depwatch/errors.hpp"
#include "depwatch/ontology.hpp"
#include "depwatch/util.hpp"

namespace depwatch {

namespace {

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
         c == '-' || c == '.' || c == '/';
}

std::string read_word(Cursor& cur) {
  std::string word;
  while (!cur.at_end() && (name_char(cur.peek()) || cur.peek() == ':')) {
    word.push_back(cur.peek());
    cur.advance();
  }
  return word;
}

bool keyword(Cursor& cur, std::string_view kw) {
  cur.skip_ws();
  if (cur.pos + kw.size() > cur.text.size()) return false;
  for (std::size_t i = 0; i < kw.size(); ++i) {
    char a = cur.text[cur.pos + i];
    char b = kw[i];
    if (std::tolower(static_cast<unsigned char>(a)) !=
        std::tolower(static_cast<unsigned char>(b))) {
      return false;
    }
  }
  std::size_t after = cur.pos + kw.size();
  if (after < cur.text.size() && name_char(cur.text[after])) return false;
  for (std::size_t i = 0; i < kw.size(); ++i) cur.advance();
  return true;
}

const std::map<std::string, std::string>& default_prefixes() {
  static const std::map<std::string, std::string> prefixes =
      bootstrap_graph().prefixes();
  return prefixes;
}

bool looks_absolute(const std::string& iri) {
  auto colon = iri.find(':');
  return colon != std::string::npos && colon > 0;
}

// subject/object position: <iri> kept verbatim; predicate position: a bare
// <name> resolves through the ontology vocabulary.
Term pattern_term(Cursor& cur, bool predicate_position) {
  cur.skip_ws();
  if (cur.at_end()) cur.fail("expected pattern term");
  char c = cur.peek();
  if (c == '?') {
    cur.advance();
    std::string name = read_word(cur);
    if (name.empty()) cur.fail("expected variable name after '?'");
    return Term::variable(name);
  }
  if (c == '<') {
    cur.advance();
    std::string iri;
    while (!cur.at_end() && cur.peek() != '>') {
      if (std::isspace(static_cast<unsigned char>(cur.peek()))) {
        cur.fail("whitespace inside IRI");
      }
      iri.push_back(cur.peek());
      cur.advance();
    }
    if (cur.at_end()) cur.fail("unterminated IRI");
    cur.advance();
    if (iri.empty()) cur.fail("empty IRI");
    if (predicate_position && !looks_absolute(iri)) {
      if (auto resolved = vocab::resolve_name(iri)) return *resolved;
    }
    return Term::iri(iri);
  }
  if (c == '"') {
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
  if (name_char(c)) {
    std::size_t line = cur.line, col = cur.col;
    std::string word = read_word(cur);
    if (word == "a" && predicate_position) return vocab::rdf_type();
    auto colon = word.find(':');
    if (colon != std::string::npos && colon + 1 < word.size()) {
      auto it = default_prefixes().find(word.substr(0, colon));
      if (it == default_prefixes().end()) {
        throw ParseError("undeclared prefix '" + word.substr(0, colon) + ":'",
                         line, col);
      }
      return Term::iri(it->second + word.substr(colon + 1));
    }
    if (predicate_position) {
      if (auto resolved = vocab::resolve_name(word)) return *resolved;
    }
    throw ParseError("expected variable, IRI, or prefixed name, got '" +
                         word + "'",
                     line, col);
  }
  cur.fail(std::string("unexpected character '") + c + "'");
}

}  // namespace

Query parse_query(std::string_view text) {
  Cursor cur{text};
  if (!keyword(cur, "SELECT")) cur.fail("query must start with SELECT");

  Query query;
  cur.skip_ws();
  while (!cur.at_end() && cur.peek() == '?') {
    cur.advance();
    std::string name = read_word(cur);
    if (name.empty()) cur.fail("expected variable name after '?'");
    query.select_vars.push_back(name);
    cur.skip_ws();
  }
  if (query.select_vars.empty()) {
    cur.fail("SELECT needs at least one variable");
  }
  if (!keyword(cur, "WHERE")) cur.fail("expected WHERE");
  cur.skip_ws();
  if (cur.at_end() || cur.peek() != '{') cur.fail("expected '{'");
  cur.advance();

  std::set<std::string> pattern_vars;
  while (true) {
    cur.skip_ws();
    if (cur.at_end()) cur.fail("unterminated WHERE block");
    if (cur.peek() == '}') {
      cur.advance();
      break;
    }
    TriplePattern pattern;
    pattern.subject = pattern_term(cur, false);
    pattern.predicate = pattern_term(cur, true);
    pattern.object = pattern_term(cur, false);
    for (const Term* t :
         {&pattern.subject, &pattern.predicate, &pattern.object}) {
      if (t->is_variable()) pattern_vars.insert(t->value);
    }
    if (pattern.predicate.is_literal()) {
      cur.fail("pattern predicate cannot be a literal");
    }
    if (pattern.subject.is_literal()) {
      cur.fail("pattern subject cannot be a literal");
    }
    query.patterns.push_back(std::move(pattern));
    cur.skip_ws();
    if (!cur.at_end() && cur.peek() == '.') cur.advance();
  }
  cur.skip_ws();
  if (!cur.at_end()) cur.fail("unexpected text after query");

  if (query.patterns.empty()) cur.fail("WHERE block has no patterns");
  for (const std::string& var : query.select_vars) {
    if (pattern_vars.count(var) == 0) {
      throw ParseError("selected variable ?" + var +
                           " does not appear in any pattern",
                       1, 1);
    }
  }
  return query;
}

ResultTable execute(const Query& q, const Graph& g) {
  using Binding = std::map<std::string, Term>;
  std::vector<Binding> rows{{}};
  for (const TriplePattern& pattern : q.patterns) {
    std::vector<Binding> next_rows;
    for (const Binding& row : rows) {
      auto substitute = [&](const Term& t) -> std::optional<Term> {
        if (!t.is_variable()) return t;
        auto it = row.find(t.value);
        if (it != row.end()) return it->second;
        return std::nullopt;
      };
      std::optional<Term> s = substitute(pattern.subject);
      std::optional<Term> p = substitute(pattern.predicate);
      std::optional<Term> o = substitute(pattern.object);
      for (const Triple& t : g.match(s, p, o)) {
        Binding next = row;
        bool consistent = true;
        auto bind = [&](const Term& var, const Term& value) {
          auto [it, fresh] = next.emplace(var.value, value);
          if (!fresh && it->second != value) consistent = false;
        };
        if (!s) bind(pattern.subject, t.subject);
        if (!p && consistent) bind(pattern.predicate, t.predicate);
        if (!o && consistent) bind(pattern.object, t.object);
        if (consistent) next_rows.push_back(std::move(next));
      }
    }
    rows = std::move(next_rows);
    if (rows.empty()) break;
  }

  ResultTable table;
  table.header = q.select_vars;
  std::set<std::vector<Term>> projected;
  for (const Binding& row : rows) {
    std::vector<Term> out;
    out.reserve(q.select_vars.size());
    for (const std::string& var : q.select_vars) {
      out.push_back(row.at(var));
    }
    projected.insert(std::move(out));
  }
  table.rows.assign(projected.begin(), projected.end());
  return table;
}

nlohmann::json to_sparql_json(const ResultTable& table) {
  nlohmann::json head;
  head["vars"] = table.header;
  nlohmann::json bindings = nlohmann::json::array();
  for (const std::vector<Term>& row : table.rows) {
    nlohmann::json binding = nlohmann::json::object();
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      const Term& t = row[i];
      nlohmann::json cell;
      cell["type"] = t.is_literal() ? "literal" : "uri";
      cell["value"] = t.value;
      if (t.is_literal() && !t.datatype.empty()) {
        cell["datatype"] = t.datatype;
      }
      binding[table.header[i]] = std::move(cell);
    }
    bindings.push_back(std::move(binding));
  }
  nlohmann::json out;
  out["head"] = std::move(head);
  out["results"]["bindings"] = std::move(bindings);
  return out;
}

}  // namespace depwatch
