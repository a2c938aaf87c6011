#include "depwatch/turtle.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "depwatch/errors.hpp"
#include "depwatch/ontology.hpp"

namespace depwatch {

namespace {

bool pn_local_ok(std::string_view local) {
  if (local.empty()) return false;
  auto head = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  auto body = [&](char c) { return head(c) || c == '-' || c == '.'; };
  if (!head(local.front())) return false;
  for (char c : local.substr(1)) {
    if (!body(c)) return false;
  }
  return local.back() != '.';
}

std::string escape_literal(std::string_view v) {
  std::string out;
  out.reserve(v.size() + 2);
  for (char c : v) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string iri_to_turtle(const std::string& iri, const Graph& g) {
  // Longest declared namespace wins; fall back to angle brackets.
  const std::string* best_label = nullptr;
  std::size_t best_len = 0;
  for (const auto& [label, nsiri] : g.prefixes()) {
    if (nsiri.size() > best_len && iri.size() > nsiri.size() &&
        iri.compare(0, nsiri.size(), nsiri) == 0 &&
        pn_local_ok(std::string_view(iri).substr(nsiri.size()))) {
      best_label = &label;
      best_len = nsiri.size();
    }
  }
  if (best_label) return *best_label + ":" + iri.substr(best_len);
  return "<" + iri + ">";
}

}  // namespace

std::string term_to_turtle(const Term& t, const Graph& g) {
  switch (t.kind) {
    case TermKind::Iri:
      return iri_to_turtle(t.value, g);
    case TermKind::Literal: {
      std::string out = "\"" + escape_literal(t.value) + "\"";
      if (!t.datatype.empty()) out += "^^" + iri_to_turtle(t.datatype, g);
      return out;
    }
    case TermKind::Variable:
      return "?" + t.value;
  }
  return {};
}

std::string serialize_turtle(const Graph& g) {
  std::ostringstream out;
  for (const auto& [label, iri] : g.prefixes()) {
    out << "@prefix " << label << ": <" << iri << "> .\n";
  }
  if (g.empty()) return out.str();

  // Group the (already sorted) triple set by subject. Within one subject,
  // rdf:type comes first and renders as `a`.
  const Term& type = vocab::rdf_type();
  std::map<Term, std::vector<const Triple*>> by_subject;
  for (const Triple& t : g.triples()) {
    by_subject[t.subject].push_back(&t);
  }
  for (const auto& [subject, entries] : by_subject) {
    std::vector<const Triple*> ordered;
    for (const Triple* t : entries) {
      if (t->predicate == type) ordered.push_back(t);
    }
    for (const Triple* t : entries) {
      if (t->predicate != type) ordered.push_back(t);
    }
    out << "\n" << term_to_turtle(subject, g);
    bool first = true;
    for (const Triple* t : ordered) {
      if (!first) out << " ;\n   ";
      out << " "
          << (t->predicate == type ? "a" : term_to_turtle(t->predicate, g))
          << " " << term_to_turtle(t->object, g);
      first = false;
    }
    out << " .\n";
  }
  return out.str();
}

namespace {

// ---- Parser -------------------------------------------------------------

enum class TokKind {
  PrefixKeyword,  // @prefix
  IriRef,         // <...> (value = inner text)
  PName,          // prefix:local (value as written)
  PNameNs,        // prefix:   (prefix declaration form)
  A,              // the keyword 'a'
  String,         // "..." (value = unescaped text)
  HatHat,         // ^^
  Dot,
  Semicolon,
  End,
};

struct Token {
  TokKind kind;
  std::string value;
  std::size_t line;
  std::size_t col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_ws_and_comments();
    std::size_t line = line_, col = col_;
    if (at_end()) return {TokKind::End, "", line, col};
    char c = peek();
    if (c == '.') {
      advance();
      return {TokKind::Dot, ".", line, col};
    }
    if (c == ';') {
      advance();
      return {TokKind::Semicolon, ";", line, col};
    }
    if (c == '<') return iriref(line, col);
    if (c == '"') return string_literal(line, col);
    if (c == '^') {
      advance();
      if (at_end() || peek() != '^') {
        throw ParseError("expected '^^'", line, col);
      }
      advance();
      return {TokKind::HatHat, "^^", line, col};
    }
    if (c == '@') return at_keyword(line, col);
    if (is_name_char(c)) return name(line, col);
    throw ParseError(std::string("unexpected character '") + c + "'", line,
                     col);
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '-' || c == '.' || c == '+' || c == '%' || c == '/';
  }

  void skip_ws_and_comments() {
    while (!at_end()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token iriref(std::size_t line, std::size_t col) {
    advance();  // '<'
    std::string value;
    while (!at_end() && peek() != '>') {
      char c = peek();
      if (c == '\n') throw ParseError("unterminated IRI", line, col);
      if (std::isspace(static_cast<unsigned char>(c))) {
        throw ParseError("whitespace inside IRI", line_, col_);
      }
      value.push_back(c);
      advance();
    }
    if (at_end()) throw ParseError("unterminated IRI", line, col);
    advance();  // '>'
    if (value.empty()) throw ParseError("empty IRI", line, col);
    return {TokKind::IriRef, value, line, col};
  }

  Token string_literal(std::size_t line, std::size_t col) {
    advance();  // opening quote
    std::string value;
    while (true) {
      if (at_end()) throw ParseError("unterminated string", line, col);
      char c = peek();
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (at_end()) throw ParseError("unterminated escape", line_, col_);
        char e = peek();
        switch (e) {
          case '"': value.push_back('"'); break;
          case '\\': value.push_back('\\'); break;
          case 'n': value.push_back('\n'); break;
          case 'r': value.push_back('\r'); break;
          case 't': value.push_back('\t'); break;
          default:
            throw ParseError(std::string("unsupported escape '\\") + e + "'",
                             line_, col_);
        }
        advance();
      } else {
        value.push_back(c);
        advance();
      }
    }
    return {TokKind::String, value, line, col};
  }

  Token at_keyword(std::size_t line, std::size_t col) {
    std::string word;
    advance();  // '@'
    while (!at_end() && std::isalpha(static_cast<unsigned char>(peek()))) {
      word.push_back(peek());
      advance();
    }
    if (word != "prefix") {
      throw ParseError("unknown directive '@" + word + "'", line, col);
    }
    return {TokKind::PrefixKeyword, word, line, col};
  }

  Token name(std::size_t line, std::size_t col) {
    std::string word;
    while (!at_end() && (is_name_char(peek()) || peek() == ':')) {
      word.push_back(peek());
      advance();
    }
    // A bare statement terminator can get glued onto a name; give the
    // trailing dots back.
    std::size_t glued = 0;
    while (word.size() > glued + 1 && word[word.size() - 1 - glued] == '.' &&
           word.find(':') != std::string::npos) {
      ++glued;
    }
    // Only strip when the dot is really a terminator (prefixed names may
    // contain dots but must not end with one).
    if (glued > 0) {
      for (std::size_t i = 0; i < glued; ++i) push_back_char();
      word.resize(word.size() - glued);
    }
    if (word == "a") return {TokKind::A, word, line, col};
    auto colon = word.find(':');
    if (colon == std::string::npos) {
      throw ParseError("expected IRI, prefixed name, or keyword, got '" +
                           word + "'",
                       line, col);
    }
    if (colon == word.size() - 1) return {TokKind::PNameNs, word, line, col};
    return {TokKind::PName, word, line, col};
  }

  void push_back_char() {
    --pos_;
    --col_;  // '.' never spans lines
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { bump(); }

  Graph run() {
    while (tok_.kind != TokKind::End) {
      if (tok_.kind == TokKind::PrefixKeyword) {
        prefix_directive();
      } else {
        triples_statement();
      }
    }
    return std::move(graph_);
  }

 private:
  void bump() { tok_ = lexer_.next(); }

  void expect(TokKind kind, const char* what) {
    if (tok_.kind != kind) {
      throw ParseError(std::string("expected ") + what, tok_.line, tok_.col);
    }
  }

  void prefix_directive() {
    bump();  // @prefix
    expect(TokKind::PNameNs, "prefix label ending in ':'");
    std::string label = tok_.value.substr(0, tok_.value.size() - 1);
    bump();
    expect(TokKind::IriRef, "namespace IRI");
    std::string iri = tok_.value;
    bump();
    expect(TokKind::Dot, "'.' after prefix directive");
    bump();
    graph_.add_prefix(label, iri);
  }

  Term expand_pname(const Token& tok) const {
    auto colon = tok.value.find(':');
    std::string prefix = tok.value.substr(0, colon);
    std::string local = tok.value.substr(colon + 1);
    auto it = graph_.prefixes().find(prefix);
    if (it == graph_.prefixes().end()) {
      throw ParseError("undeclared prefix '" + prefix + ":'", tok.line,
                       tok.col);
    }
    return Term::iri(it->second + local);
  }

  Term node_term(const char* position) {
    if (tok_.kind == TokKind::IriRef) {
      Term t = Term::iri(tok_.value);
      bump();
      return t;
    }
    if (tok_.kind == TokKind::PName) {
      Term t = expand_pname(tok_);
      bump();
      return t;
    }
    throw ParseError(std::string("expected IRI for ") + position, tok_.line,
                     tok_.col);
  }

  Term object_term() {
    if (tok_.kind == TokKind::String) {
      std::string value = tok_.value;
      bump();
      std::string datatype;
      if (tok_.kind == TokKind::HatHat) {
        bump();
        Term dt = node_term("datatype");
        datatype = dt.value;
      }
      return Term::literal(value, datatype);
    }
    return node_term("object");
  }

  void triples_statement() {
    Term subject = node_term("subject");
    while (true) {
      Term predicate;
      if (tok_.kind == TokKind::A) {
        predicate = vocab::rdf_type();
        bump();
      } else {
        predicate = node_term("predicate");
      }
      Term object = object_term();
      graph_.insert(subject, predicate, object);
      if (tok_.kind == TokKind::Semicolon) {
        bump();
        // Tolerate a trailing ';' before the closing dot.
        if (tok_.kind == TokKind::Dot) break;
        continue;
      }
      break;
    }
    expect(TokKind::Dot, "'.' at end of statement");
    bump();
  }

  Lexer lexer_;
  Token tok_{TokKind::End, "", 0, 0};
  Graph graph_;
};

}  // namespace

Graph parse_turtle(std::string_view text) { return Parser(text).run(); }

Graph load_turtle_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open Turtle file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_turtle(buf.str());
}

void save_turtle_file(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write Turtle file: " + path.string());
  out << serialize_turtle(g);
}

}  // namespace depwatch
