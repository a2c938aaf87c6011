#pragma once

#include <compare>
#include <string>

namespace depwatch {

enum class TermKind { Iri, Literal, Variable };

/// An RDF term. IRI values are stored fully expanded, or in the relative
/// form they were minted with (`libc.so.6`, `/usr/bin/python3.6`). Literals
/// carry an optional datatype IRI. Variables exist only in patterns, queries,
/// and rules; the store rejects them.
struct Term {
  TermKind kind = TermKind::Iri;
  std::string value;
  std::string datatype;  // literals only

  static Term iri(std::string v);
  static Term literal(std::string v, std::string datatype = {});
  static Term variable(std::string name);  // name without the leading '?'

  bool is_iri() const { return kind == TermKind::Iri; }
  bool is_literal() const { return kind == TermKind::Literal; }
  bool is_variable() const { return kind == TermKind::Variable; }

  auto operator<=>(const Term&) const = default;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  auto operator<=>(const Triple&) const = default;
};

}  // namespace depwatch
