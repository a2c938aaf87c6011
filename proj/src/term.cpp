#include "depwatch/term.hpp"

#include <cctype>

#include "depwatch/errors.hpp"

namespace depwatch {

Term Term::iri(std::string v) {
  if (v.empty()) throw Error("IRI value must be non-empty");
  for (char c : v) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      throw Error("IRI value must not contain whitespace: <" + v + ">");
    }
  }
  return Term{TermKind::Iri, std::move(v), {}};
}

Term Term::literal(std::string v, std::string datatype) {
  return Term{TermKind::Literal, std::move(v), std::move(datatype)};
}

Term Term::variable(std::string name) {
  if (name.empty()) throw Error("variable name must be non-empty");
  return Term{TermKind::Variable, std::move(name), {}};
}

}  // namespace depwatch
