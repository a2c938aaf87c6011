#include "depwatch/ontology.hpp"

#include <map>

namespace depwatch::vocab {

namespace {

Term make(std::string_view nsiri, std::string_view local) {
  return Term::iri(std::string(nsiri) + std::string(local));
}

}  // namespace

#define DEPWATCH_VOCAB_TERM(fn, nsiri, local)      \
  const Term& fn() {                               \
    static const Term t = make(nsiri, local);      \
    return t;                                      \
  }

DEPWATCH_VOCAB_TERM(software, ns::soft, "Software")
DEPWATCH_VOCAB_TERM(product, ns::soft, "Product")
DEPWATCH_VOCAB_TERM(project, ns::soft, "Project")
DEPWATCH_VOCAB_TERM(library, ns::soft, "Library")
DEPWATCH_VOCAB_TERM(uco_product, ns::uco, "Product")
DEPWATCH_VOCAB_TERM(vulnerability, ns::uco, "Vulnerability")
DEPWATCH_VOCAB_TERM(intelligence, ns::intel, "Intelligence")

DEPWATCH_VOCAB_TERM(is_linked_to, ns::soft, "Is_Linked_To")
DEPWATCH_VOCAB_TERM(utilizes, ns::soft, "Utilizes")
DEPWATCH_VOCAB_TERM(has_vulnerability, ns::uco, "hasVulnerability")
DEPWATCH_VOCAB_TERM(intel_has_vulnerability, ns::intel, "hasVulnerability")
DEPWATCH_VOCAB_TERM(affects_product, ns::uco, "affectsProduct")
DEPWATCH_VOCAB_TERM(same_as, ns::owl, "sameAs")
DEPWATCH_VOCAB_TERM(raise_alert, ns::soft, "RaiseAlert")

DEPWATCH_VOCAB_TERM(rdf_type, ns::rdf, "type")
DEPWATCH_VOCAB_TERM(rdfs_subclass_of, ns::rdfs, "subClassOf")
DEPWATCH_VOCAB_TERM(owl_class, ns::owl, "Class")
DEPWATCH_VOCAB_TERM(rdf_property, ns::rdf, "Property")

#undef DEPWATCH_VOCAB_TERM

std::optional<Term> resolve_name(std::string_view name) {
  static const std::map<std::string_view, const Term& (*)()> table = {
      {"Software", &software},
      {"Product", &product},
      {"Project", &project},
      {"Library", &library},
      {"Vulnerability", &vulnerability},
      {"Intelligence", &intelligence},
      {"Is_Linked_To", &is_linked_to},
      {"Utilizes", &utilizes},
      {"hasVulnerability", &has_vulnerability},
      {"affectsProduct", &affects_product},
      {"sameAs", &same_as},
      {"RaiseAlert", &raise_alert},
      {"type", &rdf_type},
      {"subClassOf", &rdfs_subclass_of},
  };
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second();
}

}  // namespace depwatch::vocab
