#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "depwatch/term.hpp"

namespace depwatch::ns {

inline constexpr std::string_view uco = "http://accl.umbc.edu/ns/ontology/uco#";
inline constexpr std::string_view soft =
    "http://accl.umbc.edu/ns/ontology/software#";
inline constexpr std::string_view intel =
    "http://accl.umbc.edu/ns/ontology/intelligence#";
inline constexpr std::string_view rdf =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view owl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view dbp = "http://dbpedia.org/resource#";

}  // namespace depwatch::ns

namespace depwatch::vocab {

// Classes
const Term& software();       // soft:Software
const Term& product();        // soft:Product
const Term& project();        // soft:Project
const Term& library();        // soft:Library
const Term& uco_product();    // uco:Product (minted for unmatched intel)
const Term& vulnerability();  // uco:Vulnerability
const Term& intelligence();   // intel:Intelligence

// Properties
const Term& is_linked_to();            // soft:Is_Linked_To
const Term& utilizes();                // soft:Utilizes
const Term& has_vulnerability();       // uco:hasVulnerability
const Term& intel_has_vulnerability();  // intel:hasVulnerability
const Term& affects_product();         // uco:affectsProduct
const Term& same_as();                 // owl:sameAs
const Term& raise_alert();             // soft:RaiseAlert

// RDF machinery
const Term& rdf_type();
const Term& rdfs_subclass_of();
const Term& owl_class();
const Term& rdf_property();

/// Resolves a bare ontology name, as rules and queries write them
/// (`Product`, `hasVulnerability`, `Is_Linked_To`), to its IRI.
std::optional<Term> resolve_name(std::string_view name);

}  // namespace depwatch::vocab
