#include "depwatch/graph.hpp"

#include <algorithm>
#include <deque>

#include "depwatch/errors.hpp"
#include "depwatch/ontology.hpp"

namespace depwatch {

namespace {

void check_storable(const Triple& t) {
  if (t.subject.is_variable() || t.predicate.is_variable() ||
      t.object.is_variable()) {
    throw Error("cannot store a triple containing a variable");
  }
  if (t.subject.is_literal()) {
    throw Error("triple subject must be an IRI, got literal \"" +
                t.subject.value + "\"");
  }
  if (t.predicate.is_literal()) {
    throw Error("triple predicate must be an IRI, got literal \"" +
                t.predicate.value + "\"");
  }
}

}  // namespace

bool Graph::insert(const Triple& t) {
  check_storable(t);
  return triples_.insert(t).second;
}

bool Graph::insert(Term subject, Term predicate, Term object) {
  return insert(Triple{std::move(subject), std::move(predicate),
                       std::move(object)});
}

std::vector<Triple> Graph::match(const std::optional<Term>& subject,
                                 const std::optional<Term>& predicate,
                                 const std::optional<Term>& object) const {
  std::vector<Triple> out;
  auto agrees = [&](const Triple& t) {
    return (!predicate || t.predicate == *predicate) &&
           (!object || t.object == *object);
  };
  if (subject) {
    // Triples are ordered by subject first, so a concrete subject is a
    // contiguous range.
    auto it = triples_.lower_bound(Triple{*subject, Term{}, Term{}});
    for (; it != triples_.end() && it->subject == *subject; ++it) {
      if (agrees(*it)) out.push_back(*it);
    }
  } else {
    for (const Triple& t : triples_) {
      if (agrees(t)) out.push_back(t);
    }
  }
  return out;
}

void Graph::add_prefix(const std::string& label, const std::string& iri) {
  prefixes_[label] = iri;
}

void Graph::merge(const Graph& other) {
  for (const auto& [label, iri] : other.prefixes_) prefixes_[label] = iri;
  for (const Triple& t : other.triples_) triples_.insert(t);
}

bool Graph::is_subgraph_of(const Graph& other) const {
  return std::includes(other.triples_.begin(), other.triples_.end(),
                       triples_.begin(), triples_.end());
}

Graph bootstrap_graph() {
  Graph g;
  g.add_prefix("uco", std::string(ns::uco));
  g.add_prefix("soft", std::string(ns::soft));
  g.add_prefix("intel", std::string(ns::intel));
  g.add_prefix("rdf", std::string(ns::rdf));
  g.add_prefix("rdfs", std::string(ns::rdfs));
  g.add_prefix("owl", std::string(ns::owl));
  g.add_prefix("xsd", std::string(ns::xsd));
  g.add_prefix("dbp", std::string(ns::dbp));

  const Term& cls = vocab::owl_class();
  const Term& prop = vocab::rdf_property();
  const Term& type = vocab::rdf_type();

  for (const Term& c : {vocab::software(), vocab::product(), vocab::project(),
                        vocab::library(), vocab::uco_product(),
                        vocab::vulnerability(), vocab::intelligence()}) {
    g.insert(c, type, cls);
  }
  for (const Term& sub :
       {vocab::product(), vocab::project(), vocab::library()}) {
    g.insert(sub, vocab::rdfs_subclass_of(), vocab::software());
  }
  for (const Term& p :
       {vocab::is_linked_to(), vocab::utilizes(), vocab::has_vulnerability(),
        vocab::intel_has_vulnerability(), vocab::affects_product(),
        vocab::same_as(), vocab::raise_alert()}) {
    g.insert(p, type, prop);
  }
  return g;
}

bool is_subclass_of(const Graph& g, const Term& sub, const Term& super) {
  if (sub == super) return true;
  std::deque<Term> frontier{sub};
  std::set<Term> seen{sub};
  while (!frontier.empty()) {
    Term cur = frontier.front();
    frontier.pop_front();
    for (const Triple& t :
         g.match(cur, vocab::rdfs_subclass_of(), std::nullopt)) {
      if (t.object == super) return true;
      if (seen.insert(t.object).second) frontier.push_back(t.object);
    }
  }
  return false;
}

std::set<Term> subclasses_of(const Graph& g, const Term& cls) {
  std::set<Term> out{cls};
  std::deque<Term> frontier{cls};
  while (!frontier.empty()) {
    Term cur = frontier.front();
    frontier.pop_front();
    for (const Triple& t :
         g.match(std::nullopt, vocab::rdfs_subclass_of(), cur)) {
      if (out.insert(t.subject).second) frontier.push_back(t.subject);
    }
  }
  return out;
}

}  // namespace depwatch
