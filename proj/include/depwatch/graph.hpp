#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "depwatch/term.hpp"

namespace depwatch {

/// In-memory triple store with set semantics. Triples are kept in (subject,
/// predicate, object) order, which makes subject-bound lookups range scans
/// and gives every traversal a deterministic order.
class Graph {
 public:
  /// Inserts a triple. Returns false when it was already present.
  /// Throws Error for triples containing variables, or a literal in
  /// subject or predicate position.
  bool insert(const Triple& t);
  bool insert(Term subject, Term predicate, Term object);

  bool contains(const Triple& t) const { return triples_.count(t) > 0; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  /// All triples agreeing with the concrete positions of the pattern;
  /// std::nullopt is a wildcard. Result is sorted.
  std::vector<Triple> match(const std::optional<Term>& subject,
                            const std::optional<Term>& predicate,
                            const std::optional<Term>& object) const;

  const std::set<Triple>& triples() const { return triples_; }

  void add_prefix(const std::string& label, const std::string& iri);
  const std::map<std::string, std::string>& prefixes() const {
    return prefixes_;
  }

  /// Adds every triple and prefix of `other` to this graph.
  void merge(const Graph& other);

  bool is_subgraph_of(const Graph& other) const;

  bool operator==(const Graph& other) const {
    return triples_ == other.triples_;
  }

 private:
  std::set<Triple> triples_;
  std::map<std::string, std::string> prefixes_;
};

/// Fresh graph holding the ontology schema (software-dependency classes and
/// properties plus the UCO and intelligence subset used by the pipeline) and
/// the default prefix block. Deterministic.
Graph bootstrap_graph();

/// Reflexive-transitive subclass check over the graph's rdfs:subClassOf
/// edges.
bool is_subclass_of(const Graph& g, const Term& sub, const Term& super);

/// `cls` plus everything below it in the rdfs:subClassOf hierarchy.
std::set<Term> subclasses_of(const Graph& g, const Term& cls);

}  // namespace depwatch
