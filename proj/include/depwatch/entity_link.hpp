#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "depwatch/graph.hpp"

namespace depwatch {

/// Surface-form to canonical-IRI table. Keys are normalized (lowercase,
/// internal whitespace collapsed). A lookup miss is a miss; nothing is guessed.
class AliasTable {
 public:
  /// Loads `surface<TAB>IRI` lines; the IRI may be a prefixed name resolved
  /// against the given graph's prefixes, or an angle-bracket IRI.
  static AliasTable load(const std::filesystem::path& path,
                         const Graph& prefix_source);

  void add(std::string_view surface, Term canonical);
  std::optional<Term> lookup(std::string_view surface) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, Term>& entries() const { return entries_; }

 private:
  std::map<std::string, Term> entries_;
};

/// Optional remote resolver (Spotlight-style lookups). Disabled by default;
/// the pipeline never turns it on by itself.
using RemoteLinkHook =
    std::function<std::optional<Term>(std::string_view surface)>;

std::optional<Term> link_entity(std::string_view surface,
                                const AliasTable& table,
                                const RemoteLinkHook& remote = {});

/// Asserts (local, owl:sameAs, canonical); set semantics make repeats free.
void emit_sameas(Graph& g, const Term& local, const Term& canonical);

}  // namespace depwatch
