#include "depwatch/entity_link.hpp"

#include <fstream>

#include "depwatch/errors.hpp"
#include "depwatch/ontology.hpp"
#include "depwatch/util.hpp"

namespace depwatch {

namespace {

Term parse_alias_target(const std::string& token, const Graph& prefix_source,
                        const std::filesystem::path& file, std::size_t lineno) {
  if (token.size() >= 2 && token.front() == '<' && token.back() == '>') {
    return Term::iri(token.substr(1, token.size() - 2));
  }
  auto colon = token.find(':');
  if (colon != std::string::npos) {
    std::string prefix = token.substr(0, colon);
    auto it = prefix_source.prefixes().find(prefix);
    if (it != prefix_source.prefixes().end()) {
      return Term::iri(it->second + token.substr(colon + 1));
    }
  }
  throw ConfigError("alias target must be <iri> or prefixed name (" +
                    file.string() + ":" + std::to_string(lineno) + ")");
}

}  // namespace

AliasTable AliasTable::load(const std::filesystem::path& path,
                            const Graph& prefix_source) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open alias table: " + path.string());
  AliasTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ConfigError("alias line has no TAB separator (" + path.string() +
                        ":" + std::to_string(lineno) + ")");
    }
    std::string surface = line.substr(0, tab);
    std::string target = trim(line.substr(tab + 1));
    if (normalize_surface(surface).empty()) {
      throw ConfigError("alias surface form is empty (" + path.string() + ":" +
                        std::to_string(lineno) + ")");
    }
    table.add(surface, parse_alias_target(target, prefix_source, path, lineno));
  }
  return table;
}

void AliasTable::add(std::string_view surface, Term canonical) {
  std::string key = normalize_surface(surface);
  if (key.empty()) throw ConfigError("alias surface form is empty");
  entries_[std::move(key)] = std::move(canonical);
}

std::optional<Term> AliasTable::lookup(std::string_view surface) const {
  auto it = entries_.find(normalize_surface(surface));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<Term> link_entity(std::string_view surface,
                                const AliasTable& table,
                                const RemoteLinkHook& remote) {
  if (auto hit = table.lookup(surface)) return hit;
  if (remote) return remote(surface);
  return std::nullopt;
}

void emit_sameas(Graph& g, const Term& local, const Term& canonical) {
  g.insert(local, vocab::same_as(), canonical);
}

}  // namespace depwatch
