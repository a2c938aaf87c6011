#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "depwatch/graph.hpp"

namespace depwatch {

struct ProgramRecord {
  std::string path;  // absolute path when resolved, bare soname otherwise
  enum class Kind { Product, Library } kind = Kind::Product;
  bool resolved = true;

  bool operator==(const ProgramRecord&) const = default;
};

/// Walks the given roots and returns one record per dynamically linked
/// executable or shared object, in lexicographic path order. Unreadable
/// files are skipped with a warning appended to `warnings`; an unreadable
/// or missing root throws ScanError naming it.
std::vector<ProgramRecord> enumerate_programs(
    const std::vector<std::filesystem::path>& roots,
    std::vector<std::string>* warnings = nullptr);

/// Loader-style first-match search across the ordered directory list. A
/// miss is a value, not an error: the record comes back unresolved with the
/// bare soname.
ProgramRecord resolve_library(const std::string& soname,
                              const std::vector<std::filesystem::path>& search_paths);

struct ScanOptions {
  std::vector<std::filesystem::path> roots;
  std::vector<std::filesystem::path> search_paths;
  int max_depth = 2;
  /// When set, emitted program IRIs are the paths relative to this
  /// directory, written as absolute image paths. Lets a fixture tree or a
  /// mounted OS image scan produce the same IRIs as a live machine.
  std::filesystem::path sysroot;
  /// Explicit product-path -> project-name assignments (Utilizes edges).
  std::map<std::string, std::string> utilizes;
  /// Tracked repository names; a product whose basename equals one of these
  /// gets a Utilizes edge to that project.
  std::vector<std::string> tracked_projects;
};

struct ScanStats {
  std::size_t products = 0;
  std::size_t libraries = 0;
  std::size_t links = 0;
  std::size_t utilizes = 0;
  std::vector<std::string> warnings;
};

/// Asserts the dependency fragment for every product found under the scan
/// roots: product and library type triples, Is_Linked_To edges up to
/// max_depth hops, and Utilizes edges from the configured map. Per-file
/// parse failures become warnings; the scan itself always completes.
ScanStats scan_to_triples(Graph& g, const ScanOptions& options);

}  // namespace depwatch
