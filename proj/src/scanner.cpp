#include "depwatch/scanner.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>

#include "depwatch/elf.hpp"
#include "depwatch/errors.hpp"
#include "depwatch/ontology.hpp"
#include "depwatch/util.hpp"

namespace fs = std::filesystem;

namespace depwatch {

namespace {

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScanError("cannot read file: " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

std::string iri_path(const fs::path& path, const fs::path& sysroot) {
  fs::path abs = fs::absolute(path).lexically_normal();
  if (!sysroot.empty()) {
    fs::path root = fs::absolute(sysroot).lexically_normal();
    fs::path rel = abs.lexically_relative(root);
    if (!rel.empty() && rel.native()[0] != '.') {
      return "/" + rel.generic_string();
    }
  }
  return abs.generic_string();
}

}  // namespace

std::vector<ProgramRecord> enumerate_programs(
    const std::vector<fs::path>& roots, std::vector<std::string>* warnings) {
  std::set<std::string> seen;
  std::vector<std::pair<std::string, ProgramRecord>> found;
  for (const fs::path& root : roots) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
      throw ScanError("scan root is not a readable directory: " +
                      root.string());
    }
    for (fs::recursive_directory_iterator it(root, ec), end;
         it != end && !ec; it.increment(ec)) {
      if (!it->is_regular_file(ec)) continue;
      fs::path path = fs::absolute(it->path()).lexically_normal();
      if (!seen.insert(path.string()).second) continue;
      std::vector<std::uint8_t> bytes;
      try {
        bytes = read_file(path);
      } catch (const ScanError& e) {
        if (warnings) warnings->push_back(e.what());
        continue;
      }
      auto kind = probe_binary(bytes);
      if (!kind) continue;  // not an ELF image
      switch (*kind) {
        case BinaryKind::DynamicExecutable:
          found.emplace_back(path.string(),
                             ProgramRecord{path.string(),
                                           ProgramRecord::Kind::Product, true});
          break;
        case BinaryKind::SharedObject:
          found.emplace_back(path.string(),
                             ProgramRecord{path.string(),
                                           ProgramRecord::Kind::Library, true});
          break;
        default:
          break;  // statically linked or unloadable kinds are not tracked
      }
    }
    if (ec) {
      throw ScanError("failed to walk scan root " + root.string() + ": " +
                      ec.message());
    }
  }
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<ProgramRecord> records;
  records.reserve(found.size());
  for (auto& [_, rec] : found) records.push_back(std::move(rec));
  return records;
}

ProgramRecord resolve_library(const std::string& soname,
                              const std::vector<fs::path>& search_paths) {
  if (soname.empty()) throw ScanError("cannot resolve an empty soname");
  for (const fs::path& dir : search_paths) {
    fs::path candidate = dir / soname;
    std::error_code ec;
    if (fs::is_regular_file(candidate, ec)) {
      return ProgramRecord{fs::absolute(candidate).lexically_normal().string(),
                           ProgramRecord::Kind::Library, true};
    }
  }
  return ProgramRecord{soname, ProgramRecord::Kind::Library, false};
}

ScanStats scan_to_triples(Graph& g, const ScanOptions& options) {
  ScanStats stats;
  std::vector<ProgramRecord> programs =
      enumerate_programs(options.roots, &stats.warnings);

  const Term& type = vocab::rdf_type();
  std::set<std::string> product_iris;
  std::set<std::string> library_iris;

  auto needed_or_warn = [&](const fs::path& path) -> std::vector<std::string> {
    try {
      return extract_needed(read_file(path));
    } catch (const Error& e) {
      stats.warnings.push_back("skipping dependencies of " + path.string() +
                               ": " + e.what());
      return {};
    }
  };

  for (const ProgramRecord& program : programs) {
    if (program.kind != ProgramRecord::Kind::Product) continue;
    std::string product_iri = iri_path(program.path, options.sysroot);
    g.insert(Term::iri(product_iri), type, vocab::product());
    product_iris.insert(product_iri);

    // Breadth-first over the link closure, bounded by max_depth hops.
    struct Node {
      fs::path file;
      std::string iri;
      int depth;
    };
    std::deque<Node> frontier{{program.path, product_iri, 0}};
    std::map<std::string, int> visited;  // soname -> shallowest depth seen
    while (!frontier.empty()) {
      Node node = frontier.front();
      frontier.pop_front();
      if (node.depth >= options.max_depth) continue;
      for (const std::string& soname : needed_or_warn(node.file)) {
        if (soname == node.iri) continue;  // no self-edges
        g.insert(Term::iri(soname), type, vocab::library());
        if (g.insert(Term::iri(node.iri), vocab::is_linked_to(),
                     Term::iri(soname))) {
          ++stats.links;
        }
        library_iris.insert(soname);
        int child_depth = node.depth + 1;
        auto it = visited.find(soname);
        if (it != visited.end() && it->second <= child_depth) continue;
        visited[soname] = child_depth;
        ProgramRecord lib = resolve_library(soname, options.search_paths);
        if (lib.resolved) {
          frontier.push_back({lib.path, soname, child_depth});
        }
      }
    }

    // Utilizes edges: explicit map first, then the tracked-project name
    // heuristic.
    std::string project_name;
    auto mapped = options.utilizes.find(product_iri);
    if (mapped != options.utilizes.end()) {
      project_name = mapped->second;
    } else {
      std::string base = fs::path(product_iri).filename().string();
      for (const std::string& tracked : options.tracked_projects) {
        if (normalize_surface(tracked) == normalize_surface(base)) {
          project_name = tracked;
          break;
        }
      }
    }
    if (!project_name.empty()) {
      std::string project_iri = project_name;
      std::replace(project_iri.begin(), project_iri.end(), ' ', '_');
      g.insert(Term::iri(project_iri), type, vocab::project());
      g.insert(Term::iri(product_iri), vocab::utilizes(),
               Term::iri(project_iri));
      ++stats.utilizes;
    }
  }

  stats.products = product_iris.size();
  stats.libraries = library_iris.size();
  return stats;
}

}  // namespace depwatch
