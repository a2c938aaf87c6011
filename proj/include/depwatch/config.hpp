#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "depwatch/issues.hpp"
#include "depwatch/svce.hpp"

namespace depwatch {

/// Everything one pipeline run needs. Loaded from a plain key/value config
/// file with [section] headers; all paths resolve relative to the config
/// file's directory.
struct PipelineConfig {
  // [scan]
  std::vector<std::filesystem::path> scan_roots;
  std::vector<std::filesystem::path> search_paths;
  int max_depth = 2;
  std::filesystem::path sysroot;
  std::map<std::string, std::string> utilizes;  // product IRI -> project name

  // [ingest]
  std::vector<RepoRef> repos;
  std::string since;
  std::string api_base;                     // empty = offline fixtures only
  std::filesystem::path fixture_dir;        // <owner>__<name>.json per repo
  std::filesystem::path gazetteer_dir;
  Mode mode = Mode::Literal;
  bool include_pulls = true;
  int page_size = 100;

  // [link]
  std::filesystem::path aliases;

  // [rules]
  std::optional<std::filesystem::path> rules_path;
  bool materialize_alerts = false;

  // [store]
  std::filesystem::path store_path = "store.ttl";

  // [serve]
  std::string host = "127.0.0.1";
  int port = 8080;

  static PipelineConfig load(const std::filesystem::path& path);
};

}  // namespace depwatch
