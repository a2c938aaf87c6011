#include "depwatch/config.hpp"

#include <fstream>

#include "depwatch/errors.hpp"
#include "depwatch/util.hpp"

namespace fs = std::filesystem;

namespace depwatch {

namespace {

std::vector<std::string> csv_list(const std::string& value) {
  std::vector<std::string> out;
  for (const std::string& part : split(value, ',')) {
    std::string item = trim(part);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
  std::string v = ascii_lower(trim(value));
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("config key '" + key + "' must be a boolean, got '" +
                    value + "'");
}

int parse_int(const std::string& value, const std::string& key) {
  try {
    std::size_t used = 0;
    int v = std::stoi(value, &used);
    if (used == trim(value).size()) return v;
  } catch (...) {
  }
  throw ConfigError("config key '" + key + "' must be an integer, got '" +
                    value + "'");
}

}  // namespace

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  fs::path base = fs::absolute(path).parent_path();
  auto resolve = [&](const std::string& p) { return base / p; };

  PipelineConfig cfg;
  cfg.store_path = resolve("store.ttl");
  std::string section;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[' && text.back() == ']') {
      section = ascii_lower(trim(text.substr(1, text.size() - 2)));
      continue;
    }
    auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key = value (" + path.string() + ":" +
                        std::to_string(lineno) + ")");
    }
    std::string key = ascii_lower(trim(text.substr(0, eq)));
    std::string value = trim(text.substr(eq + 1));
    std::string qualified = section.empty() ? key : section + "." + key;

    if (qualified == "scan.roots") {
      for (const std::string& root : csv_list(value)) {
        cfg.scan_roots.push_back(resolve(root));
      }
    } else if (qualified == "scan.search_paths") {
      for (const std::string& dir : csv_list(value)) {
        cfg.search_paths.push_back(resolve(dir));
      }
    } else if (qualified == "scan.max_depth") {
      cfg.max_depth = parse_int(value, qualified);
      if (cfg.max_depth < 1) {
        throw ConfigError("scan.max_depth must be >= 1");
      }
    } else if (qualified == "scan.sysroot") {
      cfg.sysroot = resolve(value);
    } else if (qualified == "scan.utilizes") {
      // product-iri -> project-name pairs: "/usr/bin/python3.6=cpython"
      for (const std::string& pair : csv_list(value)) {
        auto sep = pair.find('=');
        if (sep == std::string::npos) {
          throw ConfigError("scan.utilizes entries must be iri=project (" +
                            path.string() + ":" + std::to_string(lineno) + ")");
        }
        cfg.utilizes[trim(pair.substr(0, sep))] = trim(pair.substr(sep + 1));
      }
    } else if (qualified == "ingest.repos") {
      for (const std::string& spec : csv_list(value)) {
        cfg.repos.push_back(RepoRef::parse(spec));
      }
    } else if (qualified == "ingest.since") {
      cfg.since = value;
    } else if (qualified == "ingest.api_base") {
      cfg.api_base = value;
    } else if (qualified == "ingest.fixtures") {
      cfg.fixture_dir = resolve(value);
    } else if (qualified == "ingest.gazetteer") {
      cfg.gazetteer_dir = resolve(value);
    } else if (qualified == "ingest.mode") {
      std::string mode = ascii_lower(value);
      if (mode == "literal") {
        cfg.mode = Mode::Literal;
      } else if (mode == "strict") {
        cfg.mode = Mode::Strict;
      } else {
        throw ConfigError("ingest.mode must be literal or strict");
      }
    } else if (qualified == "ingest.include_pulls") {
      cfg.include_pulls = parse_bool(value, qualified);
    } else if (qualified == "ingest.page_size") {
      cfg.page_size = parse_int(value, qualified);
    } else if (qualified == "link.aliases") {
      cfg.aliases = resolve(value);
    } else if (qualified == "rules.rules") {
      cfg.rules_path = resolve(value);
    } else if (qualified == "rules.materialize_alerts") {
      cfg.materialize_alerts = parse_bool(value, qualified);
    } else if (qualified == "store.path") {
      cfg.store_path = resolve(value);
    } else if (qualified == "serve.host") {
      cfg.host = value;
    } else if (qualified == "serve.port") {
      cfg.port = parse_int(value, qualified);
    } else {
      throw ConfigError("unknown config key '" + qualified + "' (" +
                        path.string() + ":" + std::to_string(lineno) + ")");
    }
  }
  return cfg;
}

}  // namespace depwatch
