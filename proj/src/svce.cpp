#include "depwatch/svce.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>

#include "depwatch/errors.hpp"
#include "depwatch/util.hpp"

namespace depwatch {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Means: return "MEANS";
    case Category::Consequence: return "CONSEQUENCE";
    case Category::Software: return "SOFTWARE";
    case Category::Hardware: return "HARDWARE";
    case Category::Os: return "OS";
    case Category::Version: return "VERSION";
    case Category::NetworkTerm: return "NETWORK_TERM";
    case Category::FileName: return "FILE_NAME";
    case Category::TechTerm: return "TECH_TERM";
  }
  return "?";
}

namespace {

const std::map<Category, const char*> kGazetteerFiles = {
    {Category::Means, "means.txt"},
    {Category::Consequence, "consequence.txt"},
    {Category::Software, "software.txt"},
    {Category::Hardware, "hardware.txt"},
    {Category::Os, "os.txt"},
    {Category::NetworkTerm, "network.txt"},
    {Category::TechTerm, "tech.txt"},
};

bool word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c));
}

// v1.1, 3.6, 10.0.2: an optional leading 'v' and at least one dotted pair.
const std::regex& version_pattern() {
  static const std::regex re(R"(v?[0-9]+(\.[0-9]+)+)",
                             std::regex::ECMAScript | std::regex::optimize);
  return re;
}

// config.ini, libpng.so.16, exploit.py: a token ending in a known file
// extension or a versioned .so suffix.
const std::regex& filename_pattern() {
  static const std::regex re(
      R"([A-Za-z0-9_][A-Za-z0-9_+\-\.]*\.(so(\.[0-9]+)*|c|h|cc|cpp|hpp|cxx|py|js|ts|java|php|rb|go|rs|sh|pl|bat|exe|dll|dylib|a|o|ko|bin|conf|cfg|ini|log|json|xml|yml|yaml|toml|html|css|md|txt|pdf|png|jpg|jpeg|gif|svg|zip|tar|gz|tgz|bz2|xz|deb|rpm|img|iso))",
      std::regex::ECMAScript | std::regex::optimize);
  return re;
}

}  // namespace

void Gazetteer::add_term(std::string term, Category category) {
  std::string lowered = ascii_lower(trim(term));
  if (lowered.empty()) return;
  terms_.emplace_back(std::move(lowered), category);
}

void Gazetteer::finish() {
  std::sort(terms_.begin(), terms_.end());
  terms_.erase(std::unique(terms_.begin(), terms_.end()), terms_.end());
  buckets_.clear();
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    buckets_[terms_[i].first.front()].push_back(i);
  }
}

Gazetteer Gazetteer::load(const std::filesystem::path& dir) {
  Gazetteer gaz;
  for (const auto& [category, filename] : kGazetteerFiles) {
    std::filesystem::path file = dir / filename;
    std::ifstream in(file);
    if (!in) {
      throw ConfigError("missing gazetteer file: " + file.string());
    }
    std::string line;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      gaz.add_term(line, category);
    }
  }
  gaz.finish();
  return gaz;
}

Gazetteer Gazetteer::from_lists(
    const std::map<Category, std::vector<std::string>>& lists) {
  Gazetteer gaz;
  for (const auto& [category, terms] : lists) {
    for (const std::string& term : terms) gaz.add_term(term, category);
  }
  gaz.finish();
  return gaz;
}

std::vector<ConceptSpan> tag_text(std::string_view text, const Gazetteer& gaz) {
  std::vector<ConceptSpan> spans;
  std::string lowered = ascii_lower(text);

  auto boundary_before = [&](std::size_t pos) {
    return pos == 0 || !word_char(lowered[pos - 1]);
  };
  auto boundary_after = [&](std::size_t end) {
    return end >= lowered.size() || !word_char(lowered[end]);
  };

  std::size_t pos = 0;
  while (pos < lowered.size()) {
    if (!word_char(lowered[pos]) || !boundary_before(pos)) {
      ++pos;
      continue;
    }

    // Candidates at this position: gazetteer terms first, then the two
    // built-in patterns. Longest match wins; a length tie goes to the
    // category that comes first in the enum.
    std::size_t best_len = 0;
    Category best_cat = Category::TechTerm;
    bool found = false;
    auto consider = [&](std::size_t len, Category cat) {
      if (len == 0) return;
      if (!found || len > best_len ||
          (len == best_len && cat < best_cat)) {
        best_len = len;
        best_cat = cat;
        found = true;
      }
    };

    auto bucket = gaz.buckets_.find(lowered[pos]);
    if (bucket != gaz.buckets_.end()) {
      for (std::size_t idx : bucket->second) {
        const auto& [term, category] = gaz.terms()[idx];
        if (lowered.compare(pos, term.size(), term) == 0 &&
            boundary_after(pos + term.size())) {
          consider(term.size(), category);
        }
      }
    }

    std::cmatch m;
    const char* first = lowered.data() + pos;
    const char* last = lowered.data() + lowered.size();
    if (std::regex_search(first, last, m, version_pattern(),
                          std::regex_constants::match_continuous) &&
        boundary_after(pos + m.length(0))) {
      consider(static_cast<std::size_t>(m.length(0)), Category::Version);
    }
    if (std::regex_search(first, last, m, filename_pattern(),
                          std::regex_constants::match_continuous) &&
        boundary_after(pos + m.length(0))) {
      consider(static_cast<std::size_t>(m.length(0)), Category::FileName);
    }

    if (found) {
      spans.push_back(ConceptSpan{best_cat,
                                  std::string(text.substr(pos, best_len)), pos,
                                  pos + best_len});
      pos += best_len;
    } else {
      // Skip the whole word; a term can only start at a boundary.
      while (pos < lowered.size() && word_char(lowered[pos])) ++pos;
    }
  }
  return spans;
}

Classification classify_issue(const IssueRecord& issue, const Gazetteer& gaz,
                              Mode mode) {
  std::string text = issue.title;
  if (!issue.body.empty()) {
    text += "\n";
    text += issue.body;
  }
  Classification result;
  result.spans = tag_text(text, gaz);
  if (result.spans.size() < 2) {
    result.kept = false;
    result.reason = "fewer than 2 concepts";
    return result;
  }
  if (mode == Mode::Strict) {
    bool attack_signal = std::any_of(
        result.spans.begin(), result.spans.end(), [](const ConceptSpan& s) {
          return s.category == Category::Means ||
                 s.category == Category::Consequence;
        });
    if (!attack_signal) {
      result.kept = false;
      result.reason = "no attack-signal concept";
      return result;
    }
  }
  result.kept = true;
  return result;
}

std::string mint_intelligence_id(const RepoRef& repo, std::int64_t issue_id) {
  std::string key = repo.full() + "#" + std::to_string(issue_id);
  return "Int" + std::to_string(fnv1a32(key));
}

std::optional<Intelligence> extract_intelligence(
    const IssueRecord& issue, const std::vector<ConceptSpan>& spans) {
  auto first_of = [&](Category cat) -> const ConceptSpan* {
    for (const ConceptSpan& s : spans) {
      if (s.category == cat) return &s;
    }
    return nullptr;
  };

  const ConceptSpan* vuln = first_of(Category::Means);
  if (!vuln) vuln = first_of(Category::Consequence);
  if (!vuln) vuln = first_of(Category::TechTerm);
  if (!vuln) return std::nullopt;  // downgraded: nothing names the threat

  Intelligence intel;
  intel.id = mint_intelligence_id(issue.repo, issue.issue_id);
  intel.repo = issue.repo;
  intel.issue_id = issue.issue_id;
  intel.vulnerability_term = vuln->surface;
  if (const ConceptSpan* product = first_of(Category::Software)) {
    intel.affected_product = product->surface;
  }
  if (const ConceptSpan* version = first_of(Category::Version)) {
    intel.version = version->surface;
  }
  intel.observed_at = issue.created_at;
  return intel;
}

}  // namespace depwatch
