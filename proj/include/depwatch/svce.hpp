#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depwatch/issues.hpp"

namespace depwatch {

enum class Category {
  Means,        // means of an attack
  Consequence,  // consequence of an attack
  Software,
  Hardware,
  Os,
  Version,      // matched by pattern, not term list
  NetworkTerm,
  FileName,     // matched by pattern, not term list
  TechTerm,
};

inline constexpr std::array<Category, 9> kAllCategories = {
    Category::Means,   Category::Consequence, Category::Software,
    Category::Hardware, Category::Os,          Category::Version,
    Category::NetworkTerm, Category::FileName, Category::TechTerm};

std::string_view to_string(Category c);

struct ConceptSpan {
  Category category;
  std::string surface;  // as written in the source text
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive

  auto operator<=>(const ConceptSpan&) const = default;
};

/// Term lists backing the tagger, one file per category in the gazetteer
/// directory (means.txt, consequence.txt, software.txt, hardware.txt,
/// os.txt, network.txt, tech.txt). Version numbers and file names are
/// matched by built-in patterns instead of lists.
class Gazetteer {
 public:
  static Gazetteer load(const std::filesystem::path& dir);
  static Gazetteer from_lists(
      const std::map<Category, std::vector<std::string>>& lists);

  const std::vector<std::pair<std::string, Category>>& terms() const {
    return terms_;
  }

 private:
  void add_term(std::string term, Category category);
  void finish();

  // Lowercased terms with their category, bucketed by first character for
  // the scan loop.
  std::vector<std::pair<std::string, Category>> terms_;
  friend std::vector<ConceptSpan> tag_text(std::string_view,
                                           const Gazetteer&);
  std::map<char, std::vector<std::size_t>> buckets_;
};

/// Tags the text with security concept spans: case-insensitive gazetteer
/// matching plus the version/file-name patterns, longest match wins,
/// non-overlapping, deterministic.
std::vector<ConceptSpan> tag_text(std::string_view text, const Gazetteer& gaz);

enum class Mode { Literal, Strict };

struct Classification {
  bool kept = false;
  std::vector<ConceptSpan> spans;
  std::string reason;  // set when discarded
};

/// Applies the discard rule over title + body: literal mode keeps an issue
/// with at least two concept spans; strict mode additionally requires an
/// attack-signal span (means or consequence).
Classification classify_issue(const IssueRecord& issue, const Gazetteer& gaz,
                              Mode mode = Mode::Literal);

struct Intelligence {
  std::string id;  // minted IRI, e.g. Int2362704296
  RepoRef repo;
  std::int64_t issue_id = 0;
  std::string vulnerability_term;
  std::optional<std::string> affected_product;
  std::optional<std::string> version;
  std::string observed_at;
};

/// Deterministic intelligence id for one issue: "Int" + decimal 32-bit hash
/// of the repository and issue number.
std::string mint_intelligence_id(const RepoRef& repo, std::int64_t issue_id);

/// Structured finding for a kept issue. The vulnerability term is the first
/// means span, else the first consequence span, else the first tech term;
/// with none of those, the issue is downgraded (nullopt).
std::optional<Intelligence> extract_intelligence(
    const IssueRecord& issue, const std::vector<ConceptSpan>& spans);

}  // namespace depwatch
