#include <doctest.h>

#include <fstream>

#include "depwatch/entity_link.hpp"
#include "depwatch/errors.hpp"
#include "depwatch/ontology.hpp"
#include "depwatch/util.hpp"
#include "support.hpp"

using namespace depwatch;
namespace dt = depwatch::testing;

namespace {

const AliasTable& shipped() {
  static const AliasTable table =
      AliasTable::load(dt::data_dir() / "aliases.tsv", bootstrap_graph());
  return table;
}

}  // namespace

TEST_CASE("link_entity looks up the alias table") {
  auto flash = link_entity("Adobe Flash", shipped());
  REQUIRE(flash.has_value());
  CHECK(flash->value == "http://dbpedia.org/resource#Adobe_Flash");

  auto ftp = link_entity("LightFTP", shipped());
  REQUIRE(ftp.has_value());
  CHECK(ftp->value == "http://dbpedia.org/resource#FTP-server");

  CHECK_FALSE(link_entity("frobnicator-9000", shipped()).has_value());
}

TEST_CASE("lookup normalizes case and whitespace") {
  CHECK(link_entity("adobe   FLASH", shipped()) ==
        link_entity("Adobe Flash", shipped()));
  CHECK(link_entity("  lightftp  ", shipped()) ==
        link_entity("LightFTP", shipped()));
  // Normalization is idempotent: stored keys are already normal forms.
  for (const auto& [key, target] : shipped().entries()) {
    CHECK(normalize_surface(key) == key);
  }
}

TEST_CASE("emit_sameas has set semantics") {
  Graph g = bootstrap_graph();
  Term light = Term::iri("LightFTP");
  Term ftp = Term::iri("http://dbpedia.org/resource#FTP-server");
  std::size_t before = g.size();
  emit_sameas(g, light, ftp);
  CHECK(g.contains(Triple{light, vocab::same_as(), ftp}));
  emit_sameas(g, light, ftp);
  CHECK(g.size() == before + 1);

  Term bo = Term::iri("buffer_overflow");
  Term dbp_bo = Term::iri("http://dbpedia.org/resource#buffer_overflow");
  emit_sameas(g, bo, dbp_bo);
  CHECK(g.contains(Triple{bo, vocab::same_as(), dbp_bo}));
}

TEST_CASE("remote hook only fires on table misses") {
  int calls = 0;
  RemoteLinkHook hook = [&calls](std::string_view surface) {
    ++calls;
    if (surface == "obscuretool") {
      return std::optional<Term>(
          Term::iri("http://dbpedia.org/resource#ObscureTool"));
    }
    return std::optional<Term>();
  };
  // Table hit: the hook stays cold.
  CHECK(link_entity("LightFTP", shipped(), hook).has_value());
  CHECK(calls == 0);
  // Miss with a hook: the hook decides.
  auto hit = link_entity("obscuretool", shipped(), hook);
  REQUIRE(hit.has_value());
  CHECK(hit->value == "http://dbpedia.org/resource#ObscureTool");
  CHECK(calls == 1);
  CHECK_FALSE(link_entity("still unknown", shipped(), hook).has_value());
}

TEST_CASE("alias file parsing") {
  auto dir = dt::make_temp_dir("alias");
  auto file = dir / "alias.tsv";
  {
    std::ofstream out(file);
    out << "# comment\n";
    out << "My  Product\tdbp:My_Product\n";
    out << "raw iri\t<http://example.org/raw>\n";
  }
  AliasTable table = AliasTable::load(file, bootstrap_graph());
  CHECK(table.size() == 2);
  CHECK(table.lookup("my product")->value ==
        "http://dbpedia.org/resource#My_Product");
  CHECK(table.lookup("RAW IRI")->value == "http://example.org/raw");

  {
    std::ofstream out(file);
    out << "no tab separator here\n";
  }
  CHECK_THROWS_AS(AliasTable::load(file, bootstrap_graph()), ConfigError);

  {
    std::ofstream out(file);
    out << "name\tunprefixed-target\n";
  }
  CHECK_THROWS_AS(AliasTable::load(file, bootstrap_graph()), ConfigError);
  std::filesystem::remove_all(dir);
}
