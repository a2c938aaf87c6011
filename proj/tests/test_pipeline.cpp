#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "depwatch/config.hpp"
#include "depwatch/errors.hpp"
#include "depwatch/http_service.hpp"
#include "depwatch/ontology.hpp"
#include "depwatch/pipeline.hpp"
#include "depwatch/query.hpp"
#include "depwatch/turtle.hpp"
#include "elf_fixtures.hpp"
#include "support.hpp"

using namespace depwatch;
namespace dt = depwatch::testing;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kPythonLinkSet = {
    "libutil.so.1", "libpython3.6m.so.1.0", "libm.so.6",
    "libdl.so.2",   "libpthread.so.0",      "libc.so.6"};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// One disposable pipeline environment: fixture binaries, a config file, and
// a store path, all under a scratch directory.
struct Env {
  fs::path dir;
  fs::path config_path;

  explicit Env(const std::string& tag, const std::string& extra_config = {},
               const std::string& repos = "hfiref0x/LightFTP") {
    dir = dt::make_temp_dir(tag);
    dt::write_executable(dir / "tree/usr/bin/python3.6", kPythonLinkSet);
    dt::write_executable(dir / "tree/usr/bin/firefox",
                         {"libssl.so.1.1", "libc.so.6"});
    dt::write_shared_object(dir / "tree/lib/libssl.so.1.1", {"libc.so.6"});
    config_path = dir / "depwatch.conf";
    std::ostringstream cfg;
    cfg << "[scan]\n"
        << "roots = tree/usr/bin\n"
        << "search_paths = tree/lib\n"
        << "sysroot = tree\n"
        << "max_depth = 2\n"
        << "[ingest]\n"
        << "repos = " << repos << "\n"
        << "since = 2018-01-01\n"
        << "fixtures = " << (dt::fixture_dir() / "issues").string() << "\n"
        << "gazetteer = " << (dt::data_dir() / "gazetteer").string() << "\n"
        << "[link]\n"
        << "aliases = " << (dt::data_dir() / "aliases.tsv").string() << "\n"
        << "[store]\n"
        << "path = store.ttl\n"
        << extra_config;
    spit(config_path, cfg.str());
  }
  ~Env() { fs::remove_all(dir); }

  PipelineConfig config() const { return PipelineConfig::load(config_path); }
  fs::path store() const { return dir / "store.ttl"; }
};

struct ServiceFixture {
  Service service;
  httplib::Server server;
  std::thread thread;
  int port;

  explicit ServiceFixture(const PipelineConfig& cfg) : service(cfg) {
    service.attach(server);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~ServiceFixture() {
    server.stop();
    thread.join();
  }
  httplib::Client client() {
    return httplib::Client("127.0.0.1", port);
  }
};

}  // namespace

TEST_CASE("config parsing") {
  Env env("config", "[serve]\nport = 9911\n[rules]\nmaterialize_alerts = true\n");
  PipelineConfig cfg = env.config();
  REQUIRE(cfg.scan_roots.size() == 1);
  CHECK(cfg.scan_roots[0] == env.dir / "tree/usr/bin");
  CHECK(cfg.sysroot == env.dir / "tree");
  CHECK(cfg.max_depth == 2);
  REQUIRE(cfg.repos.size() == 1);
  CHECK(cfg.repos[0].full() == "github.com/hfiref0x/LightFTP");
  CHECK(cfg.since == "2018-01-01");
  CHECK(cfg.store_path == env.dir / "store.ttl");
  CHECK(cfg.port == 9911);
  CHECK(cfg.materialize_alerts);
  CHECK(cfg.mode == Mode::Literal);

  spit(env.dir / "bad.conf", "[scan]\nmystery_knob = 7\n");
  CHECK_THROWS_AS(PipelineConfig::load(env.dir / "bad.conf"), ConfigError);
  spit(env.dir / "bad2.conf", "[scan]\nno equals sign\n");
  CHECK_THROWS_AS(PipelineConfig::load(env.dir / "bad2.conf"), ConfigError);
  CHECK_THROWS_AS(PipelineConfig::load(env.dir / "missing.conf"), ConfigError);
}

TEST_CASE("run_scan persists the dependency store") {
  Env env("scan");
  ScanStats stats = run_scan(env.config());
  CHECK(stats.products == 2);
  CHECK(stats.warnings.empty());
  REQUIRE(fs::exists(env.store()));

  Graph g = load_turtle_file(env.store());
  CHECK(bootstrap_graph().is_subgraph_of(g));
  Term py = Term::iri("/usr/bin/python3.6");
  CHECK(g.contains(Triple{py, vocab::rdf_type(), vocab::product()}));
  CHECK(g.match(py, vocab::is_linked_to(), std::nullopt).size() == 6);
  // firefox resolves libssl, whose own libc dependency is a second hop.
  CHECK(g.contains(Triple{Term::iri("libssl.so.1.1"), vocab::is_linked_to(),
                          Term::iri("libc.so.6")}));

  SUBCASE("rescan is byte-identical") {
    std::string first = slurp(env.store());
    run_scan(env.config());
    CHECK(slurp(env.store()) == first);
  }
}

TEST_CASE("scan of an empty root persists only the schema") {
  Env env("scanempty");
  fs::create_directories(env.dir / "nothing");
  spit(env.dir / "empty.conf",
       "[scan]\nroots = nothing\nsysroot = nothing\n[store]\npath = "
       "empty.ttl\n");
  PipelineConfig cfg = PipelineConfig::load(env.dir / "empty.conf");
  run_scan(cfg);
  Graph g = load_turtle_file(env.dir / "empty.ttl");
  CHECK(g == bootstrap_graph());
}

TEST_CASE("python3.6 store matches the golden bytes") {
  Env env("golden");
  // A root holding just the python fixture, so the store is schema plus its
  // fragment with image-absolute paths.
  spit(env.dir / "py.conf",
       "[scan]\nroots = pyroot/usr/bin\nsearch_paths = pyroot/lib\nsysroot = "
       "pyroot\n[store]\npath = python_store.ttl\n");
  dt::write_executable(env.dir / "pyroot/usr/bin/python3.6", kPythonLinkSet);
  run_scan(PipelineConfig::load(env.dir / "py.conf"));
  std::string expected = slurp(dt::fixture_dir() / "golden/python_store.ttl");
  CHECK(slurp(env.dir / "python_store.ttl") == expected);
}

TEST_CASE("run_ingest asserts the intelligence shape") {
  Env env("ingest");
  run_scan(env.config());
  IngestStats stats = run_ingest(env.config());
  CHECK(stats.issues == 3);
  CHECK(stats.kept == 1);
  CHECK(stats.discarded == 2);
  CHECK(stats.errors.empty());

  Graph g = load_turtle_file(env.store());
  RepoRef repo{"github.com", "hfiref0x", "LightFTP"};
  Term intel_node = Term::iri(mint_intelligence_id(repo, 1));
  Term light = Term::iri("LightFTP");
  Term vuln = Term::iri("buffer_overflow");

  CHECK(g.contains(Triple{intel_node, vocab::rdf_type(),
                          vocab::intelligence()}));
  CHECK(g.contains(
      Triple{intel_node, vocab::intel_has_vulnerability(), vuln}));
  CHECK(g.contains(Triple{light, vocab::rdf_type(), vocab::uco_product()}));
  CHECK(g.contains(Triple{light, vocab::has_vulnerability(), vuln}));
  CHECK(g.contains(Triple{light, vocab::same_as(),
                          Term::iri("http://dbpedia.org/resource#FTP-server")}));
  CHECK(g.contains(Triple{vuln, vocab::rdf_type(), vocab::vulnerability()}));
  CHECK(g.contains(Triple{vuln, vocab::affects_product(), light}));
  CHECK(g.contains(
      Triple{vuln, vocab::same_as(),
             Term::iri("http://dbpedia.org/resource#buffer_overflow")}));
}

TEST_CASE("ingest matches intelligence to scanned nodes by name") {
  Env env("ingestlib", "", "mozilla/firefox");
  run_scan(env.config());
  run_ingest(env.config());
  Graph g = load_turtle_file(env.store());
  // The report names libssl.so.1.1, which the scan already typed; the
  // vulnerability lands on that node instead of a minted product.
  Term lib = Term::iri("libssl.so.1.1");
  Term vuln = Term::iri("heap_overflow");
  CHECK(g.contains(Triple{lib, vocab::has_vulnerability(), vuln}));
  CHECK(g.contains(Triple{vuln, vocab::affects_product(), lib}));
  CHECK_FALSE(g.contains(Triple{lib, vocab::rdf_type(), vocab::uco_product()}));
}

TEST_CASE("all-benign corpus asserts nothing") {
  Env env("benign", "", "calm/project");
  run_scan(env.config());
  std::size_t before = load_turtle_file(env.store()).size();
  IngestStats stats = run_ingest(env.config());
  CHECK(stats.kept == 0);
  CHECK(stats.triples_added == 0);
  CHECK(load_turtle_file(env.store()).size() == before);
}

TEST_CASE("labeled 20-issue corpus yields one node per kept issue") {
  Env env("corpus20", "", "acme/widget");
  run_scan(env.config());
  IngestStats stats = run_ingest(env.config());
  CHECK(stats.issues == 20);

  // Standalone classification is the oracle for the kept count.
  Gazetteer gaz = Gazetteer::load(dt::data_dir() / "gazetteer");
  auto issues = load_fixture(dt::fixture_dir() / "issues/acme__widget.json",
                             RepoRef{"github.com", "acme", "widget"});
  std::size_t expected_kept = 0;
  for (const auto& issue : issues) {
    if (classify_issue(issue, gaz).kept) ++expected_kept;
  }
  CHECK(expected_kept == 12);
  CHECK(stats.kept == expected_kept);

  Graph g = load_turtle_file(env.store());
  CHECK(g.match(std::nullopt, vocab::rdf_type(), vocab::intelligence())
            .size() == 12);
}

TEST_CASE("alerts fire after scan plus ingest") {
  setenv("DEPWATCH_NOW", "2018-07-01T00:00:00Z", 1);
  Env env("alerts", "", "mozilla/firefox");
  run_scan(env.config());
  run_ingest(env.config());

  std::vector<Alert> alerts = run_alerts(env.config());
  REQUIRE(!alerts.empty());
  bool firefox_alerted = false;
  for (const Alert& a : alerts) {
    if (a.subject == Term::iri("/usr/bin/firefox") &&
        a.rule_name == "linked library vulnerability check") {
      firefox_alerted = true;
      CHECK(a.vulnerability == Term::iri("heap_overflow"));
      CHECK(a.raised_at == "2018-07-01T00:00:00Z");
    }
  }
  CHECK(firefox_alerted);

  // The brute-force enumeration oracle agrees on the persisted store.
  Graph store = load_turtle_file(env.store());
  std::set<std::tuple<Term, Term, std::string>> expected_keys, actual_keys;
  for (const auto& o : dt::oracle_evaluate(store, shipped_rules())) {
    expected_keys.emplace(o.subject, o.vulnerability, o.rule_name);
  }
  for (const Alert& a : alerts) {
    actual_keys.emplace(a.subject, a.vulnerability, a.rule_name);
  }
  CHECK(expected_keys == actual_keys);

  SUBCASE("product filter narrows the report") {
    AlertRequest req;
    req.product_filter = "firefox";
    auto filtered = run_alerts(env.config(), req);
    CHECK(!filtered.empty());
    for (const Alert& a : filtered) {
      CHECK(a.subject == Term::iri("/usr/bin/firefox"));
    }
  }

  SUBCASE("clean graph raises nothing") {
    Env clean("cleanalerts");
    run_scan(clean.config());
    CHECK(run_alerts(clean.config()).empty());
  }
}

TEST_CASE("candidate link set is checked before any linking") {
  Env env("candidate", "", "mozilla/firefox");
  run_scan(env.config());
  run_ingest(env.config());

  AlertRequest req;
  req.candidate_libs = {"libssl.so.1.1"};
  req.product_filter = "my-new-tool";
  auto alerts = run_alerts(env.config(), req);
  REQUIRE(!alerts.empty());
  CHECK(alerts[0].subject == Term::iri("my-new-tool"));
  CHECK(alerts[0].vulnerability == Term::iri("heap_overflow"));

  // The hypothetical product never touches the persisted store.
  Graph g = load_turtle_file(env.store());
  CHECK(g.match(Term::iri("my-new-tool"), std::nullopt, std::nullopt).empty());
}

TEST_CASE("materialized alerts land in the store") {
  Env env("materialize", "[rules]\nmaterialize_alerts = true\n",
          "mozilla/firefox");
  run_scan(env.config());
  run_ingest(env.config());
  run_alerts(env.config());
  Graph g = load_turtle_file(env.store());
  CHECK(g.contains(Triple{Term::iri("/usr/bin/firefox"),
                          vocab::raise_alert(), Term::literal("Yes")}));
}

TEST_CASE("alert subjects stay within link distance of scanned products") {
  setenv("DEPWATCH_NOW", "2018-07-01T00:00:00Z", 1);
  Env env("reach", "", "mozilla/firefox");
  run_scan(env.config());
  run_ingest(env.config());
  Graph g = load_turtle_file(env.store());
  auto alerts = run_alerts(env.config());
  for (const Alert& a : alerts) {
    // Walk up to max_depth hops from the subject along link/use edges and
    // require a vulnerable node on the way.
    std::set<Term> frontier{a.subject};
    bool reached = false;
    for (int hop = 0; hop <= 2 && !reached; ++hop) {
      std::set<Term> next;
      for (const Term& node : frontier) {
        if (!g.match(node, vocab::has_vulnerability(), std::nullopt)
                 .empty()) {
          reached = true;
          break;
        }
        for (const Triple& t :
             g.match(node, vocab::is_linked_to(), std::nullopt)) {
          next.insert(t.object);
        }
        for (const Triple& t :
             g.match(node, vocab::utilizes(), std::nullopt)) {
          next.insert(t.object);
        }
      }
      frontier = std::move(next);
    }
    CHECK(reached);
  }
}

TEST_CASE("query payload equals across CLI and HTTP") {
  setenv("DEPWATCH_NOW", "2018-07-01T00:00:00Z", 1);
  Env env("payload", "", "hfiref0x/LightFTP");
  run_scan(env.config());
  run_ingest(env.config());

  const std::string query_text =
      "SELECT ?y WHERE { <LightFTP> <hasVulnerability> ?y . }";

  std::string cli_out;
  int status = dt::run_command(dt::cli_bin() + " query --config " +
                                   env.config_path.string() + " 'SELECT ?y " +
                                   "WHERE { <LightFTP> <hasVulnerability> " +
                                   "?y . }'",
                               &cli_out);
  REQUIRE(status == 0);

  ServiceFixture http(env.config());
  auto res = http.client().Post("/query", query_text, "text/plain");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(cli_out == res->body + "\n");

  json doc = json::parse(res->body);
  REQUIRE(doc["results"]["bindings"].size() == 1);
  CHECK(doc["results"]["bindings"][0]["y"]["value"] == "buffer_overflow");

  SUBCASE("alerts payload matches too") {
    std::string alerts_cli;
    REQUIRE(dt::run_command(dt::cli_bin() + " alerts --config " +
                                env.config_path.string(),
                            &alerts_cli) == 0);
    auto alerts_http = http.client().Get("/alerts");
    REQUIRE(alerts_http);
    CHECK(alerts_cli == alerts_http->body + "\n");
  }
}

TEST_CASE("malformed queries are user errors on both surfaces") {
  Env env("badquery");
  run_scan(env.config());

  std::string out;
  int status = dt::run_command(dt::cli_bin() + " query --config " +
                                   env.config_path.string() +
                                   " 'SELECT nonsense' 2>/dev/null",
                               &out);
  CHECK(status == 1);

  ServiceFixture http(env.config());
  auto res = http.client().Post("/query", "SELECT nonsense", "text/plain");
  REQUIRE(res);
  CHECK(res->status == 400);
  json err = json::parse(res->body);
  CHECK(err.contains("error"));
  CHECK(err.contains("line"));
}

TEST_CASE("service endpoints") {
  setenv("DEPWATCH_NOW", "2018-07-01T00:00:00Z", 1);
  Env env("serve", "", "mozilla/firefox");
  run_scan(env.config());
  ServiceFixture http(env.config());

  SUBCASE("health reports the triple count") {
    auto res = http.client().Get("/health");
    REQUIRE(res);
    CHECK(res->status == 200);
    json doc = json::parse(res->body);
    CHECK(doc["status"] == "ok");
    CHECK(doc["triples"].get<std::size_t>() ==
          load_turtle_file(env.store()).size());
  }

  SUBCASE("alerts refresh when the store changes") {
    auto before = http.client().Get("/alerts");
    REQUIRE(before);
    CHECK(json::parse(before->body).empty());

    // New intelligence lands in the store; the service must see it
    // without a restart.
    run_ingest(env.config());
    auto after = http.client().Get("/alerts");
    REQUIRE(after);
    json alerts = json::parse(after->body);
    CHECK(!alerts.empty());

    // And the refreshed payload matches an offline evaluation.
    std::string offline = alerts_payload(run_alerts(env.config()));
    CHECK(after->body == offline);
  }

  SUBCASE("developer scenario over HTTP") {
    run_ingest(env.config());
    auto res = http.client().Get(
        "/alerts?product=newtool&candidate-lib=libssl.so.1.1");
    REQUIRE(res);
    json alerts = json::parse(res->body);
    REQUIRE(!alerts.empty());
    CHECK(alerts[0]["subject"] == "newtool");
  }
}

TEST_CASE("every sameAs object comes from the alias table") {
  Env env("sameas", "", "hfiref0x/LightFTP, mozilla/firefox, acme/widget");
  run_scan(env.config());
  run_ingest(env.config());
  Graph g = load_turtle_file(env.store());
  AliasTable aliases =
      AliasTable::load(dt::data_dir() / "aliases.tsv", bootstrap_graph());
  std::set<Term> known;
  for (const auto& [key, target] : aliases.entries()) known.insert(target);
  auto links = g.match(std::nullopt, vocab::same_as(), std::nullopt);
  CHECK(!links.empty());
  for (const Triple& t : links) {
    CHECK(known.count(t.object) == 1);
  }
}

TEST_CASE("transport failure on one repo does not stop the batch") {
  Env env("transport");
  run_scan(env.config());
  // Point ingest at a closed port instead of fixtures.
  spit(env.dir / "net.conf",
       "[scan]\nroots = tree/usr/bin\nsysroot = tree\n"
       "[ingest]\nrepos = acme/widget\n"
       "api_base = http://127.0.0.1:9\n"
       "gazetteer = " + (dt::data_dir() / "gazetteer").string() + "\n" +
       "[store]\npath = store.ttl\n");
  PipelineConfig cfg = PipelineConfig::load(env.dir / "net.conf");
  cfg.page_size = 1;
  IngestStats stats = run_ingest(cfg);
  REQUIRE(stats.errors.size() == 1);
  CHECK(stats.errors[0].find("acme/widget") != std::string::npos);
  CHECK(stats.kept == 0);
  // Store persists untouched by the failed repo.
  CHECK(fs::exists(env.store()));
}

TEST_CASE("service reloads on invalidate without an mtime change") {
  Env env("sighup", "", "mozilla/firefox");
  run_scan(env.config());
  Service service(env.config());
  std::size_t before = service.snapshot()->size();

  // Rewrite the store with extra content but restore the old mtime, so
  // only an explicit invalidate (the SIGHUP path) can pick it up.
  auto stamp = fs::last_write_time(env.store());
  Graph g = load_turtle_file(env.store());
  g.insert(Term::iri("/usr/bin/sneaky"), vocab::rdf_type(),
           vocab::product());
  save_turtle_file(g, env.store());
  fs::last_write_time(env.store(), stamp);

  CHECK(service.snapshot()->size() == before);
  service.invalidate();
  CHECK(service.snapshot()->size() == before + 1);
}

TEST_CASE("serve reports a bind failure") {
  Env env("bind");
  run_scan(env.config());

  // Hold the port with a plain socket (no SO_REUSEPORT) so a second bind
  // must fail.
  int occupant = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(occupant >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  REQUIRE(::bind(occupant, reinterpret_cast<sockaddr*>(&addr),
                 sizeof(addr)) == 0);
  socklen_t len = sizeof(addr);
  REQUIRE(::getsockname(occupant, reinterpret_cast<sockaddr*>(&addr),
                        &len) == 0);
  REQUIRE(::listen(occupant, 1) == 0);
  int port = ntohs(addr.sin_port);

  Service service(env.config());
  std::string error;
  CHECK_FALSE(serve_forever(service, "127.0.0.1", port, &error));
  CHECK(error.find(std::to_string(port)) != std::string::npos);
  ::close(occupant);
}

TEST_CASE("end-to-end determinism across full pipeline runs") {
  setenv("DEPWATCH_NOW", "2018-07-01T00:00:00Z", 1);
  auto run_once = [](const std::string& tag) {
    Env env(tag, "", "hfiref0x/LightFTP, mozilla/firefox, acme/widget");
    run_scan(env.config());
    run_ingest(env.config());
    std::string store_bytes = slurp(env.store());
    std::string alerts = alerts_payload(run_alerts(env.config()));
    return std::make_pair(store_bytes, alerts);
  };
  auto first = run_once("e2e-a");
  auto second = run_once("e2e-b");
  CHECK(first.first == second.first);
  CHECK(first.second == second.second);
  CHECK(!first.second.empty());
}
