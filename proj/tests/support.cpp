#include "support.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <sys/wait.h>

#include "depwatch/ontology.hpp"

namespace depwatch::testing {

std::filesystem::path make_temp_dir(const std::string& tag) {
  std::string templ =
      (std::filesystem::temp_directory_path() / ("depwatch-" + tag + "-XXXXXX"))
          .string();
  std::vector<char> buf(templ.begin(), templ.end());
  buf.push_back('\0');
  if (!mkdtemp(buf.data())) {
    throw std::runtime_error("mkdtemp failed for " + templ);
  }
  return std::filesystem::path(buf.data());
}

// ---- Random data ---------------------------------------------------------

namespace {

std::vector<Term> iri_pool() {
  std::vector<Term> pool;
  for (int i = 0; i < 6; ++i) {
    pool.push_back(Term::iri("http://example.org/node" + std::to_string(i)));
  }
  for (int i = 0; i < 4; ++i) {
    pool.push_back(Term::iri("lib" + std::to_string(i) + ".so.1"));
  }
  for (int i = 0; i < 3; ++i) {
    pool.push_back(Term::iri("/usr/bin/app" + std::to_string(i)));
  }
  for (int i = 0; i < 3; ++i) {
    pool.push_back(Term::iri(std::string(ns::soft) + "X" + std::to_string(i)));
  }
  return pool;
}

std::vector<Term> predicate_pool() {
  std::vector<Term> pool;
  for (int i = 0; i < 4; ++i) {
    pool.push_back(Term::iri("http://example.org/p" + std::to_string(i)));
  }
  pool.push_back(vocab::is_linked_to());
  pool.push_back(vocab::has_vulnerability());
  return pool;
}

std::vector<Term> literal_pool() {
  return {
      Term::literal("hello"),
      Term::literal("line\nbreak and\ttab"),
      Term::literal("quote \" backslash \\"),
      Term::literal("päßwörd é"),
      Term::literal("2018-01-01T00:00:00Z",
                    std::string(ns::xsd) + "dateTime"),
      Term::literal("42", std::string(ns::xsd) + "integer"),
      Term::literal(""),
  };
}

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& pool) {
  return pool[rng.below(pool.size())];
}

}  // namespace

Graph random_graph(Rng& rng, std::size_t max_triples) {
  Graph g;
  const Graph defaults = bootstrap_graph();
  for (const auto& [label, iri] : defaults.prefixes()) {
    g.add_prefix(label, iri);
  }
  const auto subjects = iri_pool();
  const auto predicates = predicate_pool();
  const auto literals = literal_pool();
  std::size_t n = rng.below(max_triples + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Term object = rng.chance(35) ? pick(rng, literals) : pick(rng, subjects);
    g.insert(pick(rng, subjects), pick(rng, predicates), std::move(object));
  }
  return g;
}

Graph random_schema_graph(Rng& rng, std::size_t max_triples) {
  Graph g = bootstrap_graph();
  const Term& type = vocab::rdf_type();

  std::vector<Term> products, libraries, projects, vulns;
  std::size_t n_products = 2 + rng.below(3);
  std::size_t n_libraries = 3 + rng.below(4);
  std::size_t n_projects = 1 + rng.below(2);
  std::size_t n_vulns = 1 + rng.below(3);

  for (std::size_t i = 0; i < n_products; ++i) {
    Term p = Term::iri("/usr/bin/prod" + std::to_string(i));
    g.insert(p, type, vocab::product());
    // A product that is itself a tracked shared object: keeps Is_Linked_To
    // subjects product-typed while still exercising two-hop chains.
    if (rng.chance(30)) {
      g.insert(p, type, vocab::library());
      libraries.push_back(p);
    }
    products.push_back(p);
  }
  for (std::size_t i = 0; i < n_libraries; ++i) {
    Term l = Term::iri("lib" + std::to_string(i) + ".so." +
                       std::to_string(rng.below(3)));
    g.insert(l, type, vocab::library());
    libraries.push_back(l);
  }
  for (std::size_t i = 0; i < n_projects; ++i) {
    Term p = Term::iri("proj" + std::to_string(i));
    g.insert(p, type, vocab::project());
    projects.push_back(p);
  }
  for (std::size_t i = 0; i < n_vulns; ++i) {
    Term v = Term::iri("vuln_" + std::to_string(i));
    g.insert(v, type, vocab::vulnerability());
    vulns.push_back(v);
  }

  while (g.size() < max_triples && !rng.chance(8)) {
    switch (rng.below(4)) {
      case 0:
        g.insert(pick(rng, products), vocab::is_linked_to(),
                 pick(rng, libraries));
        break;
      case 1:
        g.insert(pick(rng, products), vocab::utilizes(), pick(rng, projects));
        break;
      case 2: {
        const std::vector<Term>* holders =
            rng.chance(60) ? &libraries
                           : (rng.chance(50) ? &projects : &products);
        g.insert(pick(rng, *holders), vocab::has_vulnerability(),
                 pick(rng, vulns));
        break;
      }
      case 3: {
        Term intel_node =
            Term::iri("Int" + std::to_string(1000 + rng.below(999)));
        g.insert(intel_node, type, vocab::intelligence());
        g.insert(intel_node, vocab::intel_has_vulnerability(),
                 pick(rng, vulns));
        break;
      }
    }
  }
  return g;
}

Query random_query(Rng& rng, const Graph& g, std::size_t max_patterns) {
  std::vector<Triple> triples(g.triples().begin(), g.triples().end());
  const std::vector<std::string> var_names = {"a", "b", "c", "d"};

  Query q;
  std::set<std::string> used_vars;
  std::size_t n_patterns = 1 + rng.below(max_patterns);
  for (std::size_t i = 0; i < n_patterns && !triples.empty(); ++i) {
    const Triple& seed = triples[rng.below(triples.size())];
    TriplePattern pattern{seed.subject, seed.predicate, seed.object};
    auto variabilize = [&](Term& slot) {
      std::string name = var_names[rng.below(var_names.size())];
      slot = Term::variable(name);
      used_vars.insert(name);
    };
    if (i == 0) {
      // Seed pattern: up to two variable positions, keeping it selective.
      if (rng.chance(70)) variabilize(pattern.object);
      if (rng.chance(40)) variabilize(pattern.subject);
      if (rng.chance(15) && (!pattern.subject.is_variable() ||
                             !pattern.object.is_variable())) {
        variabilize(pattern.predicate);
      }
    } else {
      // Joins: share an already-used variable, keep the predicate concrete.
      if (!used_vars.empty() && rng.chance(75)) {
        std::vector<std::string> pool(used_vars.begin(), used_vars.end());
        pattern.subject = Term::variable(pick(rng, pool));
      }
      if (rng.chance(60)) variabilize(pattern.object);
    }
    q.patterns.push_back(std::move(pattern));
  }
  if (q.patterns.empty()) {
    TriplePattern open;
    open.subject = Term::variable("a");
    open.predicate = Term::variable("b");
    open.object = Term::variable("c");
    used_vars = {"a", "b", "c"};
    q.patterns.push_back(std::move(open));
  }
  if (used_vars.empty()) {
    q.patterns.front().object = Term::variable("a");
    used_vars.insert("a");
  }
  std::vector<std::string> pool(used_vars.begin(), used_vars.end());
  std::size_t n_select = 1 + rng.below(std::min<std::size_t>(2, pool.size()));
  std::set<std::string> chosen;
  while (chosen.size() < n_select) chosen.insert(pick(rng, pool));
  q.select_vars.assign(chosen.begin(), chosen.end());
  return q;
}

// ---- Oracles --------------------------------------------------------------

std::vector<Triple> oracle_match(const Graph& g, const std::optional<Term>& s,
                                 const std::optional<Term>& p,
                                 const std::optional<Term>& o) {
  std::vector<Triple> out;
  for (const Triple& t : g.triples()) {
    if (s && t.subject != *s) continue;
    if (p && t.predicate != *p) continue;
    if (o && t.object != *o) continue;
    out.push_back(t);
  }
  return out;
}

ResultTable oracle_execute(const Query& q, const Graph& g) {
  using Row = std::map<std::string, Term>;
  std::vector<Row> rows{{}};
  for (const TriplePattern& pattern : q.patterns) {
    std::vector<Row> next_rows;
    for (const Row& row : rows) {
      for (const Triple& t : g.triples()) {
        Row candidate = row;
        bool ok = true;
        auto check = [&](const Term& slot, const Term& value) {
          if (!ok) return;
          if (!slot.is_variable()) {
            if (slot != value) ok = false;
            return;
          }
          auto it = candidate.find(slot.value);
          if (it == candidate.end()) {
            candidate[slot.value] = value;
          } else if (it->second != value) {
            ok = false;
          }
        };
        check(pattern.subject, t.subject);
        check(pattern.predicate, t.predicate);
        check(pattern.object, t.object);
        if (ok) next_rows.push_back(std::move(candidate));
      }
    }
    rows = std::move(next_rows);
  }
  ResultTable table;
  table.header = q.select_vars;
  std::set<std::vector<Term>> projected;
  for (const Row& row : rows) {
    std::vector<Term> out;
    for (const std::string& var : q.select_vars) out.push_back(row.at(var));
    projected.insert(std::move(out));
  }
  table.rows.assign(projected.begin(), projected.end());
  return table;
}

namespace {

// Subclass closure computed straight off the triple list.
std::set<Term> oracle_subclasses(const Graph& g, const Term& cls) {
  std::set<Term> classes{cls};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Triple& t : g.triples()) {
      if (t.predicate == vocab::rdfs_subclass_of() &&
          classes.count(t.object) > 0 && classes.count(t.subject) == 0) {
        classes.insert(t.subject);
        changed = true;
      }
    }
  }
  return classes;
}

using ClosureCache = std::map<Term, std::set<Term>>;

bool oracle_atom_holds(const Graph& g, const Atom& atom, const Binding& b,
                       ClosureCache& closures) {
  if (const auto* cls = std::get_if<ClassAtom>(&atom)) {
    const Term& node = b.at(cls->var);
    auto it = closures.find(cls->cls);
    if (it == closures.end()) {
      it = closures.emplace(cls->cls, oracle_subclasses(g, cls->cls)).first;
    }
    for (const Term& c : it->second) {
      if (g.triples().count(Triple{node, vocab::rdf_type(), c}) > 0) {
        return true;
      }
    }
    return false;
  }
  const auto& prop = std::get<PropertyAtom>(atom);
  auto value = [&](const Term& t) {
    return t.is_variable() ? b.at(t.value) : t;
  };
  return g.triples().count(Triple{value(prop.subject), prop.property,
                                  value(prop.object)}) > 0;
}

}  // namespace

std::vector<OracleAlert> oracle_evaluate(const Graph& g,
                                         const std::vector<Rule>& rules) {
  // Candidate universe: every term in subject or object position.
  std::set<Term> universe_set;
  for (const Triple& t : g.triples()) {
    universe_set.insert(t.subject);
    universe_set.insert(t.object);
  }
  std::vector<Term> universe(universe_set.begin(), universe_set.end());

  ClosureCache closures;
  std::map<std::tuple<Term, Term, std::string>, OracleAlert> grouped;
  for (const Rule& rule : rules) {
    std::vector<std::string> vars;
    std::set<std::string> seen;
    auto note = [&](const Term& t) {
      if (t.is_variable() && seen.insert(t.value).second) {
        vars.push_back(t.value);
      }
    };
    for (const Atom& atom : rule.body) {
      if (const auto* cls = std::get_if<ClassAtom>(&atom)) {
        note(Term::variable(cls->var));
      } else {
        const auto& prop = std::get<PropertyAtom>(atom);
        note(prop.subject);
        note(prop.object);
      }
    }

    // Depth-first sweep of every assignment, checking atoms as soon as all
    // their variables are bound.
    Binding binding;
    auto atoms_ok_at = [&](std::size_t depth) {
      for (const Atom& atom : rule.body) {
        bool ready = true;
        auto need = [&](const Term& t) {
          if (t.is_variable() && binding.find(t.value) == binding.end()) {
            ready = false;
          }
        };
        if (const auto* cls = std::get_if<ClassAtom>(&atom)) {
          need(Term::variable(cls->var));
        } else {
          const auto& prop = std::get<PropertyAtom>(atom);
          need(prop.subject);
          need(prop.object);
        }
        if (!ready) continue;
        (void)depth;
        if (!oracle_atom_holds(g, atom, binding, closures)) return false;
      }
      return true;
    };

    std::vector<std::size_t> cursor(vars.size(), 0);
    std::size_t depth = 0;
    if (vars.empty()) continue;
    while (true) {
      if (cursor[depth] < universe.size()) {
        binding[vars[depth]] = universe[cursor[depth]];
        if (atoms_ok_at(depth)) {
          if (depth + 1 == vars.size()) {
            Term subject = binding.at(rule.head_var);
            Term vulnerability;
            for (const Atom& atom : rule.body) {
              if (const auto* prop = std::get_if<PropertyAtom>(&atom)) {
                if (prop->property == vocab::has_vulnerability()) {
                  vulnerability = prop->object.is_variable()
                                      ? binding.at(prop->object.value)
                                      : prop->object;
                  break;
                }
              }
            }
            auto key = std::make_tuple(subject, vulnerability, rule.name);
            auto it = grouped.find(key);
            if (it == grouped.end()) {
              OracleAlert alert;
              alert.subject = subject;
              alert.vulnerability = vulnerability;
              alert.rule_name = rule.name;
              it = grouped.emplace(key, std::move(alert)).first;
            }
            it->second.bindings.insert(binding);
            ++cursor[depth];
          } else {
            ++depth;
            cursor[depth] = 0;
          }
        } else {
          ++cursor[depth];
        }
      } else {
        binding.erase(vars[depth]);
        if (depth == 0) break;
        --depth;
        ++cursor[depth];
      }
    }
  }

  std::vector<OracleAlert> out;
  for (auto& [key, alert] : grouped) out.push_back(std::move(alert));
  std::sort(out.begin(), out.end());
  return out;
}

int run_command(const std::string& command, std::string* stdout_text) {
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return -1;
  std::string output;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    output.append(buf.data(), n);
  }
  int status = pclose(pipe);
  if (stdout_text) *stdout_text = std::move(output);
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

}  // namespace depwatch::testing
