#include <algorithm>

#include "lumi/tasks.hpp"

namespace lumi {

namespace {

constexpr std::size_t kMaxLiteralTerms = 200000;

Formula pos(std::size_t r, CellId x) {
  Atom a;
  a.kind = AtomKind::Pos;
  a.robot = r;
  a.cell = x;
  return Formula::atom(std::move(a));
}

Formula init_pos(std::size_t r, CellId x) {
  Atom a;
  a.kind = AtomKind::InitPos;
  a.robot = r;
  a.cell = x;
  return Formula::atom(std::move(a));
}

Formula in(CellId x, const std::string& name, const Region& u) {
  Atom a;
  a.kind = AtomKind::In;
  a.cell = x;
  a.region = u;
  a.region_name = name;
  return Formula::atom(std::move(a));
}

Formula eventually_always(const Formula& f) { return Formula::eventually(Formula::always(f)); }

struct Named {
  std::string name;
  Region region;
};

std::vector<Named> resolve(const AtomCatalog& catalog, const std::vector<std::string>& names) {
  if (names.empty()) throw InputError("gathering needs at least one rendezvous region");
  std::vector<Named> out;
  std::vector<Region> regions;
  for (const auto& n : names) {
    auto r = catalog.find_region(n);
    if (!r) throw InputError("unknown rendezvous region " + n);
    out.push_back({n, *r});
    regions.push_back(*r);
  }
  require_disjoint(regions);
  return out;
}

Formula choose(std::size_t r, const Named& u, const Grid& g) {
  std::vector<Formula> fs;
  for (CellId x = 0; x < g.cell_count(); ++x) fs.push_back(Formula::conj(pos(r, x), in(x, u.name, u.region)));
  return Formula::disj_all(fs);
}

Formula initial_in(std::size_t b, const Named& u, const Grid& g) {
  std::vector<Formula> fs;
  for (CellId x = 0; x < g.cell_count(); ++x) {
    fs.push_back(Formula::conj(init_pos(b, x), in(x, u.name, u.region)));
  }
  return Formula::disj_all(fs);
}

Formula located(std::size_t r, const Region& u, bool initial) {
  std::vector<Formula> fs;
  for (CellId x : u.cells()) fs.push_back(initial ? init_pos(r, x) : pos(r, x));
  return Formula::disj_all(fs);
}

// Calls fn on every vector in cells^n.
void for_each_vector(const std::vector<CellId>& cells, std::size_t n,
                     const std::function<void(const std::vector<CellId>&)>& fn) {
  double total = 1.0;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<double>(cells.size());
  if (total > static_cast<double>(kMaxLiteralTerms)) {
    throw CapExceeded("literal gathering formula too large");
  }
  std::vector<std::size_t> idx(n, 0);
  std::vector<CellId> v(n);
  if (cells.empty()) return;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) v[i] = cells[idx[i]];
    fn(v);
    std::size_t i = 0;
    while (i < n && ++idx[i] == cells.size()) idx[i++] = 0;
    if (i == n) return;
  }
}

Formula vector_form(const std::vector<CellId>& cells, std::size_t n,
                    const std::function<Formula(std::size_t, CellId)>& term) {
  std::vector<Formula> ds;
  for_each_vector(cells, n, [&](const std::vector<CellId>& v) {
    std::vector<Formula> cs;
    for (std::size_t r = 0; r < n; ++r) cs.push_back(term(r, v[r]));
    ds.push_back(Formula::conj_all(cs));
  });
  return Formula::disj_all(ds);
}

}  // namespace

void install_gathering_atoms(InterpretedSystem& sys, const RobotMachine& robot) {
  auto cell_at = [&robot](const InterpretedSystem& s, std::size_t p, std::size_t r) {
    const auto c = robot.own_cell(s.config(p).robots.at(r).e);
    if (!c) throw ModelError("robot state carries no cell");
    return *c;
  };
  sys.register_provider(AtomKind::Pos, [cell_at](const InterpretedSystem& s, const Atom& a) {
    if (a.robot >= s.n_robots()) throw InputError("atom mentions an unknown robot");
    Truth t(s.point_count());
    for (std::size_t p = 0; p < t.size(); ++p) t[p] = cell_at(s, p, a.robot) == a.cell ? 1 : 0;
    return t;
  });
  sys.register_provider(AtomKind::InitPos, [cell_at](const InterpretedSystem& s, const Atom& a) {
    if (a.robot >= s.n_robots()) throw InputError("atom mentions an unknown robot");
    Truth t(s.point_count());
    for (std::size_t r = 0; r < s.runs().size(); ++r) {
      const std::size_t p0 = s.point_id(r, 0);
      const std::uint8_t v = cell_at(s, p0, a.robot) == a.cell ? 1 : 0;
      for (std::size_t k = 0; k <= s.runs()[r].horizon(); ++k) t[p0 + k] = v;
    }
    return t;
  });
  sys.register_provider(AtomKind::In, [](const InterpretedSystem& s, const Atom& a) {
    if (!a.region) throw InputError("in() needs a cell region");
    return Truth(s.point_count(), a.region->contains(a.cell) ? 1 : 0);
  });
}

void require_disjoint(const std::vector<Region>& rendezvous) {
  for (std::size_t i = 0; i < rendezvous.size(); ++i) {
    if (rendezvous[i].is_empty()) throw InputError("rendezvous region " + std::to_string(i) + " is empty");
    for (std::size_t j = i + 1; j < rendezvous.size(); ++j) {
      if (rendezvous[i].bits() & rendezvous[j].bits()) {
        throw InputError("rendezvous regions " + rendezvous[i].to_string() + " and " +
                         rendezvous[j].to_string() + " overlap");
      }
    }
  }
}

GatheringFormulas gathering_formulas(const AtomCatalog& catalog,
                                     const std::vector<std::string>& rendezvous_names) {
  const auto us = resolve(catalog, rendezvous_names);
  const std::size_t n = catalog.n_robots;
  const Grid& g = catalog.grid;
  std::vector<Formula> eg, sv, ag, va;
  for (const auto& u : us) {
    std::vector<Formula> eg_r, init_r, pos_r, ag_r;
    for (std::size_t r = 0; r < n; ++r) {
      eg_r.push_back(eventually_always(located(r, u.region, false)));
      init_r.push_back(located(r, u.region, true));
      pos_r.push_back(located(r, u.region, false));
      ag_r.push_back(eventually_always(choose(r, u, g)));
    }
    eg.push_back(Formula::conj_all(eg_r));
    sv.push_back(Formula::implies(Formula::conj_all(init_r), eventually_always(Formula::conj_all(pos_r))));
    ag.push_back(Formula::conj_all(ag_r));
    std::vector<Formula> someone;
    for (std::size_t b = 0; b < n; ++b) someone.push_back(initial_in(b, u, g));
    const Formula started = Formula::disj_all(someone);
    for (std::size_t a = 0; a < n; ++a) {
      va.push_back(Formula::implies(choose(a, u, g), Formula::know(a, started)));
    }
  }
  return {Formula::disj_all(eg), Formula::conj_all(sv), Formula::disj_all(ag), Formula::conj_all(va)};
}

GatheringFormulas literal_gathering_formulas(const AtomCatalog& catalog,
                                             const std::vector<std::string>& rendezvous_names) {
  const auto us = resolve(catalog, rendezvous_names);
  const std::size_t n = catalog.n_robots;
  std::vector<CellId> all(catalog.grid.cell_count());
  for (CellId c = 0; c < all.size(); ++c) all[c] = c;
  std::vector<Formula> eg, sv, ag, va;
  for (const auto& u : us) {
    const auto cells = u.region.cells();
    const Formula inside = vector_form(cells, n, [](std::size_t r, CellId x) { return pos(r, x); });
    const Formula started = vector_form(cells, n, [](std::size_t r, CellId x) { return init_pos(r, x); });
    eg.push_back(eventually_always(inside));
    sv.push_back(Formula::implies(started, eventually_always(inside)));
    ag.push_back(eventually_always(vector_form(all, n, [&](std::size_t r, CellId x) {
      return Formula::conj(pos(r, x), in(x, u.name, u.region));
    })));
    // Some robot started in U, over every initial vector.
    std::vector<Formula> ds;
    for_each_vector(all, n, [&](const std::vector<CellId>& v) {
      std::vector<Formula> cs, any;
      for (std::size_t b = 0; b < n; ++b) {
        cs.push_back(init_pos(b, v[b]));
        any.push_back(in(v[b], u.name, u.region));
      }
      cs.push_back(Formula::disj_all(any));
      ds.push_back(Formula::conj_all(cs));
    });
    const Formula someone = Formula::disj_all(ds);
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<Formula> here;
      for (CellId x = 0; x < all.size(); ++x) here.push_back(Formula::conj(pos(a, x), in(x, u.name, u.region)));
      va.push_back(Formula::implies(Formula::disj_all(here), Formula::know(a, someone)));
    }
  }
  return {Formula::disj_all(eg), Formula::conj_all(sv), Formula::disj_all(ag), Formula::conj_all(va)};
}

GatheringReport check_gathering(Checker& checker, const AtomCatalog& catalog,
                                const std::vector<std::string>& rendezvous_names) {
  const auto fs = gathering_formulas(catalog, rendezvous_names);
  GatheringReport rep;
  rep.eventual_gathering = checker.initially(fs.eventual_gathering);
  rep.starting_validity = checker.initially(fs.starting_validity);
  rep.agreement = checker.initially(fs.agreement);
  rep.validity = checker.valid(fs.validity);
  if (rep.agreement.value == Tri::True && rep.validity.value == Tri::True) {
    rep.reduction_holds = rep.eventual_gathering.value == Tri::True &&
                          rep.starting_validity.value == Tri::True;
  }
  const auto us = resolve(catalog, rendezvous_names);
  const auto& sys = checker.system();
  for (std::size_t r = 0; r < sys.n_robots(); ++r) {
    std::vector<std::vector<Tri>> labels;
    for (const auto& u : us) labels.push_back(checker.label(choose(r, u, catalog.grid)));
    for (std::size_t p = 0; p < sys.point_count(); ++p) {
      std::size_t hits = 0;
      for (const auto& l : labels) hits += l[p] == Tri::True ? 1 : 0;
      if (hits > 1) ++rep.exclusivity_violations;
    }
  }
  return rep;
}

}  // namespace lumi
