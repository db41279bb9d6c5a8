#include <algorithm>
#include <set>
#include <unordered_map>

#include "lumi/tasks.hpp"

namespace lumi {

namespace {

Formula sp(const Region& u) {
  Atom a;
  a.kind = AtomKind::Sp;
  a.region = u;
  a.region_name = u.to_string();
  return Formula::atom(std::move(a));
}

std::vector<std::size_t> all_robots(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t r = 0; r < n; ++r) out[r] = r;
  return out;
}

// Folds a validity over every universe region into one condition.
ConditionResult universe_validity(Checker& checker, const std::string& name,
                                  const std::vector<Region>& universe,
                                  const std::function<Formula(const Region&)>& make) {
  ConditionResult out{name, Tri::True, {}, ""};
  for (const auto& u : universe) {
    const Verdict v = checker.valid(make(u));
    if (v.value == Tri::True) continue;
    if (v.value == Tri::False || out.value == Tri::True) {
      if (out.value != Tri::False) {
        out.value = v.value;
        out.witnesses = v.witnesses;
        out.detail = "region " + u.to_string();
      }
    }
  }
  return out;
}

}  // namespace

void install_exploration_atoms(InterpretedSystem& sys) {
  sys.register_provider(AtomKind::Sp, [](const InterpretedSystem& s, const Atom& a) {
    if (a.cylinder || !a.region) {
      throw InputError("exploration cannot value " + a.to_string());
    }
    Truth t(s.point_count());
    for (std::size_t p = 0; p < t.size(); ++p) {
      t[p] = region_leq(*a.region, s.config(p).explored) ? 1 : 0;
    }
    return t;
  });
}

std::vector<Region> region_universe(const AtomCatalog& catalog) {
  std::vector<Region> out;
  std::set<std::uint64_t> seen;
  auto add = [&](const Region& r) {
    if (seen.insert(r.bits()).second) out.push_back(r);
  };
  add(Region::empty(catalog.grid));
  add(Region::full(catalog.grid));
  for (const auto& [name, r] : catalog.regions) add(r);
  for (CellId c = 0; c < catalog.grid.cell_count(); ++c) add(Region(catalog.grid, {c}));
  return out;
}

std::vector<ConditionResult> check_exploration_conditions(Checker& checker,
                                                          const AtomCatalog& catalog) {
  const auto& sys = checker.system();
  const std::size_t n = sys.n_robots();
  const auto universe = region_universe(catalog);
  const auto everyone = all_robots(n);
  std::vector<ConditionResult> out;

  out.push_back(universe_validity(checker, "agency", universe, [&](const Region& u) {
    return Formula::implies(sp(u), Formula::dist(everyone, sp(u)));
  }));

  // Independence: wherever D sp(U) holds, U splits into per-robot parts
  // V_r = U & km_r, with km_r the region r knows explored.
  {
    ConditionResult ind{"independence", Tri::True, {}, ""};
    std::vector<std::vector<std::uint64_t>> km(n);
    for (std::size_t r = 0; r < n; ++r) {
      const auto& ids = sys.classes(r);
      std::unordered_map<std::uint32_t, std::uint64_t> meet;
      for (std::size_t p = 0; p < ids.size(); ++p) {
        const std::uint64_t bits = sys.config(p).explored.bits();
        auto [it, fresh] = meet.emplace(ids[p], bits);
        if (!fresh) it->second &= bits;
      }
      km[r].resize(ids.size());
      for (std::size_t p = 0; p < ids.size(); ++p) km[r][p] = meet[ids[p]];
    }
    for (const auto& u : universe) {
      const auto& d = checker.label(Formula::dist(everyone, sp(u)));
      for (std::size_t p = 0; p < d.size(); ++p) {
        if (d[p] != Tri::True) continue;
        std::uint64_t joined = 0;
        for (std::size_t r = 0; r < n; ++r) joined |= u.bits() & km[r][p];
        if (joined != u.bits()) {
          if (ind.value == Tri::True) ind.detail = "region " + u.to_string();
          ind.value = Tri::False;
          if (ind.witnesses.size() < 16) ind.witnesses.push_back(p);
        }
      }
    }
    out.push_back(std::move(ind));
  }

  out.push_back(universe_validity(checker, "stability", universe, [&](const Region& u) {
    return Formula::implies(sp(u), Formula::always(sp(u)));
  }));

  {
    ConditionResult recall{"recall", Tri::True, {}, ""};
    for (std::size_t r = 0; r < n; ++r) {
      auto c = universe_validity(checker, "recall", universe, [&](const Region& u) {
        const Formula k = Formula::know(r, sp(u));
        return Formula::implies(k, Formula::always(k));
      });
      if (c.value == Tri::True) continue;
      if (recall.value != Tri::False) {
        recall.value = c.value;
        recall.witnesses = c.witnesses;
        recall.detail = "r" + std::to_string(r + 1) + " " + c.detail;
      }
    }
    out.push_back(std::move(recall));
  }
  return out;
}

ConditionResult check_liveness(Checker& checker, const AtomCatalog& catalog) {
  const auto& sys = checker.system();
  const auto universe = region_universe(catalog);
  const std::size_t cells = catalog.grid.cell_count();
  ConditionResult out{"liveness", Tri::True, {}, ""};
  std::vector<std::vector<Tri>> labels;
  for (const auto& u : universe) labels.push_back(checker.label(Formula::eventually(sp(u))));
  for (std::size_t run = 0; run < sys.runs().size(); ++run) {
    const std::size_t p0 = sys.point_id(run, 0);
    Tri run_value = Tri::True;
    for (CellId c = 0; c < cells; ++c) {
      Tri covered = Tri::False;
      for (std::size_t i = 0; i < universe.size(); ++i) {
        if (universe[i].contains(c)) covered = tri_or(covered, labels[i][p0]);
      }
      run_value = tri_and(run_value, covered);
      if (covered == Tri::False && out.detail.empty()) {
        out.detail = "cell " + std::to_string(c) + " never explored in run " + std::to_string(run);
      }
    }
    if (run_value != Tri::True) {
      if (run_value == Tri::False || out.value == Tri::True) {
        if (out.value != Tri::False) out.value = run_value;
      }
      if (out.witnesses.size() < 16) out.witnesses.push_back(p0);
    }
  }
  return out;
}

const char* termination_name(TerminationMode mode) {
  switch (mode) {
    case TerminationMode::Parallel: return "PARALLEL";
    case TerminationMode::Selfish: return "SELFISH";
    case TerminationMode::Cooperative: return "COOPERATIVE";
  }
  return "?";
}

Formula termination_formula(TerminationMode mode, const AtomCatalog& catalog) {
  const Formula x = sp(Region::full(catalog.grid));
  const std::size_t n = catalog.n_robots;
  switch (mode) {
    case TerminationMode::Parallel:
      return Formula::eventually(Formula::dist(all_robots(n), x));
    case TerminationMode::Selfish:
      return Formula::eventually(Formula::everyone(n, x));
    case TerminationMode::Cooperative:
      return Formula::eventually(
          Formula::everyone(n, Formula::eventually(Formula::everyone(n, x))));
  }
  return x;
}

Verdict check_termination(Checker& checker, TerminationMode mode, const AtomCatalog& catalog) {
  return checker.valid(termination_formula(mode, catalog));
}

ConditionResult check_comm_liveness(Checker& checker, const AtomCatalog& catalog) {
  const std::size_t n = checker.system().n_robots();
  const auto universe = region_universe(catalog);
  ConditionResult out{"comm-liveness", Tri::True, {}, ""};
  for (std::size_t r = 0; r < n; ++r) {
    auto c = universe_validity(checker, "comm-liveness", universe, [&](const Region& u) {
      return Formula::implies(Formula::know(r, sp(u)),
                              Formula::eventually(Formula::everyone(n, sp(u))));
    });
    if (c.value == Tri::True) continue;
    if (out.value != Tri::False) {
      out.value = c.value;
      out.witnesses = c.witnesses;
      out.detail = "r" + std::to_string(r + 1) + " " + c.detail;
    }
  }
  return out;
}

}  // namespace lumi
