#include <algorithm>
#include <functional>

#include "lumi/tasks.hpp"

namespace lumi {

namespace {

Formula atom_of(AtomKind kind) {
  Atom a;
  a.kind = kind;
  return Formula::atom(std::move(a));
}

std::vector<std::size_t> all_robots(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t r = 0; r < n; ++r) out[r] = r;
  return out;
}

Tri worst(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
  return Tri::True;
}

std::string path_name(const IntruderPath& path) {
  if (path.empty()) return "absent";
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) s += (i ? "," : "") + std::to_string(path[i]);
  return "[" + s + "]";
}

}  // namespace

std::vector<IntruderPath> enumerate_intruder_paths(const Grid& grid, double speed,
                                                   std::size_t levels, std::size_t cap) {
  if (speed < 0.0) throw InputError("intruder speed must be >= 0");
  if (levels == 0) throw InputError("surveillance needs at least one level");
  std::vector<std::vector<CellId>> next(grid.cell_count());
  for (CellId c = 0; c < grid.cell_count(); ++c) {
    for (CellId d = 0; d < grid.cell_count(); ++d) {
      if (grid.distance(c, d) <= speed * grid.cell_width() + kDistanceTolerance) next[c].push_back(d);
    }
  }
  std::vector<IntruderPath> out{IntruderPath{}};
  IntruderPath cur;
  std::function<void()> dfs = [&]() {
    if (cur.size() == levels) {
      if (out.size() >= cap) throw CapExceeded("intruder paths exceed cap " + std::to_string(cap));
      out.push_back(cur);
      return;
    }
    for (CellId d : next[cur.back()]) {
      cur.push_back(d);
      dfs();
      cur.pop_back();
    }
  };
  for (CellId c = 0; c < grid.cell_count(); ++c) {
    cur.assign(1, c);
    dfs();
  }
  return out;
}

CylinderRegion intruder_trace(const Grid& grid, const IntruderPath& path, std::size_t levels) {
  CylinderRegion out(grid, levels);
  if (path.empty()) return out;
  if (path.size() != levels) throw InputError("intruder path length differs from level count");
  for (std::size_t l = 0; l < levels; ++l) {
    out.insert(path[l], l);
    if (l + 1 < levels) out.insert(path[l + 1], l);
  }
  return out;
}

std::size_t level_of_step(std::size_t step, std::size_t levels) {
  return std::min(step / kPhasesPerCycle, levels - 1);
}

Region erode(const Region& u, double radius) {
  if (radius <= 0.0) return u;
  const Grid& g = u.grid();
  Region out = u;
  for (CellId c : u.cells()) {
    for (CellId d = 0; d < g.cell_count(); ++d) {
      if (!u.contains(d) && g.distance(c, d) <= radius + kDistanceTolerance) {
        out.erase(c);
        break;
      }
    }
  }
  return out;
}

std::optional<std::vector<std::size_t>> check_manifold(const CylinderRegion& cleared) {
  const Grid& g = cleared.grid();
  const std::size_t cells = g.cell_count();
  const std::size_t levels = cleared.levels();
  for (std::size_t l = 0; l < levels; ++l) {
    if (cleared.level(l).is_full()) return std::vector<std::size_t>(cells, l);
  }
  std::vector<std::vector<CellId>> lower(cells);
  for (CellId c = 0; c < cells; ++c) {
    for (CellId nb : g.neighbors(c)) {
      if (nb < c) lower[c].push_back(nb);
    }
  }
  std::vector<std::size_t> assign(cells, 0);
  std::function<bool(CellId)> dfs = [&](CellId c) {
    if (c == cells) return true;
    for (std::size_t l = 0; l < levels; ++l) {
      if (!cleared.contains(c, l)) continue;
      bool ok = true;
      for (CellId nb : lower[c]) {
        const std::size_t o = assign[nb];
        if ((o > l ? o - l : l - o) > 1) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      assign[c] = l;
      if (dfs(c + 1)) return true;
    }
    return false;
  };
  if (dfs(0)) return assign;
  return std::nullopt;
}

bool curve_meets(const Grid& grid, const IntruderPath& path, const std::vector<std::size_t>& g,
                 std::size_t levels) {
  if (path.empty()) return false;
  if (g.size() != grid.cell_count()) throw InputError("level function must cover every cell");
  for (std::size_t l = 0; l < levels; ++l) {
    if (g[path[l]] == l) return true;
    if (l + 1 < levels && g[path[l + 1]] == l) return true;
  }
  return false;
}

SurveillanceValuation value_surveillance(const InterpretedSystem& sys, const Grid& grid,
                                         const IntruderPath& path, const SurveillanceSpec& spec) {
  const std::size_t L = spec.levels;
  if (L == 0) throw InputError("surveillance needs at least one level");
  if (spec.speed < 0.0) throw InputError("intruder speed must be >= 0");
  const CylinderRegion trace = intruder_trace(grid, path, L);
  const double w = grid.cell_width();

  SurveillanceValuation val;
  val.found.assign(sys.point_count(), 0);
  val.secure.assign(sys.point_count(), 0);
  val.cleared.assign(sys.point_count(), CylinderRegion(grid, L));

  for (std::size_t r = 0; r < sys.runs().size(); ++r) {
    const auto& run = sys.runs()[r];
    const std::size_t base = sys.point_id(r, 0);
    std::vector<std::uint64_t> direct(L, 0);
    bool found = false;
    std::vector<std::uint8_t> raw_secure(run.horizon() + 1, 0);
    CylinderRegion last(grid, L);
    bool last_secure = false;
    bool have_last = false;
    for (std::size_t t = 0; t <= run.horizon(); ++t) {
      if (t > 0) {
        const std::size_t s = t - 1;
        const std::size_t l = level_of_step(s, L);
        const std::uint64_t tr = trace.level(l).bits();
        for (const auto& fp : run.looks[s]) {
          if (!fp) continue;
          if (fp->bits() & tr) found = true;
          direct[l] |= fp->bits() & ~tr;
        }
      }
      const std::size_t cur = level_of_step(t, L);
      CylinderRegion cleared(grid, L);
      for (std::size_t l0 = 0; l0 <= cur; ++l0) {
        if (direct[l0] == 0) continue;
        const Region d(grid, direct[l0]);
        cleared.add_level(l0, d);
        for (std::size_t l = l0 + 1; l <= cur; ++l) {
          cleared.add_level(l, erode(d, spec.speed * static_cast<double>(l - l0) * w));
        }
      }
      for (std::size_t l = 0; l < L; ++l) {
        for (CellId c : trace.level(l).cells()) {
          if (cleared.contains(c, l)) {
            cleared.erase(c, l);
            ++val.trace_hits;
          }
        }
      }
      if (!have_last || !(cleared == last)) {
        last_secure = check_manifold(cleared).has_value();
        last = cleared;
        have_last = true;
      }
      raw_secure[t] = last_secure ? 1 : 0;
      val.found[base + t] = found ? 1 : 0;
      val.cleared[base + t] = cleared;
    }
    const bool found_ever = val.found[base + run.horizon()] != 0;
    for (std::size_t t = 0; t <= run.horizon(); ++t) {
      if (raw_secure[t] && found_ever) ++val.conflicts;
      val.secure[base + t] = (raw_secure[t] && !found_ever) ? 1 : 0;
    }
  }
  return val;
}

std::unique_ptr<InterpretedSystem> surveillance_system(const std::vector<SystemRun>& runs,
                                                       std::size_t n_robots, const Grid& grid,
                                                       const IntruderPath& path,
                                                       const SurveillanceSpec& spec,
                                                       const AtomCatalog& catalog,
                                                       SurveillanceValuation* valuation) {
  auto sys = std::make_unique<InterpretedSystem>(runs, n_robots);
  install_exploration_atoms(*sys);
  SurveillanceValuation val = value_surveillance(*sys, grid, path, spec);
  Atom found;
  found.kind = AtomKind::Found;
  Atom secure;
  secure.kind = AtomKind::Secure;
  sys->set_truth(found, val.found);
  sys->set_truth(secure, val.secure);
  sys->downgrade_nonperiodic(val.found);
  sys->downgrade_nonperiodic(val.secure);
  for (const auto& [name, cyl] : catalog.cylinders) {
    if (cyl.levels() != spec.levels) {
      throw InputError("cylinder region " + name + " has " + std::to_string(cyl.levels()) +
                       " levels, expected " + std::to_string(spec.levels));
    }
    Truth t(sys->point_count());
    for (std::size_t p = 0; p < t.size(); ++p) t[p] = cyl.subset_of(val.cleared[p]) ? 1 : 0;
    Atom a;
    a.kind = AtomKind::Sp;
    a.cylinder = true;
    a.region_name = name;
    sys->downgrade_nonperiodic(t);
    sys->set_truth(a, std::move(t));
  }
  if (valuation) *valuation = std::move(val);
  return sys;
}

const char* surveillance_mode_name(SurveillanceMode mode) {
  switch (mode) {
    case SurveillanceMode::Plain: return "SURVEILLANCE";
    case SurveillanceMode::Parallel: return "PARALLEL";
    case SurveillanceMode::Selfish: return "SELFISH";
    case SurveillanceMode::Cooperative: return "COOPERATIVE";
  }
  return "?";
}

Formula surveillance_formula(SurveillanceMode mode, std::size_t n_robots) {
  auto wrap = [&](const Formula& f) {
    switch (mode) {
      case SurveillanceMode::Plain: return Formula::eventually(f);
      case SurveillanceMode::Parallel:
        return Formula::eventually(Formula::dist(all_robots(n_robots), f));
      case SurveillanceMode::Selfish: return Formula::eventually(Formula::everyone(n_robots, f));
      case SurveillanceMode::Cooperative:
        return Formula::eventually(Formula::everyone(
            n_robots, Formula::eventually(Formula::everyone(n_robots, f))));
    }
    return f;
  };
  return Formula::disj(wrap(atom_of(AtomKind::Found)), wrap(atom_of(AtomKind::Secure)));
}

SurveillanceReport check_surveillance(const std::vector<SystemRun>& runs, std::size_t n_robots,
                                      const Grid& grid, const SurveillanceSpec& spec,
                                      const AtomCatalog& catalog,
                                      const std::vector<SurveillanceMode>& modes) {
  SurveillanceReport rep;
  for (auto m : modes) rep.verdicts[m] = Tri::True;
  const auto paths = enumerate_intruder_paths(grid, spec.speed, spec.levels, spec.max_paths);
  rep.paths = paths.size();
  for (const auto& path : paths) {
    SurveillanceValuation val;
    auto sys = surveillance_system(runs, n_robots, grid, path, spec, catalog, &val);
    rep.conflicts += val.conflicts;
    rep.trace_hits += val.trace_hits;
    for (std::size_t r = 0; r < sys->runs().size(); ++r) {
      bool f = false, s = false;
      for (std::size_t t = 0; t <= sys->runs()[r].horizon(); ++t) {
        f |= val.found[sys->point_id(r, t)] != 0;
        s |= val.secure[sys->point_id(r, t)] != 0;
      }
      if (f && s) ++rep.both_found_and_secure;
    }
    Checker checker(*sys);
    for (auto m : modes) {
      const Verdict v = checker.initially(surveillance_formula(m, n_robots));
      if (v.value != Tri::True && rep.witnesses.size() < 16) {
        rep.witnesses.push_back(std::string(surveillance_mode_name(m)) + " " + tri_name(v.value) +
                                " intruder " + path_name(path) + " at " +
                                (v.witnesses.empty() ? std::string("?")
                                                     : point_name(*sys, v.witnesses[0])));
      }
      rep.verdicts[m] = worst(rep.verdicts[m], v.value);
    }
  }
  return rep;
}

}  // namespace lumi
