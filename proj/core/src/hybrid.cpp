#include "lumi/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lumi/errors.hpp"

namespace lumi {

namespace {

Point mat_vec(const std::vector<std::vector<double>>& m, const Point& x) {
  Point out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += m[i][j] * x[j];
  }
  return out;
}

void check_matrix(const std::vector<std::vector<double>>& m, int dim, const char* name) {
  if (m.empty()) return;
  if (m.size() != static_cast<std::size_t>(dim)) {
    throw InputError(std::string("field matrix ") + name + " needs " + std::to_string(dim) + " rows");
  }
  for (const auto& row : m) {
    if (row.size() != static_cast<std::size_t>(dim)) {
      throw InputError(std::string("field matrix ") + name + " needs " + std::to_string(dim) +
                       " columns");
    }
  }
}

}  // namespace

void VectorField::validate(int dim) const {
  check_matrix(A, dim, "A");
  check_matrix(B, dim, "B");
  if (!c.empty() && c.size() != static_cast<std::size_t>(dim)) {
    throw InputError("field offset c needs " + std::to_string(dim) + " entries");
  }
  if (kind == Kind::Walker && !(speed_cap >= 0.0)) throw InputError("speed_cap must be >= 0");
}

const char* field_kind_name(VectorField::Kind kind) {
  switch (kind) {
    case VectorField::Kind::Zero: return "zero";
    case VectorField::Kind::Constant: return "constant";
    case VectorField::Kind::Affine: return "affine";
    case VectorField::Kind::Walker: return "walker";
  }
  return "?";
}

std::optional<VectorField::Kind> field_kind_from_name(const std::string& name) {
  for (auto k : {VectorField::Kind::Zero, VectorField::Kind::Constant, VectorField::Kind::Affine,
                 VectorField::Kind::Walker}) {
    if (name == field_kind_name(k)) return k;
  }
  return std::nullopt;
}

Point field_velocity(const VectorField& field, const Point& x, const Point& u) {
  Point v(x.size(), 0.0);
  switch (field.kind) {
    case VectorField::Kind::Zero:
      break;
    case VectorField::Kind::Constant:
      if (!field.c.empty()) v = field.c;
      break;
    case VectorField::Kind::Affine: {
      if (!field.A.empty()) v = mat_vec(field.A, x);
      if (!field.B.empty()) {
        const Point bu = mat_vec(field.B, u);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += bu[i];
      }
      for (std::size_t i = 0; i < field.c.size(); ++i) v[i] += field.c[i];
      break;
    }
    case VectorField::Kind::Walker:
      for (std::size_t i = 0; i < x.size(); ++i) v[i] = u[i];
      break;
  }
  return v;
}

double lipschitz_constant(const VectorField& field) {
  if (field.kind != VectorField::Kind::Affine) return 0.0;
  double best = 0.0;
  for (const auto& row : field.A) {
    double s = 0.0;
    for (double a : row) s += std::abs(a);
    best = std::max(best, s);
  }
  return best;
}

CellId abstract_cell(const Grid& grid, const Point& x) {
  std::vector<int> coords(grid.dim());
  const int n = grid.cells_per_axis();
  for (int a = 0; a < grid.dim(); ++a) {
    const double v = std::clamp(x.at(a), 0.0, 1.0);
    coords[a] = std::min(n - 1, static_cast<int>(std::floor(v * n)));
  }
  return grid.index(coords);
}

std::vector<CellId> abstraction_gaps(const Grid& grid, std::size_t per_axis) {
  if (per_axis == 0) throw InputError("sampling needs at least one point per axis");
  std::set<CellId> hit;
  const int n = grid.cells_per_axis();
  const std::size_t side = per_axis * static_cast<std::size_t>(n);
  std::size_t total = 1;
  for (int a = 0; a < grid.dim(); ++a) total *= side;
  Point x(grid.dim());
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    for (int a = 0; a < grid.dim(); ++a) {
      x[a] = (static_cast<double>(rest % side) + 0.5) / static_cast<double>(side);
      rest /= side;
    }
    hit.insert(abstract_cell(grid, x));
  }
  std::vector<CellId> gaps;
  for (CellId c = 0; c < grid.cell_count(); ++c) {
    if (!hit.count(c)) gaps.push_back(c);
  }
  return gaps;
}

HybridRun simulate_hybrid(const RobotMachine& robot, const EnvMachine& env,
                          const VectorField& field, std::span<const CellId> init_cells,
                          const TimePath& path, const HybridOptions& options) {
  const Grid& grid = env.grid;
  const std::size_t n = env.n_robots;
  const int dim = grid.dim();
  const double w = grid.cell_width();
  if (path.n_robots != n) throw ModelError("path and machine robot counts differ");
  if (init_cells.size() != n) throw ModelError("initial placement needs one cell per robot");
  if (options.substeps == 0) throw InputError("substeps must be positive");
  field.validate(dim);
  const double h = 1.0 / static_cast<double>(options.substeps);
  if (lipschitz_constant(field) * h > 1.0) {
    throw ModelError("integration step too coarse: L*h = " +
                     std::to_string(lipschitz_constant(field) * h));
  }
  const double lo = w / 2.0;
  const double hi = 1.0 - w / 2.0;

  HybridRun run;
  run.init_cells.assign(init_cells.begin(), init_cells.end());
  run.path = path;

  std::vector<Point> pos(n);
  GlobalConfig cfg;
  std::vector<LightId> lights(n);
  for (std::size_t r = 0; r < n; ++r) {
    pos[r] = grid.center(init_cells[r]);
    const StateId e = robot.initial(r, init_cells[r]);
    const auto l = robot.light(e);
    if (!l) throw ModelError("light undefined on an initial state");
    cfg.robots.push_back({e, std::nullopt});
    lights[r] = *l;
  }
  cfg.env = env.make_state(init_cells, lights);
  cfg.explored = Region::empty(grid);
  cfg.contributed.assign(n, Region::empty(grid));
  cfg.pending.assign(n, std::nullopt);
  run.positions.push_back(pos);
  run.configs.push_back(cfg);

  for (std::size_t s = 0; s < path.steps(); ++s) {
    const auto& acts = path.activations[s];
    GlobalConfig next = cfg;
    next.time = cfg.time + 1;
    bool moved = false;
    for (const auto& a : acts) {
      if (a.phase != Phase::Move) continue;
      const auto act = robot.control(cfg.robots[a.robot].e);
      if (!act) throw ModelError("control undefined for r" + std::to_string(a.robot + 1));
      moved = true;
      const std::size_t delta = *act / robot.light_count;
      lights[a.robot] = static_cast<LightId>(*act % robot.light_count);
      const auto dv = delta_vector(dim, delta);
      Point u(dim);
      for (int i = 0; i < dim; ++i) {
        u[i] = dv[i] * w;
        if (field.kind == VectorField::Kind::Walker) {
          const double cap = field.speed_cap * w;
          u[i] = std::clamp(u[i], -cap, cap);
        }
      }
      Point& x = pos[a.robot];
      for (std::size_t k = 0; k < options.substeps; ++k) {
        const Point v = field_velocity(field, x, u);
        for (int i = 0; i < dim; ++i) x[i] += h * v[i];
      }
      for (int i = 0; i < dim; ++i) {
        if (std::isnan(x[i])) throw ModelError("position became NaN for r" + std::to_string(a.robot + 1));
        if (x[i] < lo - kDistanceTolerance || x[i] > hi + kDistanceTolerance) {
          run.clamps.push_back({s, a.robot, i, x[i]});
        }
        x[i] = std::clamp(x[i], lo, hi);
      }
    }
    if (moved) {
      std::vector<CellId> cells(n);
      for (std::size_t r = 0; r < n; ++r) cells[r] = abstract_cell(grid, pos[r]);
      next.env = env.make_state(cells, lights);
    }
    std::vector<Snapshot> snaps;
    for (const auto& a : acts) {
      if (a.phase != Phase::Look) continue;
      if (snaps.empty()) snaps = env.emit_obs(next.env, 0);
      const auto o = robot.observe(snaps.at(a.robot));
      if (!o) throw ModelError("observe undefined for r" + std::to_string(a.robot + 1));
      next.robots[a.robot].o = *o;
      next.pending[a.robot] = env.footprint(next.env, a.robot);
    }
    for (const auto& a : acts) {
      if (a.phase != Phase::Compute) continue;
      auto& local = next.robots[a.robot];
      if (!local.o) continue;
      const auto e = robot.step(local.e, *local.o);
      if (!e) throw ModelError("step undefined for r" + std::to_string(a.robot + 1));
      local.e = *e;
      if (auto& fp = next.pending[a.robot]) {
        next.explored = region_join(next.explored, *fp);
        next.contributed[a.robot] = region_join(next.contributed[a.robot], *fp);
        fp.reset();
      }
    }
    cfg = next;
    run.positions.push_back(pos);
    run.configs.push_back(cfg);
  }
  return run;
}

std::vector<HybridRun> enumerate_hybrid_runs(const RobotMachine& robot, const EnvMachine& env,
                                             const VectorField& field,
                                             const std::vector<std::vector<CellId>>& inits,
                                             const std::vector<TimePath>& schedules,
                                             const HybridOptions& options, std::size_t cap) {
  std::vector<HybridRun> out;
  for (const auto& init : inits) {
    for (const auto& path : schedules) {
      if (out.size() >= cap) throw CapExceeded("hybrid runs exceed cap " + std::to_string(cap));
      out.push_back(simulate_hybrid(robot, env, field, init, path, options));
    }
  }
  return out;
}

AbstractTrace abstract_trace(const std::vector<GlobalConfig>& configs) {
  AbstractTrace out;
  for (const auto& c : configs) {
    out.push_back(c.env);
    for (const auto& l : c.robots) {
      out.push_back(l.e);
      out.push_back(l.o ? *l.o + 1 : 0);
    }
  }
  return out;
}

std::string format_abstract_trace(const AbstractTrace& trace, std::size_t n_robots) {
  std::ostringstream os;
  const std::size_t stride = 1 + 2 * n_robots;
  for (std::size_t i = 0; i + stride <= trace.size(); i += stride) {
    if (i) os << ' ';
    os << trace[i];
    for (std::size_t r = 0; r < n_robots; ++r) {
      os << (r ? ',' : ':') << trace[i + 1 + 2 * r] << '/';
      const auto o = trace[i + 2 + 2 * r];
      if (o == 0) {
        os << '-';
      } else {
        os << o - 1;
      }
    }
  }
  return os.str();
}

EquivalenceReport check_trace_equivalence(const std::vector<SystemRun>& machine,
                                          const std::vector<HybridRun>& hybrid,
                                          std::size_t n_robots, std::size_t max_witnesses) {
  std::set<AbstractTrace> m, h;
  for (const auto& r : machine) m.insert(abstract_trace(r.configs));
  for (const auto& r : hybrid) h.insert(abstract_trace(r.configs));
  EquivalenceReport rep;
  rep.machine_traces = m.size();
  rep.hybrid_traces = h.size();
  for (const auto& r : hybrid) rep.clamps += r.clamps.size();
  for (const auto& t : m) {
    if (h.count(t)) continue;
    rep.equal = false;
    if (rep.machine_only.size() < max_witnesses) {
      rep.machine_only.push_back(format_abstract_trace(t, n_robots));
    }
  }
  for (const auto& t : h) {
    if (m.count(t)) continue;
    rep.equal = false;
    if (rep.hybrid_only.size() < max_witnesses) {
      rep.hybrid_only.push_back(format_abstract_trace(t, n_robots));
    }
  }
  return rep;
}

}  // namespace lumi
