#include <algorithm>
#include <limits>
#include <sstream>

#include "lumi/errors.hpp"
#include "lumi/machine.hpp"

namespace lumi {

namespace {

constexpr std::size_t kMaxRegionCells = 20;

std::size_t delta_between(const Grid& grid, CellId from, CellId to) {
  const auto a = grid.coords(from);
  const auto b = grid.coords(to);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int diff = b[i] - a[i];
    if (diff == 0) continue;
    const std::size_t base = 1 + 4 * i;
    switch (diff) {
      case 1: return base;
      case -1: return base + 1;
      case 2: return base + 2;
      case -2: return base + 3;
      default: throw ModelError("cells are not within one move");
    }
  }
  return 0;
}

CellId nearest_in(const Grid& grid, CellId from, std::uint64_t bits) {
  CellId best = from;
  double best_d = std::numeric_limits<double>::infinity();
  for (CellId c = 0; c < grid.cell_count(); ++c) {
    if (!((bits >> c) & 1u)) continue;
    const double d = grid.distance(from, c);
    if (d < best_d - kDistanceTolerance) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::string region_bits_name(const Grid& grid, std::uint64_t bits) {
  return Region(grid, bits).to_string();
}

MachinePair region_walker(const Grid& grid, const Capabilities& caps, Protocol protocol,
                          std::size_t n_robots, const ProtocolOptions& options) {
  const std::uint64_t cells = grid.cell_count();
  if (cells > kMaxRegionCells) {
    throw CapExceeded("region-tracking protocols support at most " +
                      std::to_string(kMaxRegionCells) + " cells");
  }
  const std::uint64_t regions = std::uint64_t{1} << cells;
  const std::uint64_t full = regions - 1;
  const bool oblivious = caps.memory == Capabilities::Memory::Oblivious;
  const bool on_complete = options.broadcast == ProtocolOptions::Broadcast::OnComplete;
  const std::uint64_t light_count = oblivious ? 1 : (on_complete ? 2 : regions);
  const int stride = options.mutation == ProtocolOptions::Mutation::Jump2 ? 2 : 1;
  const int dim = grid.dim();
  const std::uint64_t deltas = delta_count(dim);

  MachinePair mp;
  mp.env = make_walker_env(grid, caps, n_robots, light_count);

  RobotMachine& rm = mp.robot;
  rm.name = std::string(protocol_name(protocol)) + (oblivious ? "/oblivious" : "");
  rm.epi_count = regions * cells;
  rm.obs_count = regions * cells;
  rm.action_count = deltas * light_count;
  rm.light_count = light_count;
  rm.oblivious = oblivious;

  auto decode_light = [=](LightId l) -> std::uint64_t {
    if (oblivious) return 0;
    if (on_complete) return l == 1 ? full : 0;
    return l;
  };
  rm.light = [=](StateId e) -> std::optional<LightId> {
    if (e >= regions * cells) return std::nullopt;
    if (oblivious) return 0;
    const std::uint64_t known = e / cells;
    if (on_complete) return known == full ? 1 : 0;
    return known;
  };
  rm.observe = [=](const Snapshot& snap) -> std::optional<ObsId> {
    std::uint64_t seen = snap.footprint.bits();
    for (const auto& s : snap.seen) seen |= decode_light(s.light);
    return seen * cells + snap.own_cell;
  };
  rm.step = [=](StateId e, ObsId o) -> std::optional<StateId> {
    if (e >= regions * cells || o >= regions * cells) return std::nullopt;
    const std::uint64_t known = e / cells;
    const std::uint64_t seen = o / cells;
    const std::uint64_t next = oblivious ? seen : (known | seen);
    return next * cells + o % cells;
  };

  const auto order = snake_order(grid);
  std::vector<std::size_t> rank(cells);
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  auto target_of = [=](StateId e) -> CellId {
    const std::uint64_t known = e / cells;
    const CellId cell = static_cast<CellId>(e % cells);
    if (!((known >> cell) & 1u)) return cell;
    if (protocol == Protocol::ExploreSweep) {
      const std::size_t i = rank[cell];
      if (i + 1 >= order.size()) return cell;
      return order[std::min(order.size() - 1, i + static_cast<std::size_t>(stride))];
    }
    const std::uint64_t unknown = full & ~known;
    if (unknown == 0) return cell;
    return nearest_in(grid, cell, unknown);
  };
  rm.control = [=, light = rm.light](StateId e) -> std::optional<ActionId> {
    if (e >= regions * cells) return std::nullopt;
    const CellId cell = static_cast<CellId>(e % cells);
    const CellId target = target_of(e);
    CellId next = cell;
    if (protocol == Protocol::ExploreSweep && stride == 1) {
      next = target;
    } else {
      next = step_toward(grid, cell, target, stride);
    }
    return encode_action(delta_between(grid, cell, next), *light(e), light_count);
  };
  rm.initial = [=](std::size_t, CellId cell) -> StateId {
    if (cell >= cells) throw DimensionError("initial cell outside grid");
    return cell;
  };
  rm.known_region = [=](StateId e) -> std::optional<Region> { return Region(grid, e / cells); };
  rm.own_cell = [=](StateId e) -> std::optional<CellId> {
    return static_cast<CellId>(e % cells);
  };
  rm.epi_name = [=](StateId e) {
    std::ostringstream os;
    os << "K" << region_bits_name(grid, e / cells) << "@c" << e % cells;
    return os.str();
  };
  rm.obs_name = [=](ObsId o) {
    std::ostringstream os;
    os << "S" << region_bits_name(grid, o / cells) << "@c" << o % cells;
    return os.str();
  };
  return mp;
}

MachinePair gather_walker(const Grid& grid, const Capabilities& caps, std::size_t n_robots,
                          const ProtocolOptions& options) {
  const auto& zones = options.rendezvous;
  if (zones.empty()) throw ModelError("GATHER_MIN_REGION needs at least one rendezvous region");
  for (std::size_t i = 0; i < zones.size(); ++i) {
    if (!(zones[i].grid() == grid)) throw DimensionError("rendezvous region on a different grid");
    if (zones[i].is_empty()) throw ModelError("rendezvous region " + std::to_string(i) + " is empty");
    for (std::size_t j = i + 1; j < zones.size(); ++j) {
      if (!region_meet(zones[i], zones[j]).is_empty()) {
        throw ModelError("rendezvous regions " + std::to_string(i) + " and " + std::to_string(j) +
                         " overlap");
      }
    }
  }
  const std::uint64_t cells = grid.cell_count();
  const std::uint64_t m = zones.size();
  const std::uint64_t targets = m + 1;  // m means "no target"
  const bool oblivious = caps.memory == Capabilities::Memory::Oblivious;
  const bool oscillate = options.mutation == ProtocolOptions::Mutation::Oscillate;
  const int stride = options.mutation == ProtocolOptions::Mutation::Jump2 ? 2 : 1;
  const std::uint64_t light_count = oblivious ? 1 : targets;
  const std::uint64_t deltas = delta_count(grid.dim());

  std::vector<std::uint64_t> zone_of(cells, m);
  for (std::uint64_t z = 0; z < m; ++z) {
    for (CellId c : zones[z].cells()) zone_of[c] = z;
  }

  MachinePair mp;
  mp.env = make_walker_env(grid, caps, n_robots, light_count);
  RobotMachine& rm = mp.robot;
  rm.name = std::string("GATHER_MIN_REGION") + (oscillate ? "/oscillate" : "");
  rm.epi_count = targets * cells * cells;
  rm.obs_count = targets * cells;
  rm.action_count = deltas * light_count;
  rm.light_count = light_count;
  rm.oblivious = oblivious;

  // e = (target * cells + init) * cells + cell
  auto cell_of = [=](StateId e) { return static_cast<CellId>(e % cells); };
  auto init_of = [=](StateId e) { return static_cast<CellId>((e / cells) % cells); };
  auto target_of = [=](StateId e) { return e / (cells * cells); };

  rm.light = [=](StateId e) -> std::optional<LightId> {
    if (e >= targets * cells * cells) return std::nullopt;
    return oblivious ? 0 : target_of(e);
  };
  rm.observe = [=](const Snapshot& snap) -> std::optional<ObsId> {
    std::uint64_t best = m;
    if (!oblivious) {
      for (const auto& s : snap.seen) best = std::min<std::uint64_t>(best, s.light);
    }
    return snap.own_cell * targets + best;
  };
  rm.step = [=](StateId e, ObsId o) -> std::optional<StateId> {
    if (e >= targets * cells * cells || o >= targets * cells) return std::nullopt;
    const CellId cell = static_cast<CellId>(o / targets);
    std::uint64_t target = oblivious ? zone_of[cell] : std::min(target_of(e), o % targets);
    if (oscillate && target < m && zone_of[cell] == target) target = (target + 1) % m;
    return (target * cells + init_of(e)) * cells + cell;
  };
  rm.control = [=, light = rm.light](StateId e) -> std::optional<ActionId> {
    if (e >= targets * cells * cells) return std::nullopt;
    const CellId cell = cell_of(e);
    const std::uint64_t target = target_of(e);
    CellId next = cell;
    if (target < m && zone_of[cell] != target) {
      next = step_toward(grid, cell, nearest_in(grid, cell, zones[target].bits()), stride);
    }
    return encode_action(delta_between(grid, cell, next), *light(e), light_count);
  };
  rm.initial = [=](std::size_t, CellId cell) -> StateId {
    if (cell >= cells) throw DimensionError("initial cell outside grid");
    return (zone_of[cell] * cells + cell) * cells + cell;
  };
  rm.own_cell = [=](StateId e) -> std::optional<CellId> { return cell_of(e); };
  rm.epi_name = [=](StateId e) {
    std::ostringstream os;
    os << "c" << cell_of(e) << " i" << init_of(e) << " t";
    if (target_of(e) == m) {
      os << '-';
    } else {
      os << target_of(e);
    }
    return os.str();
  };
  rm.obs_name = [=](ObsId o) {
    std::ostringstream os;
    os << "c" << o / targets << " min";
    if (o % targets == m) {
      os << '-';
    } else {
      os << o % targets;
    }
    return os.str();
  };
  return mp;
}

}  // namespace

MachinePair make_grid_walker(const Grid& grid, const Capabilities& caps, Protocol protocol,
                             std::size_t n_robots, const ProtocolOptions& options) {
  if (grid.cell_count() == 0) throw DimensionError("grid has no cells");
  caps.validate();
  switch (protocol) {
    case Protocol::ExploreSweep:
    case Protocol::FloodExplore:
      return region_walker(grid, caps, protocol, n_robots, options);
    case Protocol::GatherMinRegion:
      return gather_walker(grid, caps, n_robots, options);
    case Protocol::Explicit:
      break;
  }
  throw ModelError("explicit machines are built from tables");
}

MachinePair make_explicit_machine(const Grid& grid, const Capabilities& caps,
                                  std::size_t n_robots, const ExplicitTables& t) {
  const std::size_t ns = t.states.size();
  const std::size_t no = t.observations.size();
  if (ns == 0 || no == 0) throw ModelError("explicit machine needs states and observations");
  if (t.light_count == 0) throw ModelError("explicit machine needs a nonempty light alphabet");
  if (t.initial.size() != n_robots) throw ModelError("explicit machine needs one initial state per robot");
  for (auto s : t.initial) {
    if (s >= ns) throw ModelError("initial state index out of range");
  }
  const int dim = grid.dim();
  std::vector<std::optional<std::size_t>> deltas(ns);
  for (std::size_t e = 0; e < ns && e < t.control.size(); ++e) {
    if (!t.control[e]) continue;
    deltas[e] = delta_from_name(dim, *t.control[e]);
    if (!deltas[e]) throw ModelError("unknown move '" + *t.control[e] + "'");
  }

  MachinePair mp;
  mp.env = make_walker_env(grid, caps, n_robots, t.light_count);
  RobotMachine& rm = mp.robot;
  rm.name = "EXPLICIT";
  rm.epi_count = ns;
  rm.obs_count = no;
  rm.light_count = t.light_count;
  rm.action_count = delta_count(dim) * t.light_count;
  rm.oblivious = t.oblivious;

  const ExplicitTables tables = t;
  const std::uint64_t light_count = t.light_count;
  rm.observe = [tables](const Snapshot& snap) -> std::optional<ObsId> {
    if (snap.symbol) return *snap.symbol;
    if (snap.own_cell >= tables.obs_of_cell.size()) return std::nullopt;
    const auto& o = tables.obs_of_cell[snap.own_cell];
    if (!o) return std::nullopt;
    return *o;
  };
  rm.step = [tables](StateId e, ObsId o) -> std::optional<StateId> {
    if (e >= tables.step.size() || o >= tables.step[e].size()) return std::nullopt;
    const auto& next = tables.step[e][o];
    if (!next) return std::nullopt;
    return *next;
  };
  rm.light = [tables](StateId e) -> std::optional<LightId> {
    if (e >= tables.light.size()) return std::nullopt;
    return tables.light[e];
  };
  rm.control = [deltas, light = rm.light, light_count](StateId e) -> std::optional<ActionId> {
    if (e >= deltas.size() || !deltas[e]) return std::nullopt;
    const auto l = light(e);
    if (!l) return std::nullopt;
    return encode_action(*deltas[e], *l, light_count);
  };
  rm.initial = [tables](std::size_t robot, CellId) -> StateId { return tables.initial.at(robot); };
  rm.epi_name = [tables](StateId e) {
    return e < tables.states.size() ? tables.states[e] : std::to_string(e);
  };
  rm.obs_name = [tables](ObsId o) {
    return o < tables.observations.size() ? tables.observations[o] : std::to_string(o);
  };
  return mp;
}

}  // namespace lumi
