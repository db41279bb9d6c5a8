#include "lumi/machine.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "lumi/errors.hpp"

namespace lumi {

namespace {

// Checks every pair when the product is small, otherwise a fixed stride.
constexpr std::uint64_t kFullCheckBudget = std::uint64_t{1} << 22;
constexpr std::uint64_t kSampleBudget = 20000;

std::uint64_t checked_pow(std::uint64_t base, std::size_t exp, std::uint64_t limit) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > limit / base) return limit + 1;
    out *= base;
  }
  return out;
}

std::uint64_t stride_for(std::uint64_t count, std::uint64_t budget) {
  return count <= budget ? 1 : (count + budget - 1) / budget;
}

}  // namespace

void Capabilities::validate() const {
  if (visibility == Visibility::Myopic && !(visibility_radius > 0.0)) {
    throw ModelError("myopic visibility needs a positive radius");
  }
  if (movement == Movement::NonRigid && !(min_distance > 0.0 && min_distance <= 1.0)) {
    throw ModelError("non-rigid min_distance must lie in (0,1]");
  }
  if (sensor_radius < 0.0) throw ModelError("sensor_radius must be >= 0");
  if (synchrony.kind == SynchronyKind::KAsync && synchrony.k == 0) {
    throw ModelError("k-ASYNC needs k >= 1");
  }
}

std::size_t delta_count(int dim) { return 1 + 4 * static_cast<std::size_t>(dim); }

std::vector<int> delta_vector(int dim, std::size_t delta) {
  std::vector<int> v(static_cast<std::size_t>(dim), 0);
  if (delta == 0) return v;
  if (delta >= delta_count(dim)) throw ModelError("delta index out of range");
  const std::size_t axis = (delta - 1) / 4;
  static constexpr int kSteps[4] = {1, -1, 2, -2};
  v[axis] = kSteps[(delta - 1) % 4];
  return v;
}

std::string delta_name(int dim, std::size_t delta) {
  if (delta == 0) return "stay";
  const auto v = delta_vector(dim, delta);
  const std::size_t axis = (delta - 1) / 4;
  std::ostringstream os;
  os << (v[axis] > 0 ? '+' : '-') << std::abs(v[axis]) << "@a" << axis;
  return os.str();
}

std::optional<std::size_t> delta_from_name(int dim, const std::string& name) {
  if (name == "right") return delta_from_name(dim, "+1@a0");
  if (name == "left") return delta_from_name(dim, "-1@a0");
  for (std::size_t d = 0; d < delta_count(dim); ++d) {
    if (delta_name(dim, d) == name) return d;
  }
  return std::nullopt;
}

std::vector<CellId> snake_order(const Grid& grid) {
  const int n = grid.cells_per_axis();
  const int dim = grid.dim();
  std::vector<CellId> out;
  out.reserve(grid.cell_count());
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    std::vector<int> raw(static_cast<std::size_t>(dim));
    std::size_t rest = k;
    for (int a = 0; a < dim; ++a) {
      raw[static_cast<std::size_t>(a)] = static_cast<int>(rest % static_cast<std::size_t>(n));
      rest /= static_cast<std::size_t>(n);
    }
    std::vector<int> c(raw.size());
    for (int a = 0; a < dim; ++a) {
      int higher = 0;
      for (int b = a + 1; b < dim; ++b) higher += raw[static_cast<std::size_t>(b)];
      const int v = raw[static_cast<std::size_t>(a)];
      c[static_cast<std::size_t>(a)] = (higher % 2 == 0) ? v : n - 1 - v;
    }
    out.push_back(grid.index(c));
  }
  return out;
}

CellId step_toward(const Grid& grid, CellId from, CellId to, int stride) {
  auto a = grid.coords(from);
  const auto b = grid.coords(to);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int diff = b[i] - a[i];
    if (diff == 0) continue;
    const int mag = std::min(stride, std::abs(diff));
    a[i] += diff > 0 ? mag : -mag;
    return grid.index(a);
  }
  return from;
}

EnvMachine make_walker_env(const Grid& grid, const Capabilities& caps, std::size_t n_robots,
                           std::uint64_t light_count) {
  caps.validate();
  if (n_robots == 0) throw ModelError("need at least one robot");
  if (light_count == 0) throw ModelError("light alphabet must be nonempty");
  const std::uint64_t cells = grid.cell_count();
  const std::uint64_t pos_states = checked_pow(cells, n_robots, kMaxEnvStates);
  const std::uint64_t light_states = checked_pow(light_count, n_robots, kMaxEnvStates);
  if (pos_states > kMaxEnvStates || light_states > kMaxEnvStates ||
      pos_states * light_states > kMaxEnvStates) {
    throw CapExceeded("environment state space exceeds " + std::to_string(kMaxEnvStates));
  }

  EnvMachine env;
  env.grid = grid;
  env.n_robots = n_robots;
  env.env_count = pos_states * light_states;
  env.adv_count = caps.movement == Capabilities::Movement::NonRigid
                      ? static_cast<AdvId>(1u << n_robots)
                      : 1;

  auto decode = [=](StateId s, std::vector<CellId>& pos, std::vector<LightId>& lights) {
    pos.assign(n_robots, 0);
    lights.assign(n_robots, 0);
    StateId p = s % pos_states;
    StateId l = s / pos_states;
    for (std::size_t r = 0; r < n_robots; ++r) {
      pos[r] = static_cast<CellId>(p % cells);
      p /= cells;
      lights[r] = l % light_count;
      l /= light_count;
    }
  };
  auto encode = [=](std::span<const CellId> pos, std::span<const LightId> lights) {
    if (pos.size() != n_robots || lights.size() != n_robots) {
      throw ModelError("environment state needs one cell and one light per robot");
    }
    StateId p = 0, l = 0;
    for (std::size_t r = n_robots; r-- > 0;) {
      if (pos[r] >= cells) throw DimensionError("robot cell outside grid");
      if (lights[r] >= light_count) throw ModelError("light outside alphabet");
      p = p * cells + pos[r];
      l = l * light_count + lights[r];
    }
    return l * pos_states + p;
  };
  env.make_state = encode;

  const int dim = grid.dim();
  const double width = grid.cell_width();
  const bool non_rigid = caps.movement == Capabilities::Movement::NonRigid;
  // Cells an interrupted move is still guaranteed to cover.
  const int guaranteed =
      non_rigid ? static_cast<int>(std::floor(caps.min_distance / width + kDistanceTolerance)) : 2;

  env.evolve = [=](StateId s, std::span<const std::optional<ActionId>> actions, AdvId adv) {
    if (actions.size() != n_robots) throw ModelError("evolve needs one action slot per robot");
    std::vector<CellId> pos;
    std::vector<LightId> lights;
    decode(s, pos, lights);
    for (std::size_t r = 0; r < n_robots; ++r) {
      if (!actions[r]) continue;
      const ActionId a = *actions[r];
      const std::size_t delta = static_cast<std::size_t>(a / light_count);
      lights[r] = a % light_count;
      auto dv = delta_vector(dim, delta);
      if (non_rigid && ((adv >> r) & 1u)) {
        for (auto& d : dv) d = d > 0 ? std::min(d, guaranteed) : std::max(d, -guaranteed);
      }
      auto c = grid.coords(pos[r]);
      for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = std::clamp(c[i] + dv[i], 0, grid.cells_per_axis() - 1);
      }
      pos[r] = grid.index(c);
    }
    return encode(pos, lights);
  };

  const bool myopic = caps.visibility == Capabilities::Visibility::Myopic;
  const double vis_radius = caps.visibility_radius;
  const bool lights_visible = caps.communication == Capabilities::Communication::Luminous;
  std::vector<Region> foot;
  std::vector<std::vector<double>> dist(cells, std::vector<double>(cells));
  for (CellId c = 0; c < cells; ++c) {
    foot.push_back(ball_around_cell(grid, c, caps.sensor_radius));
    for (CellId d = 0; d < cells; ++d) dist[c][d] = grid.distance(c, d);
  }

  env.footprint = [=](StateId s, std::size_t r) {
    std::vector<CellId> pos;
    std::vector<LightId> lights;
    decode(s, pos, lights);
    return foot[pos.at(r)];
  };
  env.position = [=](StateId s, std::size_t r) {
    std::vector<CellId> pos;
    std::vector<LightId> lights;
    decode(s, pos, lights);
    return pos.at(r);
  };
  env.light_of = [=](StateId s, std::size_t r) {
    std::vector<CellId> pos;
    std::vector<LightId> lights;
    decode(s, pos, lights);
    return lights.at(r);
  };
  env.emit_obs = [=](StateId s, AdvId) {
    std::vector<CellId> pos;
    std::vector<LightId> lights;
    decode(s, pos, lights);
    std::vector<Snapshot> out(n_robots);
    for (std::size_t r = 0; r < n_robots; ++r) {
      Snapshot& snap = out[r];
      snap.robot = r;
      snap.own_cell = pos[r];
      snap.footprint = foot[pos[r]];
      for (std::size_t q = 0; q < n_robots; ++q) {
        if (q != r && myopic && dist[pos[r]][pos[q]] > vis_radius + kDistanceTolerance) {
          continue;
        }
        const LightId shown = (q == r || lights_visible) ? lights[q] : 0;
        snap.seen.push_back({q, pos[q], shown});
      }
    }
    return out;
  };
  env.env_name = [=](StateId s) {
    std::vector<CellId> pos;
    std::vector<LightId> lights;
    decode(s, pos, lights);
    std::ostringstream os;
    os << "p=[";
    for (std::size_t r = 0; r < n_robots; ++r) os << (r ? "," : "") << pos[r];
    os << "] l=[";
    for (std::size_t r = 0; r < n_robots; ++r) os << (r ? "," : "") << lights[r];
    os << ']';
    return os.str();
  };
  return env;
}

std::vector<MachineViolation> validate_machine(const RobotMachine& robot, const EnvMachine& env) {
  std::vector<MachineViolation> out;
  auto add = [&](std::string kind, std::string detail) {
    out.push_back({std::move(kind), std::move(detail)});
  };
  auto ename = [&](StateId e) { return robot.epi_name ? robot.epi_name(e) : std::to_string(e); };
  auto oname = [&](ObsId o) { return robot.obs_name ? robot.obs_name(o) : std::to_string(o); };

  if (robot.epi_count == 0 || robot.obs_count == 0 || robot.action_count == 0 ||
      robot.light_count == 0) {
    add("bound", "robot state sets must be nonempty");
    return out;
  }
  if (env.env_count == 0) {
    add("bound", "environment state set must be nonempty");
    return out;
  }
  if (env.env_count > kMaxEnvStates) {
    add("bound", "environment has " + std::to_string(env.env_count) + " states, above " +
                     std::to_string(kMaxEnvStates));
  }
  if (!robot.observe || !robot.step || !robot.control || !robot.light) {
    add("totality", "robot machine is missing a map");
    return out;
  }
  if (!env.evolve || !env.emit_obs) {
    add("totality", "environment machine is missing a map");
    return out;
  }

  const std::uint64_t pairs = robot.epi_count * robot.obs_count;
  const std::uint64_t pstride = stride_for(pairs, kFullCheckBudget);
  for (std::uint64_t k = 0; k < pairs; k += pstride) {
    const StateId e = k / robot.obs_count;
    const ObsId o = k % robot.obs_count;
    const auto next = robot.step(e, o);
    if (!next) {
      add("totality", "step(" + ename(e) + ", " + oname(o) + ") is undefined");
    } else if (*next >= robot.epi_count) {
      add("totality", "step(" + ename(e) + ", " + oname(o) + ") leaves the state set");
    }
  }

  std::set<LightId> light_values;
  const std::uint64_t estride = stride_for(robot.epi_count, kFullCheckBudget);
  for (StateId e = 0; e < robot.epi_count; e += estride) {
    const auto a = robot.control(e);
    if (!a) {
      add("totality", "control(" + ename(e) + ") is undefined");
    } else if (*a >= robot.action_count) {
      add("totality", "control(" + ename(e) + ") leaves the action set");
    }
    const auto l = robot.light(e);
    if (!l) {
      add("light", "light(" + ename(e) + ") is undefined");
    } else if (*l >= robot.light_count) {
      add("light", "light(" + ename(e) + ") outside the light alphabet");
    } else {
      light_values.insert(*l);
    }
  }
  if (robot.oblivious && light_values.size() > 1) {
    add("oblivious", "oblivious robot exposes " + std::to_string(light_values.size()) +
                         " distinct lights");
  }

  const std::uint64_t sstride = stride_for(env.env_count, kSampleBudget);
  for (StateId s = 0; s < env.env_count; s += sstride) {
    for (AdvId adv = 0; adv < env.adv_count; ++adv) {
      const auto snaps = env.emit_obs(s, adv);
      if (snaps.size() != env.n_robots) {
        add("observe", "emit_obs does not return one snapshot per robot");
        return out;
      }
      for (const auto& snap : snaps) {
        const auto o = robot.observe(snap);
        if (!o || *o >= robot.obs_count) {
          add("observe", "observe undefined on env state " +
                             (env.env_name ? env.env_name(s) : std::to_string(s)) + " for r" +
                             std::to_string(snap.robot + 1));
          return out;
        }
      }
    }
    std::vector<std::optional<ActionId>> acts(env.n_robots);
    for (std::size_t r = 0; r < env.n_robots; ++r) {
      for (ActionId a = 0; a < robot.action_count; ++a) {
        std::fill(acts.begin(), acts.end(), std::nullopt);
        acts[r] = a;
        for (AdvId adv = 0; adv < env.adv_count; ++adv) {
          const StateId next = env.evolve(s, acts, adv);
          if (next >= env.env_count) {
            add("evolve", "evolve leaves the state set");
            return out;
          }
        }
      }
    }
  }
  return out;
}

std::pair<LocalState, StateId> lcm_phase(const RobotMachine& robot, const EnvMachine& env,
                                         std::size_t robot_index, Phase phase,
                                         const LocalState& local, StateId env_state, AdvId adv) {
  if (robot_index >= env.n_robots) throw ModelError("robot index out of range");
  LocalState next = local;
  switch (phase) {
    case Phase::Wait:
      return {local, env_state};
    case Phase::Look: {
      const auto snaps = env.emit_obs(env_state, adv);
      const auto o = robot.observe(snaps.at(robot_index));
      if (!o) throw ModelError("observe undefined for r" + std::to_string(robot_index + 1));
      next.o = *o;
      return {next, env_state};
    }
    case Phase::Compute: {
      if (!local.o) return {local, env_state};
      const auto e = robot.step(local.e, *local.o);
      if (!e) {
        throw ModelError("step undefined on (" + std::to_string(local.e) + ", " +
                         std::to_string(*local.o) + ")");
      }
      next.e = *e;
      return {next, env_state};
    }
    case Phase::Move: {
      const auto a = robot.control(local.e);
      if (!a) throw ModelError("control undefined on " + std::to_string(local.e));
      std::vector<std::optional<ActionId>> acts(env.n_robots);
      acts[robot_index] = *a;
      return {local, env.evolve(env_state, acts, adv)};
    }
  }
  return {local, env_state};
}

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::ExploreSweep: return "EXPLORE_SWEEP";
    case Protocol::FloodExplore: return "FLOOD_EXPLORE";
    case Protocol::GatherMinRegion: return "GATHER_MIN_REGION";
    case Protocol::Explicit: return "EXPLICIT";
  }
  return "?";
}

std::optional<Protocol> protocol_from_name(const std::string& name) {
  for (auto p : {Protocol::ExploreSweep, Protocol::FloodExplore, Protocol::GatherMinRegion,
                 Protocol::Explicit}) {
    if (name == protocol_name(p)) return p;
  }
  return std::nullopt;
}

}  // namespace lumi
