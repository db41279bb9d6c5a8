#include "lumi/runs.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "lumi/errors.hpp"

namespace lumi {

namespace {

GlobalConfig initial_config(const RobotMachine& robot, const EnvMachine& env,
                            std::span<const CellId> cells) {
  if (cells.size() != env.n_robots) {
    throw ModelError("initial placement needs one cell per robot");
  }
  GlobalConfig cfg;
  std::vector<LightId> lights;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    const StateId e = robot.initial(r, cells[r]);
    if (e >= robot.epi_count) throw ModelError("initial state outside the state set");
    const auto l = robot.light(e);
    if (!l) throw ModelError("light undefined on an initial state");
    cfg.robots.push_back({e, std::nullopt});
    lights.push_back(*l);
  }
  cfg.env = env.make_state(cells, lights);
  cfg.explored = Region::empty(env.grid);
  cfg.contributed.assign(cells.size(), Region::empty(env.grid));
  cfg.pending.assign(cells.size(), std::nullopt);
  return cfg;
}

std::vector<std::optional<ActionId>> move_actions(const RobotMachine& robot,
                                                  const GlobalConfig& cfg,
                                                  const std::vector<Activation>& acts) {
  std::vector<std::optional<ActionId>> out(cfg.robots.size());
  for (const auto& a : acts) {
    if (a.phase != Phase::Move) continue;
    const auto u = robot.control(cfg.robots[a.robot].e);
    if (!u) throw ModelError("control undefined for r" + std::to_string(a.robot + 1));
    out[a.robot] = *u;
  }
  return out;
}

// Applies one global step: MOVEs commit, then LOOKs, then COMPUTEs.
GlobalConfig apply_step(const RobotMachine& robot, const EnvMachine& env, const GlobalConfig& cfg,
                        const std::vector<Activation>& acts,
                        const std::vector<std::optional<ActionId>>& moves, AdvId adv,
                        bool pre_move_look, std::vector<std::optional<Region>>& looks) {
  GlobalConfig next = cfg;
  next.time = cfg.time + 1;
  const bool any_move = std::any_of(moves.begin(), moves.end(), [](auto& m) { return m.has_value(); });
  if (any_move) next.env = env.evolve(cfg.env, moves, adv);

  looks.assign(cfg.robots.size(), std::nullopt);
  const StateId seen_env = pre_move_look ? cfg.env : next.env;
  std::vector<Snapshot> snaps;
  for (const auto& a : acts) {
    if (a.phase != Phase::Look) continue;
    if (snaps.empty()) snaps = env.emit_obs(seen_env, adv);
    const auto o = robot.observe(snaps.at(a.robot));
    if (!o) throw ModelError("observe undefined for r" + std::to_string(a.robot + 1));
    next.robots[a.robot].o = *o;
    const Region fp = env.footprint(seen_env, a.robot);
    looks[a.robot] = fp;
    next.pending[a.robot] = fp;
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
  return next;
}

void enumerate_one(const RobotMachine& robot, const EnvMachine& env,
                   std::span<const CellId> cells, const TimePath& path, bool pre_move_look,
                   std::size_t cap, std::vector<SystemRun>& out) {
  SystemRun run;
  run.init_cells.assign(cells.begin(), cells.end());
  run.path = path;
  run.configs.push_back(initial_config(robot, env, cells));

  std::function<void(std::size_t)> dfs = [&](std::size_t s) {
    if (s == path.steps()) {
      if (out.size() >= cap) throw CapExceeded("run family exceeds cap " + std::to_string(cap));
      SystemRun done = run;
      done.lasso = find_lasso(done);
      out.push_back(std::move(done));
      return;
    }
    const GlobalConfig& cfg = run.configs.back();
    const auto& acts = path.activations[s];
    const auto moves = move_actions(robot, cfg, acts);
    const bool any_move = std::any_of(moves.begin(), moves.end(), [](auto& m) { return m.has_value(); });

    // Adversary choices that lead to the same environment are merged.
    std::vector<AdvId> choices{0};
    if (any_move && env.adv_count > 1) {
      std::vector<StateId> reached{env.evolve(cfg.env, moves, 0)};
      for (AdvId adv = 1; adv < env.adv_count; ++adv) {
        const StateId nx = env.evolve(cfg.env, moves, adv);
        if (std::find(reached.begin(), reached.end(), nx) == reached.end()) {
          reached.push_back(nx);
          choices.push_back(adv);
        }
      }
    }
    for (AdvId adv : choices) {
      std::vector<std::optional<Region>> looks;
      GlobalConfig next = apply_step(robot, env, run.configs.back(), acts, moves, adv,
                                     pre_move_look, looks);
      run.configs.push_back(std::move(next));
      run.looks.push_back(std::move(looks));
      run.adversary.push_back(adv);
      dfs(s + 1);
      run.configs.pop_back();
      run.looks.pop_back();
      run.adversary.pop_back();
    }
  };
  dfs(0);
}

}  // namespace

SystemRun simulate_run(const RobotMachine& robot, const EnvMachine& env,
                       std::span<const CellId> init_cells, const TimePath& path,
                       std::span<const AdvId> adversary, bool pre_move_look) {
  if (path.n_robots != env.n_robots) throw ModelError("path and machine robot counts differ");
  SystemRun run;
  run.init_cells.assign(init_cells.begin(), init_cells.end());
  run.path = path;
  run.configs.push_back(initial_config(robot, env, init_cells));
  for (std::size_t s = 0; s < path.steps(); ++s) {
    const AdvId adv = s < adversary.size() ? adversary[s] : 0;
    if (adv >= env.adv_count) throw ModelError("adversary choice out of range");
    const auto& acts = path.activations[s];
    const auto moves = move_actions(robot, run.configs.back(), acts);
    std::vector<std::optional<Region>> looks;
    run.configs.push_back(
        apply_step(robot, env, run.configs.back(), acts, moves, adv, pre_move_look, looks));
    run.looks.push_back(std::move(looks));
    run.adversary.push_back(adv);
  }
  run.lasso = find_lasso(run);
  return run;
}

std::vector<SystemRun> enumerate_runs(const RobotMachine& robot, const EnvMachine& env,
                                      const std::vector<std::vector<CellId>>& inits,
                                      const std::vector<TimePath>& schedules,
                                      const RunOptions& options) {
  for (const auto& p : schedules) {
    if (p.n_robots != env.n_robots) throw ModelError("path and machine robot counts differ");
  }
  const std::size_t items = inits.size() * schedules.size();
  std::vector<std::vector<SystemRun>> parts(items);
  std::vector<std::exception_ptr> errors(items);

  auto work = [&](std::size_t i) {
    try {
      enumerate_one(robot, env, inits[i / schedules.size()], schedules[i % schedules.size()],
                    options.pre_move_look, options.cap, parts[i]);
      for (auto& r : parts[i]) {
        r.init_index = i / schedules.size();
        r.schedule_index = i % schedules.size();
      }
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, items));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < items; ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < items; i += jobs) work(i);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<SystemRun> out;
  for (std::size_t i = 0; i < items; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    for (auto& r : parts[i]) {
      if (out.size() >= options.cap) {
        throw CapExceeded("run family exceeds cap " + std::to_string(options.cap));
      }
      r.id = out.size();
      out.push_back(std::move(r));
    }
  }
  return out;
}

bool same_lasso_state(const GlobalConfig& a, const GlobalConfig& b) {
  return a.env == b.env && a.robots == b.robots && a.explored == b.explored &&
         a.contributed == b.contributed && a.pending == b.pending;
}

std::optional<Lasso> find_lasso(const SystemRun& run) {
  const std::size_t T = run.horizon();
  const auto& path = run.path;
  if (T == 0 || path.local_clocks.size() != T + 1) return std::nullopt;
  const std::size_t n = path.n_robots;
  for (std::size_t t1 = 0; t1 < T; ++t1) {
    if (!same_lasso_state(run.configs[t1], run.configs[T])) continue;
    bool ok = true;
    for (std::size_t r = 0; r < n && ok; ++r) {
      const auto c0 = path.local_clocks[t1][r];
      const auto c1 = path.local_clocks[T][r];
      ok = c1 > c0 && (c1 - c0) % kPhasesPerCycle == 0;
    }
    if (ok) return Lasso{t1, T - t1};
  }
  return std::nullopt;
}

InterpretedSystem::InterpretedSystem(std::vector<SystemRun> runs, std::size_t n_robots)
    : runs_(std::move(runs)), n_robots_(n_robots) {
  if (runs_.empty()) throw ModelError("interpreted system needs at least one run");
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    if (runs_[i].configs.empty()) throw ModelError("run without configurations");
    offset_.push_back(run_of_.size());
    for (std::size_t t = 0; t < runs_[i].configs.size(); ++t) run_of_.push_back(i);
  }
  classes_.resize(n_robots_);
  class_counts_.resize(n_robots_);
  for (std::size_t r = 0; r < n_robots_; ++r) {
    std::unordered_map<StateId, std::uint32_t> ids;
    auto& cls = classes_[r];
    cls.resize(run_of_.size());
    for (std::size_t p = 0; p < run_of_.size(); ++p) {
      const StateId e = config(p).robots.at(r).e;
      auto [it, fresh] = ids.emplace(e, static_cast<std::uint32_t>(ids.size()));
      cls[p] = it->second;
    }
    class_counts_[r] = ids.size();
  }
}

const GlobalConfig& InterpretedSystem::config(std::size_t point) const {
  if (point >= run_of_.size()) throw ModelError("point outside the system");
  const std::size_t run = run_of_[point];
  return runs_[run].configs[point - offset_[run]];
}

const std::vector<std::uint32_t>& InterpretedSystem::classes(std::size_t robot) const {
  if (robot >= n_robots_) throw ModelError("robot index out of range");
  return classes_[robot];
}

std::size_t InterpretedSystem::class_count(std::size_t robot) const {
  if (robot >= n_robots_) throw ModelError("robot index out of range");
  return class_counts_[robot];
}

std::shared_ptr<const std::vector<std::uint32_t>> InterpretedSystem::distributed_classes(
    std::span<const std::size_t> group) const {
  std::vector<std::size_t> key(group.begin(), group.end());
  std::sort(key.begin(), key.end());
  key.erase(std::unique(key.begin(), key.end()), key.end());
  if (key.empty()) throw ModelError("distributed knowledge needs a nonempty group");
  for (auto r : key) {
    if (r >= n_robots_) throw ModelError("robot index out of range");
  }
  {
    std::lock_guard lock(mu_);
    auto it = dist_cache_.find(key);
    if (it != dist_cache_.end()) return it->second;
  }
  auto ids = std::make_shared<std::vector<std::uint32_t>>(classes_[key[0]]);
  for (std::size_t i = 1; i < key.size(); ++i) {
    const auto& other = classes_[key[i]];
    std::unordered_map<std::uint64_t, std::uint32_t> joint;
    for (std::size_t p = 0; p < ids->size(); ++p) {
      const std::uint64_t k = (std::uint64_t{(*ids)[p]} << 32) | other[p];
      auto [it, fresh] = joint.emplace(k, static_cast<std::uint32_t>(joint.size()));
      (*ids)[p] = it->second;
    }
  }
  std::lock_guard lock(mu_);
  auto [it, fresh] = dist_cache_.emplace(key, std::move(ids));
  return it->second;
}

void InterpretedSystem::register_provider(AtomKind kind, AtomProvider provider) {
  std::lock_guard lock(mu_);
  providers_[kind] = std::move(provider);
}

bool InterpretedSystem::has_provider(AtomKind kind) const {
  std::lock_guard lock(mu_);
  return providers_.count(kind) > 0;
}

void InterpretedSystem::set_truth(const Atom& atom, Truth truth) {
  if (truth.size() != point_count()) throw ModelError("valuation size differs from point count");
  std::lock_guard lock(mu_);
  cache_[atom.key()] = std::move(truth);
}

const Truth& InterpretedSystem::truth(const Atom& atom) const {
  const std::string key = atom.key();
  AtomProvider provider;
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto pit = providers_.find(atom.kind);
    if (pit == providers_.end()) {
      throw InputError(std::string("no valuation installed for atom kind ") +
                       atom_kind_name(atom.kind) + " (" + atom.to_string() + ")");
    }
    provider = pit->second;
  }
  Truth t = provider(*this, atom);
  if (t.size() != point_count()) throw ModelError("provider returned a wrong-sized valuation");
  std::lock_guard lock(mu_);
  auto [it, fresh] = cache_.emplace(key, std::move(t));
  return it->second;
}

void InterpretedSystem::downgrade_nonperiodic(const Truth& truth) {
  if (truth.size() != point_count()) throw ModelError("valuation size differs from point count");
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    auto& run = runs_[i];
    if (!run.lasso) continue;
    if (truth[offset_[i] + run.lasso->start] != truth[offset_[i] + run.horizon()]) {
      run.lasso.reset();
    }
  }
}

std::vector<std::vector<std::size_t>> class_partition(std::span<const std::uint32_t> ids) {
  std::unordered_map<std::uint32_t, std::size_t> slot;
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t p = 0; p < ids.size(); ++p) {
    auto [it, fresh] = slot.emplace(ids[p], out.size());
    if (fresh) out.emplace_back();
    out[it->second].push_back(p);
  }
  return out;
}

std::vector<std::vector<std::size_t>> distributed_relation(const InterpretedSystem& sys,
                                                           std::span<const std::size_t> group) {
  const auto ids = sys.distributed_classes(group);
  return class_partition(*ids);
}

std::string format_trace(const SystemRun& run, const RobotMachine& robot, const EnvMachine& env) {
  std::ostringstream os;
  os << "# run " << run.id << " init=[";
  for (std::size_t r = 0; r < run.init_cells.size(); ++r) os << (r ? "," : "") << run.init_cells[r];
  os << "] schedule=" << run.schedule_index << " lasso=";
  if (run.lasso) {
    os << run.lasso->start << '+' << run.lasso->length;
  } else {
    os << "open";
  }
  os << " path=" << run.path.to_string() << '\n';
  for (std::size_t t = 0; t < run.configs.size(); ++t) {
    const auto& cfg = run.configs[t];
    os << run.id << ' ' << t << " env=" << (env.env_name ? env.env_name(cfg.env) : std::to_string(cfg.env))
       << " explored=" << cfg.explored.to_string();
    for (std::size_t r = 0; r < cfg.robots.size(); ++r) {
      const auto& lr = cfg.robots[r];
      os << " | r" << r + 1 << " e=" << (robot.epi_name ? robot.epi_name(lr.e) : std::to_string(lr.e))
         << " o=";
      if (lr.o) {
        os << (robot.obs_name ? robot.obs_name(*lr.o) : std::to_string(*lr.o));
      } else {
        os << '-';
      }
      const auto light = robot.light(lr.e);
      os << " light=" << (light ? std::to_string(*light) : std::string("-"));
      if (env.position) os << " pos=" << env.position(cfg.env, r);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace lumi
