#include "lumi/scheduler.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "lumi/errors.hpp"

namespace lumi {

const char* phase_name(Phase p) {
  switch (p) {
    case Phase::Move: return "M";
    case Phase::Look: return "L";
    case Phase::Compute: return "C";
    case Phase::Wait: return "W";
  }
  return "?";
}

std::string Synchrony::to_string() const {
  switch (kind) {
    case SynchronyKind::FSync: return "FSYNC";
    case SynchronyKind::SSync: return "SSYNC";
    case SynchronyKind::KAsync: return std::to_string(k) + "-ASYNC";
  }
  return "?";
}

bool TimePath::active(std::size_t step, std::size_t robot) const {
  const auto& acts = activations.at(step);
  return std::any_of(acts.begin(), acts.end(),
                     [robot](const Activation& a) { return a.robot == robot; });
}

TimePath TimePath::from_sets(std::size_t n_robots,
                             const std::vector<std::vector<std::size_t>>& sets,
                             bool instantaneous_moves) {
  TimePath p;
  p.n_robots = n_robots;
  p.instantaneous_moves = instantaneous_moves;
  std::vector<std::uint32_t> clock(n_robots, 0);
  p.local_clocks.push_back(clock);
  for (const auto& set : sets) {
    std::vector<std::size_t> sorted = set;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<Activation> acts;
    for (std::size_t r : sorted) {
      if (r >= n_robots) throw ModelError("activation of unknown robot " + std::to_string(r));
      acts.push_back({r, phase_of_clock(clock[r])});
      ++clock[r];
    }
    p.activations.push_back(std::move(acts));
    p.local_clocks.push_back(clock);
  }
  return p;
}

std::vector<std::vector<std::size_t>> TimePath::sets() const {
  std::vector<std::vector<std::size_t>> out;
  out.reserve(activations.size());
  for (const auto& acts : activations) {
    std::vector<std::size_t> s;
    for (const auto& a : acts) s.push_back(a.robot);
    out.push_back(std::move(s));
  }
  return out;
}

std::string TimePath::to_string() const {
  std::ostringstream os;
  for (std::size_t s = 0; s < activations.size(); ++s) {
    if (s) os << ' ';
    os << '[';
    for (std::size_t i = 0; i < activations[s].size(); ++i) {
      if (i) os << ',';
      os << 'r' << activations[s][i].robot + 1 << ':' << phase_name(activations[s][i].phase);
    }
    os << ']';
  }
  return os.str();
}

namespace {

std::vector<std::size_t> mask_to_set(std::uint32_t mask) {
  std::vector<std::size_t> s;
  for (std::size_t r = 0; r < 32; ++r) {
    if (mask & (1u << r)) s.push_back(r);
  }
  return s;
}

void check_spec(const ScheduleSpec& spec) {
  if (spec.n_robots == 0 || spec.n_robots > 16) throw ModelError("robot count must be in [1,16]");
  if (spec.horizon == 0) throw ModelError("horizon must be >= 1");
  if (spec.fairness_bound == 0) throw ModelError("fairness_bound must be >= 1");
  if (spec.synchrony.kind == SynchronyKind::KAsync && spec.synchrony.k == 0) {
    throw ModelError("k-ASYNC needs k >= 1");
  }
}

std::vector<TimePath> gen_fsync(const ScheduleSpec& spec) {
  std::vector<std::size_t> all(spec.n_robots);
  for (std::size_t r = 0; r < spec.n_robots; ++r) all[r] = r;
  std::vector<std::vector<std::size_t>> sets(spec.horizon * kPhasesPerCycle, all);
  return {TimePath::from_sets(spec.n_robots, sets, spec.instantaneous_moves)};
}

std::vector<TimePath> gen_ssync(const ScheduleSpec& spec) {
  const std::uint32_t full = (1u << spec.n_robots) - 1;
  std::vector<TimePath> out;
  std::vector<std::uint32_t> rounds;

  // A complete window of `fairness_bound` rounds must cover every robot.
  auto window_ok = [&]() {
    const std::size_t b = spec.fairness_bound;
    if (rounds.size() < b) return true;
    std::uint32_t seen = 0;
    for (std::size_t i = rounds.size() - b; i < rounds.size(); ++i) seen |= rounds[i];
    return seen == full;
  };

  std::function<void()> dfs = [&]() {
    if (rounds.size() == spec.horizon) {
      if (out.size() >= spec.cap) {
        throw CapExceeded("scheduler family exceeds cap " + std::to_string(spec.cap));
      }
      std::vector<std::vector<std::size_t>> sets;
      for (auto m : rounds) {
        auto s = mask_to_set(m);
        for (std::size_t i = 0; i < kPhasesPerCycle; ++i) sets.push_back(s);
      }
      out.push_back(TimePath::from_sets(spec.n_robots, sets, spec.instantaneous_moves));
      return;
    }
    for (std::uint32_t m = 1; m <= full; ++m) {
      rounds.push_back(m);
      if (window_ok()) dfs();
      rounds.pop_back();
    }
  };
  dfs();
  return out;
}

std::vector<TimePath> gen_kasync(const ScheduleSpec& spec) {
  const std::size_t n = spec.n_robots;
  const std::uint32_t full = (1u << n) - 1;
  const std::size_t total = spec.horizon * kPhasesPerCycle;
  const std::size_t window = spec.fairness_bound * kPhasesPerCycle;
  std::vector<TimePath> out;
  std::vector<std::uint32_t> steps;
  std::vector<std::uint32_t> clock(n, 0);

  auto cycles_ok = [&]() {
    auto [lo, hi] = std::minmax_element(clock.begin(), clock.end());
    return (*hi / kPhasesPerCycle) - (*lo / kPhasesPerCycle) <= spec.synchrony.k;
  };
  auto window_ok = [&]() {
    if (steps.size() < window) return true;
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t fired = 0;
      for (std::size_t i = steps.size() - window; i < steps.size(); ++i) {
        if (steps[i] & (1u << r)) ++fired;
      }
      if (fired < kPhasesPerCycle) return false;
    }
    return true;
  };
  auto zone_ok = [&](std::uint32_t mask) {
    if (!spec.instantaneous_moves) return true;
    bool move = false, look = false;
    for (std::size_t r = 0; r < n; ++r) {
      if (!(mask & (1u << r))) continue;
      const Phase p = phase_of_clock(clock[r]);
      move |= p == Phase::Move;
      look |= p == Phase::Look;
    }
    return !(move && look);
  };

  std::function<void()> dfs = [&]() {
    if (steps.size() == total) {
      if (out.size() >= spec.cap) {
        throw CapExceeded("scheduler family exceeds cap " + std::to_string(spec.cap));
      }
      std::vector<std::vector<std::size_t>> sets;
      for (auto m : steps) sets.push_back(mask_to_set(m));
      out.push_back(TimePath::from_sets(n, sets, spec.instantaneous_moves));
      return;
    }
    for (std::uint32_t m = 1; m <= full; ++m) {
      if (!zone_ok(m)) continue;
      for (std::size_t r = 0; r < n; ++r) clock[r] += (m >> r) & 1u;
      steps.push_back(m);
      if (cycles_ok() && window_ok()) dfs();
      steps.pop_back();
      for (std::size_t r = 0; r < n; ++r) clock[r] -= (m >> r) & 1u;
    }
  };
  dfs();
  return out;
}

}  // namespace

std::vector<TimePath> gen_schedules(const ScheduleSpec& spec) {
  check_spec(spec);
  if (spec.n_robots == 1) {
    // A singleton system has exactly one schedule under every synchrony.
    return gen_fsync(spec);
  }
  switch (spec.synchrony.kind) {
    case SynchronyKind::FSync: return gen_fsync(spec);
    case SynchronyKind::SSync: return gen_ssync(spec);
    case SynchronyKind::KAsync: return gen_kasync(spec);
  }
  return {};
}

std::vector<PathViolation> validate_path(const TimePath& path) {
  std::vector<PathViolation> out;
  const std::size_t n = path.n_robots;
  if (path.local_clocks.size() != path.steps() + 1) {
    out.push_back({"rectification", 0, "clock table must have steps+1 rows"});
    return out;
  }
  for (const auto& row : path.local_clocks) {
    if (row.size() != n) {
      out.push_back({"rectification", 0, "clock row width differs from robot count"});
      return out;
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (path.local_clocks[0][r] != 0) {
      out.push_back({"initialisation", 0, "robot r" + std::to_string(r + 1) + " clock starts at " +
                                              std::to_string(path.local_clocks[0][r])});
    }
  }
  for (std::size_t s = 0; s < path.steps(); ++s) {
    const auto& before = path.local_clocks[s];
    const auto& after = path.local_clocks[s + 1];
    const auto& acts = path.activations[s];
    if (acts.empty()) out.push_back({"nonempty", s, "no robot activated"});
    std::uint32_t max_adv = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (after[r] < before[r]) {
        out.push_back({"monotonicity", s, "robot r" + std::to_string(r + 1) + " clock decreases"});
        continue;
      }
      const std::uint32_t adv = after[r] - before[r];
      max_adv = std::max(max_adv, adv);
      const bool is_active = path.active(s, r);
      if (adv != (is_active ? 1u : 0u)) {
        out.push_back({"rectification", s,
                       "robot r" + std::to_string(r + 1) + " advances " + std::to_string(adv) +
                           (is_active ? " while active" : " while frozen")});
      }
    }
    if (!acts.empty() && max_adv != 1) {
      out.push_back({"rectification", s, "global step does not equal the fastest local advance"});
    }
    bool move = false, look = false;
    for (const auto& a : acts) {
      if (a.robot >= n) {
        out.push_back({"phase", s, "unknown robot"});
        continue;
      }
      if (a.phase != phase_of_clock(before[a.robot])) {
        out.push_back({"phase", s, "robot r" + std::to_string(a.robot + 1) + " fires out of order"});
      }
      move |= a.phase == Phase::Move;
      look |= a.phase == Phase::Look;
    }
    if (path.instantaneous_moves && move && look) {
      out.push_back({"forbidden-zone", s, "LOOK and MOVE coincide"});
    }
  }
  return out;
}

std::vector<std::uint32_t> completed_cycles(const TimePath& path) {
  std::vector<std::uint32_t> out(path.n_robots, 0);
  if (path.local_clocks.empty()) return out;
  for (std::size_t r = 0; r < path.n_robots; ++r) {
    out[r] = path.local_clocks.back()[r] / static_cast<std::uint32_t>(kPhasesPerCycle);
  }
  return out;
}

}  // namespace lumi
