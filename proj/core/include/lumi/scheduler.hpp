#pragma once

// Time paths as discrete activation schedules.
//
// A path has 3*H global steps for a horizon of H cycles. At each step a
// nonempty set of robots fires exactly one phase; each robot cycles
// MOVE -> LOOK -> COMPUTE, so its phase is its local clock modulo 3.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace lumi {

enum class Phase : std::uint8_t { Move = 0, Look = 1, Compute = 2, Wait = 3 };

inline constexpr std::size_t kPhasesPerCycle = 3;

const char* phase_name(Phase p);

inline Phase phase_of_clock(std::uint32_t clock) {
  return static_cast<Phase>(clock % kPhasesPerCycle);
}

enum class SynchronyKind : std::uint8_t { FSync, SSync, KAsync };

struct Synchrony {
  SynchronyKind kind = SynchronyKind::FSync;
  std::uint32_t k = 1;  // only meaningful for KAsync

  static Synchrony fsync() { return {SynchronyKind::FSync, 1}; }
  static Synchrony ssync() { return {SynchronyKind::SSync, 1}; }
  static Synchrony k_async(std::uint32_t k) { return {SynchronyKind::KAsync, k}; }

  std::string to_string() const;
  friend bool operator==(const Synchrony&, const Synchrony&) = default;
};

struct Activation {
  std::size_t robot = 0;
  Phase phase = Phase::Move;
  friend bool operator==(const Activation&, const Activation&) = default;
};

struct TimePath {
  std::size_t n_robots = 0;
  // activations[s] lists the robots firing at global step s, sorted by robot.
  std::vector<std::vector<Activation>> activations;
  // local_clocks[s][r] = phases fired by r before step s; size steps()+1.
  std::vector<std::vector<std::uint32_t>> local_clocks;
  // Forbid a LOOK and a MOVE of distinct robots in one step.
  bool instantaneous_moves = false;

  std::size_t steps() const { return activations.size(); }
  bool active(std::size_t step, std::size_t robot) const;

  /// Builds a path from per-step robot sets; phases and clocks are derived.
  static TimePath from_sets(std::size_t n_robots,
                            const std::vector<std::vector<std::size_t>>& sets,
                            bool instantaneous_moves = false);

  /// Step sets only, used for dedup and family comparisons.
  std::vector<std::vector<std::size_t>> sets() const;

  std::string to_string() const;
};

struct ScheduleSpec {
  std::size_t n_robots = 1;
  std::size_t horizon = 1;  // in LCM cycles
  Synchrony synchrony = Synchrony::fsync();
  // SSYNC: every window of this many rounds activates each robot.
  // k-ASYNC: every window of 3*fairness_bound steps has >= 3 firings per robot.
  std::size_t fairness_bound = 1;
  std::size_t cap = 100000;
  bool instantaneous_moves = false;
};

/// Enumerates the scheduler family; throws CapExceeded past spec.cap.
std::vector<TimePath> gen_schedules(const ScheduleSpec& spec);

struct PathViolation {
  std::string kind;  // initialisation | monotonicity | rectification | nonempty | forbidden-zone | phase
  std::size_t step = 0;
  std::string detail;
};

std::vector<PathViolation> validate_path(const TimePath& path);

/// Full LCM cycles completed by each robot over the whole path.
std::vector<std::uint32_t> completed_cycles(const TimePath& path);

}  // namespace lumi
