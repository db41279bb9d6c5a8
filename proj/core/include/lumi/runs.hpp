#pragma once

// Run enumeration, lasso detection and the interpreted system: points,
// per-robot indistinguishability and the atom valuation.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lumi/atom.hpp"
#include "lumi/machine.hpp"
#include "lumi/scheduler.hpp"

namespace lumi {

struct GlobalConfig {
  std::vector<LocalState> robots;
  StateId env = 0;
  std::size_t time = 0;
  Region explored;                  // union of all computed LOOK footprints
  std::vector<Region> contributed;  // per robot share of `explored`
  // Footprint of a robot's last LOOK until its COMPUTE integrates it.
  std::vector<std::optional<Region>> pending;
};

struct Lasso {
  std::size_t start = 0;   // configs[start] == configs[start + length]
  std::size_t length = 0;  // in global steps
};

struct SystemRun {
  std::size_t id = 0;
  std::size_t init_index = 0;
  std::size_t schedule_index = 0;
  std::vector<CellId> init_cells;
  TimePath path;
  std::vector<AdvId> adversary;      // one choice per step
  std::vector<GlobalConfig> configs;  // steps + 1 entries
  // looks[s][r] is the footprint of r's LOOK at step s, if r looked.
  std::vector<std::vector<std::optional<Region>>> looks;
  std::optional<Lasso> lasso;

  std::size_t horizon() const { return configs.size() - 1; }
  bool closed() const { return lasso.has_value(); }
};

struct RunOptions {
  std::size_t cap = 100000;
  std::size_t jobs = 1;
  bool pre_move_look = false;
};

/// Simulates one run for a fixed initial placement, path and adversary
/// sequence. `adversary` may be empty (all zeros).
SystemRun simulate_run(const RobotMachine& robot, const EnvMachine& env,
                       std::span<const CellId> init_cells, const TimePath& path,
                       std::span<const AdvId> adversary = {}, bool pre_move_look = false);

/// One run per (initial placement, schedule, distinct adversary sequence),
/// ordered by placement, then schedule, then adversary choices.
std::vector<SystemRun> enumerate_runs(const RobotMachine& robot, const EnvMachine& env,
                                      const std::vector<std::vector<CellId>>& inits,
                                      const std::vector<TimePath>& schedules,
                                      const RunOptions& options = {});

/// Earliest loop whose endpoints agree on the whole configuration and
/// phase, and inside which every robot fires.
std::optional<Lasso> find_lasso(const SystemRun& run);

/// Equality used for lasso detection.
bool same_lasso_state(const GlobalConfig& a, const GlobalConfig& b);

using Truth = std::vector<std::uint8_t>;

class InterpretedSystem;
using AtomProvider = std::function<Truth(const InterpretedSystem&, const Atom&)>;

class InterpretedSystem {
 public:
  InterpretedSystem(std::vector<SystemRun> runs, std::size_t n_robots);

  const std::vector<SystemRun>& runs() const { return runs_; }
  std::size_t n_robots() const { return n_robots_; }
  std::size_t point_count() const { return run_of_.size(); }
  std::size_t point_id(std::size_t run, std::size_t t) const { return offset_.at(run) + t; }
  std::size_t run_of(std::size_t point) const { return run_of_[point]; }
  std::size_t time_of(std::size_t point) const { return point - offset_[run_of_[point]]; }
  const GlobalConfig& config(std::size_t point) const;

  /// Class id of every point under ~_r; ids are dense and ordered by first point.
  const std::vector<std::uint32_t>& classes(std::size_t robot) const;
  std::size_t class_count(std::size_t robot) const;

  /// Class ids under the intersection of the group's relations.
  std::shared_ptr<const std::vector<std::uint32_t>> distributed_classes(
      std::span<const std::size_t> group) const;

  void register_provider(AtomKind kind, AtomProvider provider);
  bool has_provider(AtomKind kind) const;
  /// Installs a precomputed valuation for one atom.
  void set_truth(const Atom& atom, Truth truth);
  /// Truth of the atom at every point; throws InputError on an unknown kind.
  const Truth& truth(const Atom& atom) const;

  /// Marks runs open when a valuation changes inside their loop.
  void downgrade_nonperiodic(const Truth& truth);

 private:
  std::vector<SystemRun> runs_;
  std::size_t n_robots_ = 0;
  std::vector<std::size_t> offset_;
  std::vector<std::size_t> run_of_;
  std::vector<std::vector<std::uint32_t>> classes_;
  std::vector<std::size_t> class_counts_;
  std::map<AtomKind, AtomProvider> providers_;
  mutable std::map<std::string, Truth> cache_;
  mutable std::map<std::vector<std::size_t>, std::shared_ptr<const std::vector<std::uint32_t>>>
      dist_cache_;
  mutable std::mutex mu_;
};

/// Explicit equivalence classes as sorted point lists, sorted by first member.
std::vector<std::vector<std::size_t>> class_partition(std::span<const std::uint32_t> ids);

/// ~_r as a partition, for a single robot or a group.
std::vector<std::vector<std::size_t>> distributed_relation(const InterpretedSystem& sys,
                                                           std::span<const std::size_t> group);

/// Line-oriented trace: one configuration per line.
std::string format_trace(const SystemRun& run, const RobotMachine& robot, const EnvMachine& env);

}  // namespace lumi
