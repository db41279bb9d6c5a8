#pragma once

// Finite robot and environment machines for the look-compute-move model.
//
// Robots read the world only through a Snapshot produced by the environment
// at LOOK; the environment state carries every ontic datum (positions and
// lights).

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lumi/scheduler.hpp"
#include "lumi/space.hpp"

namespace lumi {

using StateId = std::uint64_t;
using ObsId = std::uint64_t;
using ActionId = std::uint64_t;
using LightId = std::uint64_t;
using AdvId = std::uint32_t;

/// Upper bound on the environment state space of any machine we accept.
inline constexpr std::uint64_t kMaxEnvStates = 1'000'000;

struct Capabilities {
  enum class Visibility : std::uint8_t { Full, Myopic };
  enum class Movement : std::uint8_t { Rigid, NonRigid };
  enum class Memory : std::uint8_t { Oblivious, Luminous };
  enum class Communication : std::uint8_t { Silent, Luminous };

  Visibility visibility = Visibility::Full;
  double visibility_radius = 0.0;  // myopic only
  Movement movement = Movement::Rigid;
  double min_distance = 1.0;  // non-rigid only
  Memory memory = Memory::Luminous;
  Communication communication = Communication::Luminous;
  Synchrony synchrony = Synchrony::fsync();
  // Exploration footprint radius around the robot's cell centre; 0 means
  // the robot only sees its own cell.
  double sensor_radius = 0.0;

  /// Throws ModelError on out-of-range parameters.
  void validate() const;
};

struct SeenRobot {
  std::size_t robot = 0;
  CellId cell = 0;
  LightId light = 0;
};

/// What a LOOK returns to one robot.
struct Snapshot {
  std::size_t robot = 0;
  CellId own_cell = 0;
  std::vector<SeenRobot> seen;  // always includes the robot itself
  Region footprint;
  // Explicit machines observe a precomputed symbol instead of the fields above.
  std::optional<ObsId> symbol;
};

struct RobotMachine {
  std::string name;
  std::uint64_t epi_count = 0;
  std::uint64_t obs_count = 0;
  std::uint64_t action_count = 0;
  std::uint64_t light_count = 1;
  bool oblivious = false;

  std::function<std::optional<ObsId>(const Snapshot&)> observe;
  std::function<std::optional<StateId>(StateId, ObsId)> step;
  std::function<std::optional<ActionId>(StateId)> control;
  std::function<std::optional<LightId>(StateId)> light;

  // Initial epistemic state for a robot starting at a cell.
  std::function<StateId(std::size_t robot, CellId cell)> initial;

  // Optional extractors used by task valuations.
  std::function<std::optional<Region>(StateId)> known_region;
  std::function<std::optional<CellId>(StateId)> own_cell;

  std::function<std::string(StateId)> epi_name;
  std::function<std::string(ObsId)> obs_name;
};

struct EnvMachine {
  std::uint64_t env_count = 0;
  AdvId adv_count = 1;
  std::size_t n_robots = 0;
  Grid grid;

  // actions[r] is empty for robots not moving at this step.
  std::function<StateId(StateId, std::span<const std::optional<ActionId>>, AdvId)> evolve;
  std::function<std::vector<Snapshot>(StateId, AdvId)> emit_obs;

  std::function<Region(StateId, std::size_t robot)> footprint;
  std::function<CellId(StateId, std::size_t robot)> position;
  std::function<LightId(StateId, std::size_t robot)> light_of;
  std::function<StateId(std::span<const CellId>, std::span<const LightId>)> make_state;
  std::function<std::string(StateId)> env_name;
};

struct MachineViolation {
  std::string kind;  // totality | bound | light | oblivious | observe | evolve
  std::string detail;
};

/// Report-only check of totality, bounds and light consistency.
std::vector<MachineViolation> validate_machine(const RobotMachine& robot, const EnvMachine& env);

/// Per-robot local configuration: epistemic state plus last observation.
struct LocalState {
  StateId e = 0;
  std::optional<ObsId> o;
  friend bool operator==(const LocalState&, const LocalState&) = default;
};

/// Applies one phase of one robot. MOVE commits this robot's action alone;
/// multi-robot steps go through the run simulator.
std::pair<LocalState, StateId> lcm_phase(const RobotMachine& robot, const EnvMachine& env,
                                         std::size_t robot_index, Phase phase,
                                         const LocalState& local, StateId env_state,
                                         AdvId adv = 0);

enum class Protocol : std::uint8_t { ExploreSweep, FloodExplore, GatherMinRegion, Explicit };

const char* protocol_name(Protocol p);
std::optional<Protocol> protocol_from_name(const std::string& name);

struct ProtocolOptions {
  enum class Broadcast : std::uint8_t { Always, OnComplete };
  enum class Mutation : std::uint8_t { None, Oscillate, Jump2 };
  Broadcast broadcast = Broadcast::Always;
  Mutation mutation = Mutation::None;
  std::vector<Region> rendezvous;  // gathering only
};

struct MachinePair {
  RobotMachine robot;
  EnvMachine env;
};

/// Builds one of the built-in protocols over the standard walker environment.
MachinePair make_grid_walker(const Grid& grid, const Capabilities& caps, Protocol protocol,
                             std::size_t n_robots, const ProtocolOptions& options = {});

// Movement encoding shared by every walker machine. Delta 0 is "stay"; for
// axis a, deltas 1+4a .. 4+4a are +1, -1, +2, -2 along a.
std::size_t delta_count(int dim);
std::vector<int> delta_vector(int dim, std::size_t delta);
std::optional<std::size_t> delta_from_name(int dim, const std::string& name);
std::string delta_name(int dim, std::size_t delta);
inline ActionId encode_action(std::size_t delta, LightId light, std::uint64_t light_count) {
  return static_cast<ActionId>(delta) * light_count + light;
}

/// Standard walker environment: positions and lights, mixed radix.
EnvMachine make_walker_env(const Grid& grid, const Capabilities& caps, std::size_t n_robots,
                           std::uint64_t light_count);

/// Explicit tables for a robot driving the standard walker environment.
struct ExplicitTables {
  std::vector<std::string> states;
  std::vector<std::string> observations;
  // cell -> observation index; a missing entry makes observe partial.
  std::vector<std::optional<std::size_t>> obs_of_cell;
  // step[e][o]; nullopt marks a missing table entry.
  std::vector<std::vector<std::optional<std::size_t>>> step;
  std::vector<std::optional<std::string>> control;  // delta names
  std::vector<std::optional<LightId>> light;
  std::uint64_t light_count = 1;
  // Initial state index per robot.
  std::vector<std::size_t> initial;
  bool oblivious = false;
};

MachinePair make_explicit_machine(const Grid& grid, const Capabilities& caps,
                                  std::size_t n_robots, const ExplicitTables& tables);

/// Snake (boustrophedon) visiting order over every cell of the grid.
std::vector<CellId> snake_order(const Grid& grid);

/// Next cell on the axis-ordered shortest path (axis 0 first), stepping
/// at most `stride` cells along that axis.
CellId step_toward(const Grid& grid, CellId from, CellId to, int stride = 1);

}  // namespace lumi
