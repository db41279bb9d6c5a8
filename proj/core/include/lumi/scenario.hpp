#pragma once

// Scenario files: a JSON document describing the grid, robots, protocol,
// scheduler family, task, named regions, formulas and an optional hybrid
// field. See README.md for the format.

#include <optional>
#include <string>
#include <vector>

#include "lumi/atom.hpp"
#include "lumi/hybrid.hpp"
#include "lumi/machine.hpp"
#include "lumi/scheduler.hpp"
#include "lumi/tasks.hpp"

namespace lumi {

inline constexpr int kScenarioFormatVersion = 1;

struct TaskSpec {
  enum class Kind : std::uint8_t { None, Exploration, Surveillance, Gathering };
  Kind kind = Kind::None;
  std::vector<std::string> checks;  // empty means all checks of the kind
  SurveillanceSpec surveillance;
  std::vector<std::string> rendezvous;
};

const char* task_kind_name(TaskSpec::Kind kind);

struct HybridSpec {
  VectorField field;
  HybridOptions options;
  std::size_t samples_per_axis = 3;
};

struct Scenario {
  std::string name;
  std::string origin;  // file path or "<string>"
  Grid grid;
  std::size_t n_robots = 1;
  Capabilities caps;
  Protocol protocol = Protocol::ExploreSweep;
  ProtocolOptions options;
  std::optional<ExplicitTables> tables;
  std::vector<std::vector<CellId>> initial;
  ScheduleSpec schedule;
  std::vector<TimePath> paths;  // explicit family; empty means generated
  bool pre_move_look = false;
  std::size_t run_cap = 100000;
  AtomCatalog catalog;
  TaskSpec task;
  std::vector<std::string> formulas;
  std::optional<HybridSpec> hybrid;
};

/// Parses and validates; throws InputError naming the offending location.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");
Scenario load_scenario(const std::string& path);

/// Referential integrity and bounds; throws InputError.
void validate_scenario(const Scenario& scenario);

MachinePair build_machines(const Scenario& scenario);

/// Scheduler family of the scenario: explicit paths or the generated family.
std::vector<TimePath> scenario_schedules(const Scenario& scenario);

}  // namespace lumi
