#pragma once

// Continuous-position robots driven by a discrete robot machine. Positions
// follow a vector field during each robot's MOVE phase and are abstracted
// back to grid cells for comparison with the discrete model.

#include <cstddef>
#include <string>
#include <vector>

#include "lumi/machine.hpp"
#include "lumi/runs.hpp"
#include "lumi/scheduler.hpp"

namespace lumi {

using Point = std::vector<double>;

struct VectorField {
  enum class Kind : std::uint8_t { Zero, Constant, Affine, Walker };
  Kind kind = Kind::Walker;
  // Walker: velocity is the commanded delta in cells per step, each axis
  // capped at speed_cap cells per step.
  double speed_cap = 1.0;
  // Affine: A x + B u + c, u the commanded displacement. Constant uses c only.
  std::vector<std::vector<double>> A;
  std::vector<std::vector<double>> B;
  std::vector<double> c;

  /// Throws InputError when matrix shapes do not match `dim`.
  void validate(int dim) const;
};

const char* field_kind_name(VectorField::Kind kind);
std::optional<VectorField::Kind> field_kind_from_name(const std::string& name);

/// Velocity at x under commanded displacement u (space units per step).
Point field_velocity(const VectorField& field, const Point& x, const Point& u);

/// Lipschitz constant in x under the max norm.
double lipschitz_constant(const VectorField& field);

struct HybridOptions {
  std::size_t substeps = 64;
};

struct ClampEvent {
  std::size_t step = 0;
  std::size_t robot = 0;
  int axis = 0;
  double value = 0.0;  // unclamped coordinate
};

struct HybridRun {
  std::vector<CellId> init_cells;
  TimePath path;
  std::vector<std::vector<Point>> positions;  // [t][robot]
  std::vector<GlobalConfig> configs;           // abstracted, steps + 1 entries
  std::vector<ClampEvent> clamps;
};

/// Integrates one run with explicit Euler. Throws ModelError when the step
/// is too coarse for the field (L h > 1) or a coordinate becomes NaN.
HybridRun simulate_hybrid(const RobotMachine& robot, const EnvMachine& env,
                          const VectorField& field, std::span<const CellId> init_cells,
                          const TimePath& path, const HybridOptions& options = {});

std::vector<HybridRun> enumerate_hybrid_runs(const RobotMachine& robot, const EnvMachine& env,
                                             const VectorField& field,
                                             const std::vector<std::vector<CellId>>& inits,
                                             const std::vector<TimePath>& schedules,
                                             const HybridOptions& options = {},
                                             std::size_t cap = 100000);

/// Position to cell, clamping to the unit cube.
CellId abstract_cell(const Grid& grid, const Point& x);

/// Cells never hit when sampling `per_axis` points per axis in every cell;
/// empty when the abstraction is onto.
std::vector<CellId> abstraction_gaps(const Grid& grid, std::size_t per_axis = 3);

/// Sequence of (env, e, o) per configuration.
using AbstractTrace = std::vector<std::uint64_t>;
AbstractTrace abstract_trace(const std::vector<GlobalConfig>& configs);
std::string format_abstract_trace(const AbstractTrace& trace, std::size_t n_robots);

struct EquivalenceReport {
  bool equal = true;
  std::size_t machine_traces = 0;
  std::size_t hybrid_traces = 0;
  std::vector<std::string> machine_only;  // formatted witnesses
  std::vector<std::string> hybrid_only;
  std::size_t clamps = 0;
};

EquivalenceReport check_trace_equivalence(const std::vector<SystemRun>& machine,
                                          const std::vector<HybridRun>& hybrid,
                                          std::size_t n_robots, std::size_t max_witnesses = 8);

}  // namespace lumi
