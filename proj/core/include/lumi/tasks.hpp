#pragma once

// Atom valuations and verdict procedures for exploration, surveillance
// and approximate gathering.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lumi/checker.hpp"
#include "lumi/formula.hpp"
#include "lumi/machine.hpp"
#include "lumi/runs.hpp"

namespace lumi {

struct ConditionResult {
  std::string name;
  Tri value = Tri::True;
  std::vector<std::size_t> witnesses;  // points
  std::string detail;
};

// ---- exploration ----

/// sp(U) holds where U is contained in the cumulative explored region.
void install_exploration_atoms(InterpretedSystem& sys);

/// Catalog regions plus UX, UEMPTY and every singleton, deduplicated.
std::vector<Region> region_universe(const AtomCatalog& catalog);

/// Agency, independence, stability and recall, each as a validity.
std::vector<ConditionResult> check_exploration_conditions(Checker& checker,
                                                          const AtomCatalog& catalog);

/// Every run eventually explores a family of regions whose union is the grid.
ConditionResult check_liveness(Checker& checker, const AtomCatalog& catalog);

enum class TerminationMode : std::uint8_t { Parallel, Selfish, Cooperative };
const char* termination_name(TerminationMode mode);

Formula termination_formula(TerminationMode mode, const AtomCatalog& catalog);
Verdict check_termination(Checker& checker, TerminationMode mode, const AtomCatalog& catalog);

/// K_r sp(U) -> <> E sp(U) for every robot and universe region.
ConditionResult check_comm_liveness(Checker& checker, const AtomCatalog& catalog);

// ---- surveillance ----

struct SurveillanceSpec {
  double speed = 1.0;       // intruder cells per level
  std::size_t levels = 1;   // T_s
  std::size_t max_paths = 100000;
};

/// Intruder path: one cell per level; empty when no intruder is present.
using IntruderPath = std::vector<CellId>;

/// Every path with per-level displacement at most `speed` cells, plus the
/// absent intruder, in lexicographic order.
std::vector<IntruderPath> enumerate_intruder_paths(const Grid& grid, double speed,
                                                   std::size_t levels, std::size_t cap);

/// Space-time cells an intruder occupies: at level l both a(l) and a(l+1).
CylinderRegion intruder_trace(const Grid& grid, const IntruderPath& path, std::size_t levels);

/// Level of the LOOK fired at global step s.
std::size_t level_of_step(std::size_t step, std::size_t levels);

/// Cells of U farther than `radius` from every cell outside U.
Region erode(const Region& u, double radius);

/// A level function g with |g(c) - g(c')| <= 1 on neighbours whose graph
/// lies in `cleared`; flat cuts are tried first.
std::optional<std::vector<std::size_t>> check_manifold(const CylinderRegion& cleared);

/// True iff the path's extended trace meets the graph of g.
bool curve_meets(const Grid& grid, const IntruderPath& path, const std::vector<std::size_t>& g,
                 std::size_t levels);

struct SurveillanceValuation {
  Truth found;
  Truth secure;
  std::vector<CylinderRegion> cleared;  // per point
  std::size_t conflicts = 0;            // points where raw SECURE met FOUND in the run
  std::size_t trace_hits = 0;           // extended cells removed for meeting the trace
};

SurveillanceValuation value_surveillance(const InterpretedSystem& sys, const Grid& grid,
                                         const IntruderPath& path, const SurveillanceSpec& spec);

/// Builds the per-path system with FOUND, SECURE and cylinder atoms.
std::unique_ptr<InterpretedSystem> surveillance_system(const std::vector<SystemRun>& runs,
                                                       std::size_t n_robots, const Grid& grid,
                                                       const IntruderPath& path,
                                                       const SurveillanceSpec& spec,
                                                       const AtomCatalog& catalog,
                                                       SurveillanceValuation* valuation = nullptr);

enum class SurveillanceMode : std::uint8_t { Plain, Parallel, Selfish, Cooperative };
const char* surveillance_mode_name(SurveillanceMode mode);
Formula surveillance_formula(SurveillanceMode mode, std::size_t n_robots);

struct SurveillanceReport {
  std::map<SurveillanceMode, Tri> verdicts;
  std::size_t paths = 0;
  std::size_t both_found_and_secure = 0;  // runs where FOUND and SECURE both held
  std::size_t conflicts = 0;
  std::size_t trace_hits = 0;
  std::vector<std::string> witnesses;  // failing (path, point) descriptions
};

SurveillanceReport check_surveillance(const std::vector<SystemRun>& runs, std::size_t n_robots,
                                      const Grid& grid, const SurveillanceSpec& spec,
                                      const AtomCatalog& catalog,
                                      const std::vector<SurveillanceMode>& modes);

// ---- gathering ----

/// pos from the robot's own recorded cell, init_pos from time 0, in(x,U) static.
void install_gathering_atoms(InterpretedSystem& sys, const RobotMachine& robot);

/// Throws InputError when two regions share a cell.
void require_disjoint(const std::vector<Region>& rendezvous);

struct GatheringFormulas {
  Formula eventual_gathering;
  Formula starting_validity;
  Formula agreement;
  Formula validity;
};

/// Compact forms; the distributive law turns the vector-indexed
/// disjunctions of the definitions into per-robot ones.
GatheringFormulas gathering_formulas(const AtomCatalog& catalog,
                                     const std::vector<std::string>& rendezvous_names);

/// Literal forms expanded over position vectors; exponential in robots.
GatheringFormulas literal_gathering_formulas(const AtomCatalog& catalog,
                                             const std::vector<std::string>& rendezvous_names);

struct GatheringReport {
  Verdict eventual_gathering;
  Verdict starting_validity;
  Verdict agreement;
  Verdict validity;
  bool reduction_holds = true;  // agreement & validity TRUE => both gathering TRUE
  std::size_t exclusivity_violations = 0;
};

GatheringReport check_gathering(Checker& checker, const AtomCatalog& catalog,
                                const std::vector<std::string>& rendezvous_names);

}  // namespace lumi
