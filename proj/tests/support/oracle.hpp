#pragma once

// Brute-force reference implementations used to cross-check production code.

#include <cstdint>
#include <random>
#include <vector>

#include "lumi/checker.hpp"
#include "lumi/formula.hpp"
#include "lumi/runs.hpp"
#include "lumi/space.hpp"
#include "lumi/tasks.hpp"

namespace lumi::test {

using Partition = std::vector<std::vector<std::size_t>>;

/// Pairwise comparison of epistemic states, merged with union-find.
Partition pairwise_partition(const InterpretedSystem& sys, const std::vector<std::size_t>& group);

/// Start from one block and split by each robot's epistemic state in turn.
Partition refine_partition(const InterpretedSystem& sys, const std::vector<std::size_t>& group);

/// Labels every point straight from the semantics; no memoisation.
std::vector<Tri> naive_labels(const InterpretedSystem& sys, const Formula& f);

struct FormulaGen {
  std::vector<Atom> atoms;
  std::size_t n_robots = 1;
  bool temporal = true;
};

Formula random_formula(std::mt19937_64& rng, const FormulaGen& gen, std::size_t depth);

/// Manhattan adjacency from coordinates.
bool adjacent_or_equal(const Grid& grid, CellId a, CellId b);

std::vector<IntruderPath> brute_intruder_paths(const Grid& grid, std::size_t levels);

/// All g: cells -> [0, levels) with |g(c) - g(d)| <= 1 on adjacent cells.
std::vector<std::vector<std::size_t>> brute_level_functions(const Grid& grid, std::size_t levels);

/// The intruder occupies a(l) and a(l+1) at level l.
bool brute_meets(const IntruderPath& path, const std::vector<std::size_t>& g);

/// Schedule family by filtering every sequence of nonempty robot sets.
std::vector<std::vector<std::vector<std::size_t>>> brute_schedule_sets(const ScheduleSpec& spec);

}  // namespace lumi::test
