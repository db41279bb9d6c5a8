#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lumi/checker.hpp"
#include "lumi/machine.hpp"
#include "lumi/runs.hpp"
#include "lumi/scenario.hpp"

namespace lumi::test {

std::string scenario_path(const std::string& name);

/// Every *.scn file of the bundled corpus, sorted by name.
std::vector<std::string> bundled_scenarios();

struct Loaded {
  Scenario scenario;
  MachinePair machines;
  std::vector<TimePath> schedules;
  std::vector<SystemRun> runs;
  std::unique_ptr<InterpretedSystem> system;  // exploration (+ gathering) atoms installed
};

Loaded load(const std::string& name, std::size_t jobs = 1);
Loaded build(Scenario scenario, std::size_t jobs = 1);

/// Minimal 1-D exploration scenario for unit tests.
Scenario line_scenario(int cells, std::size_t robots, std::size_t horizon,
                       Protocol protocol = Protocol::ExploreSweep);

}  // namespace lumi::test
