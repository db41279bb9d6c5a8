#include "fixtures.hpp"

#include <algorithm>
#include <filesystem>

#include "lumi/tasks.hpp"

namespace lumi::test {

std::string scenario_path(const std::string& name) {
  std::string file = name;
  if (file.size() < 4 || file.substr(file.size() - 4) != ".scn") file += ".scn";
  return std::string(LUMI_SCENARIO_DIR) + "/" + file;
}

std::vector<std::string> bundled_scenarios() {
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(LUMI_SCENARIO_DIR)) {
    if (entry.path().extension() == ".scn") out.push_back(entry.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Loaded build(Scenario scenario, std::size_t jobs) {
  Loaded l;
  l.scenario = std::move(scenario);
  l.machines = build_machines(l.scenario);
  l.schedules = scenario_schedules(l.scenario);
  RunOptions ro;
  ro.cap = l.scenario.run_cap;
  ro.jobs = jobs;
  ro.pre_move_look = l.scenario.pre_move_look;
  l.runs = enumerate_runs(l.machines.robot, l.machines.env, l.scenario.initial, l.schedules, ro);
  l.system = std::make_unique<InterpretedSystem>(l.runs, l.scenario.n_robots);
  install_exploration_atoms(*l.system);
  if (l.machines.robot.own_cell) install_gathering_atoms(*l.system, l.machines.robot);
  return l;
}

Loaded load(const std::string& name, std::size_t jobs) {
  return build(load_scenario(scenario_path(name)), jobs);
}

Scenario line_scenario(int cells, std::size_t robots, std::size_t horizon, Protocol protocol) {
  Scenario s;
  s.name = "line";
  s.grid = Grid(1, cells);
  s.n_robots = robots;
  s.protocol = protocol;
  s.schedule.n_robots = robots;
  s.schedule.horizon = horizon;
  for (CellId c = 0; c < static_cast<CellId>(cells) && s.initial.size() < 4; ++c) {
    std::vector<CellId> placement(robots);
    for (std::size_t r = 0; r < robots; ++r) {
      placement[r] = static_cast<CellId>((c + r) % static_cast<CellId>(cells));
    }
    s.initial.push_back(placement);
  }
  s.catalog.grid = s.grid;
  s.catalog.n_robots = robots;
  s.task.kind = TaskSpec::Kind::Exploration;
  return s;
}

}  // namespace lumi::test
