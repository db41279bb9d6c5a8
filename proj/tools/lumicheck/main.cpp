// lumicheck: simulate luminous robot scenarios and model check them.

#include <chrono>
#include <iostream>

#include "CLI11.hpp"

#include "lumi/errors.hpp"
#include "lumi/pipeline.hpp"
#include "lumi/scenario.hpp"

namespace {

struct Args {
  std::string scenario;
  std::string formula;
  std::string out;
  std::size_t horizon = 0;
  std::size_t cap = 0;
  std::size_t jobs = 1;
  std::uint64_t seed = 0;
};

int execute(lumi::Command command, const Args& args) {
  const auto start = std::chrono::steady_clock::now();
  lumi::PipelineOptions opt;
  if (args.horizon) opt.horizon = args.horizon;
  if (args.cap) opt.cap = args.cap;
  opt.jobs = args.jobs == 0 ? 1 : args.jobs;
  opt.seed = args.seed;
  opt.formula = args.formula;
  try {
    const auto scenario = lumi::with_overrides(lumi::load_scenario(args.scenario), opt);
    const auto result = lumi::run_pipeline(scenario, command, opt);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    if (!args.out.empty()) {
      const std::string header = std::string("# lumicheck ") + lumi::command_name(command) + " " +
                                 args.scenario + " elapsed_ms=" + std::to_string(ms);
      lumi::write_reports(result, args.out, header);
    }
    const char* shown[] = {"traces.txt", "verdicts.txt", "tasks.txt", "frame_stats.txt", "equiv.txt"};
    for (const char* name : shown) {
      if (command == lumi::Command::Run && std::string(name) == "traces.txt") continue;
      auto it = result.reports.find(name);
      if (it != result.reports.end()) std::cout << it->second;
    }
    return result.exit_code;
  } catch (const lumi::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const lumi::CapExceeded& e) {
    std::cerr << "error: cap exceeded: " << e.what() << '\n';
  } catch (const lumi::ModelError& e) {
    std::cerr << "error: model: " << e.what() << '\n';
  } catch (const lumi::DimensionError& e) {
    std::cerr << "error: dimension: " << e.what() << '\n';
  }
  return lumi::kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Luminous robot simulator and temporal-epistemic model checker"};
  app.require_subcommand(1);
  Args args;
  app.add_option("--horizon", args.horizon, "Override the scheduler horizon (cycles)");
  app.add_option("--cap", args.cap, "Override schedule, run and intruder-path caps");
  app.add_option("--jobs", args.jobs, "Worker threads for run enumeration")->envname("LUMI_JOBS");
  app.add_option("--out", args.out, "Directory for report files");
  app.add_option("--seed", args.seed, "Reserved; has no effect on results");
  app.fallthrough();

  struct Sub {
    const char* name;
    const char* help;
    lumi::Command command;
  };
  const Sub subs[] = {
      {"run", "Simulate, check every task and formula, compare hybrid", lumi::Command::Run},
      {"simulate", "Emit run traces only", lumi::Command::Simulate},
      {"check", "Evaluate one formula", lumi::Command::Check},
      {"frame-stats", "Indistinguishability class and point counts", lumi::Command::FrameStats},
      {"equiv", "Hybrid versus machine trace equivalence", lumi::Command::Equiv},
  };
  std::vector<std::pair<CLI::App*, lumi::Command>> apps;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("scenario", args.scenario, "Scenario file")->required();
    if (s.command == lumi::Command::Check) {
      sub->add_option("formula", args.formula, "Formula text")->required();
    }
    apps.emplace_back(sub, s.command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lumi::kExitInput;
  }
  for (const auto& [sub, command] : apps) {
    if (sub->parsed()) return execute(command, args);
  }
  return lumi::kExitInput;
}
