#include "lumi/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "lumi/checker.hpp"
#include "lumi/errors.hpp"
#include "lumi/formula.hpp"
#include "lumi/hybrid.hpp"
#include "lumi/runs.hpp"
#include "lumi/tasks.hpp"

namespace lumi {

namespace {

using json = nlohmann::ordered_json;

struct Tally {
  bool any_false = false;
  bool any_unknown = false;

  void add(Tri v) {
    if (v == Tri::False) any_false = true;
    if (v == Tri::Unknown) any_unknown = true;
  }
};

Tri worse(Tri a, Tri b) { return tri_and(a, b); }

bool wants(const TaskSpec& task, const std::string& check) {
  return task.checks.empty() ||
         std::find(task.checks.begin(), task.checks.end(), check) != task.checks.end();
}

void witness_lines(std::ostringstream& os, const InterpretedSystem& sys,
                   const std::vector<std::size_t>& witnesses, std::size_t total,
                   std::size_t limit, const std::string& prefix = "") {
  std::size_t shown = 0;
  for (auto p : witnesses) {
    if (shown++ >= limit) break;
    os << "  witness " << prefix << point_name(sys, p) << '\n';
  }
  if (total > shown) os << "  (" << total << " witnesses)\n";
}

// One system per intruder path for surveillance, a single one otherwise.
struct Systems {
  std::vector<std::unique_ptr<InterpretedSystem>> items;
  std::vector<std::string> labels;
};

Systems build_systems(const Scenario& s, const MachinePair& m, const std::vector<SystemRun>& runs) {
  Systems out;
  if (s.task.kind == TaskSpec::Kind::Surveillance) {
    const auto& sv = s.task.surveillance;
    for (const auto& path : enumerate_intruder_paths(s.grid, sv.speed, sv.levels, sv.max_paths)) {
      auto sys = surveillance_system(runs, s.n_robots, s.grid, path, sv, s.catalog);
      if (m.robot.own_cell) install_gathering_atoms(*sys, m.robot);
      std::string label = "intruder ";
      if (path.empty()) {
        label += "absent";
      } else {
        label += "[";
        for (std::size_t i = 0; i < path.size(); ++i) label += (i ? "," : "") + std::to_string(path[i]);
        label += "]";
      }
      out.items.push_back(std::move(sys));
      out.labels.push_back(label + " ");
    }
    return out;
  }
  auto sys = std::make_unique<InterpretedSystem>(runs, s.n_robots);
  install_exploration_atoms(*sys);
  if (m.robot.own_cell) install_gathering_atoms(*sys, m.robot);
  out.items.push_back(std::move(sys));
  out.labels.push_back("");
  return out;
}

Tri check_formulas(const std::vector<std::string>& texts, const Scenario& s, Systems& systems,
                   const PipelineOptions& opt, std::ostringstream& os, json& summary) {
  Tri all = Tri::True;
  std::vector<Formula> fs;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    try {
      fs.push_back(parse_formula(texts[i], s.catalog));
    } catch (const ParseError& e) {
      throw InputError(s.origin + ": formula " + std::to_string(i) + ": offset " +
                       std::to_string(e.offset()) + ": " + e.what());
    }
  }
  std::vector<Checker> checkers;
  for (auto& sys : systems.items) checkers.emplace_back(*sys);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    Tri value = Tri::True;
    std::ostringstream wit;
    for (std::size_t k = 0; k < checkers.size(); ++k) {
      const Verdict v = checkers[k].valid(fs[i]);
      if (v.value != Tri::True && worse(value, v.value) != value) {
        wit.str("");
        witness_lines(wit, *systems.items[k], v.witnesses, v.witness_total, opt.max_witnesses,
                      systems.labels[k]);
      }
      value = worse(value, v.value);
    }
    os << texts[i] << ": " << tri_name(value) << '\n' << wit.str();
    summary["verdicts"][texts[i]] = tri_name(value);
    all = worse(all, value);
  }
  return all;
}

Tri exploration_tasks(const Scenario& s, Checker& checker, const PipelineOptions& opt,
                      std::ostringstream& os, json& summary) {
  Tri all = Tri::True;
  const auto& sys = checker.system();
  auto emit = [&](const std::string& name, Tri v, const std::vector<std::size_t>& w,
                  std::size_t total, const std::string& detail) {
    os << name << ": " << tri_name(v) << '\n';
    if (!detail.empty() && v != Tri::True) os << "  detail " << detail << '\n';
    if (v != Tri::True) witness_lines(os, sys, w, total, opt.max_witnesses);
    summary["tasks"][name] = tri_name(v);
    all = worse(all, v);
  };
  const bool conditions = wants(s.task, "agency") || wants(s.task, "independence") ||
                          wants(s.task, "stability") || wants(s.task, "recall");
  if (conditions) {
    for (const auto& c : check_exploration_conditions(checker, s.catalog)) {
      if (wants(s.task, c.name)) emit(c.name, c.value, c.witnesses, c.witnesses.size(), c.detail);
    }
  }
  if (wants(s.task, "liveness")) {
    const auto c = check_liveness(checker, s.catalog);
    emit(c.name, c.value, c.witnesses, c.witnesses.size(), c.detail);
  }
  for (auto mode : {TerminationMode::Parallel, TerminationMode::Selfish, TerminationMode::Cooperative}) {
    if (!wants(s.task, termination_name(mode))) continue;
    const auto v = check_termination(checker, mode, s.catalog);
    emit(termination_name(mode), v.value, v.witnesses, v.witness_total, "");
  }
  if (wants(s.task, "comm-liveness")) {
    const auto c = check_comm_liveness(checker, s.catalog);
    emit(c.name, c.value, c.witnesses, c.witnesses.size(), c.detail);
  }
  return all;
}

Tri surveillance_tasks(const Scenario& s, const std::vector<SystemRun>& runs,
                       std::ostringstream& os, json& summary) {
  std::vector<SurveillanceMode> modes;
  for (auto m : {SurveillanceMode::Plain, SurveillanceMode::Parallel, SurveillanceMode::Selfish,
                 SurveillanceMode::Cooperative}) {
    if (wants(s.task, surveillance_mode_name(m))) modes.push_back(m);
  }
  const auto rep = check_surveillance(runs, s.n_robots, s.grid, s.task.surveillance, s.catalog, modes);
  Tri all = Tri::True;
  os << "intruder paths: " << rep.paths << '\n';
  for (auto m : modes) {
    const Tri v = rep.verdicts.at(m);
    os << surveillance_mode_name(m) << ": " << tri_name(v) << '\n';
    summary["tasks"][surveillance_mode_name(m)] = tri_name(v);
    all = worse(all, v);
  }
  os << "found-and-secure runs: " << rep.both_found_and_secure << '\n';
  os << "raw secure conflicts: " << rep.conflicts << '\n';
  os << "trace hits: " << rep.trace_hits << '\n';
  for (const auto& w : rep.witnesses) os << "  witness " << w << '\n';
  summary["tasks"]["found_and_secure_runs"] = rep.both_found_and_secure;
  if (rep.both_found_and_secure > 0) all = Tri::False;
  return all;
}

Tri gathering_tasks(const Scenario& s, Checker& checker, const PipelineOptions& opt,
                    std::ostringstream& os, json& summary) {
  const auto rep = check_gathering(checker, s.catalog, s.task.rendezvous);
  const auto& sys = checker.system();
  Tri all = Tri::True;
  auto emit = [&](const char* name, const Verdict& v) {
    if (!wants(s.task, name)) return;
    os << name << ": " << tri_name(v.value) << '\n';
    if (v.value != Tri::True) witness_lines(os, sys, v.witnesses, v.witness_total, opt.max_witnesses);
    summary["tasks"][name] = tri_name(v.value);
    all = worse(all, v.value);
  };
  emit("eventual_gathering", rep.eventual_gathering);
  emit("starting_validity", rep.starting_validity);
  emit("agreement", rep.agreement);
  emit("validity", rep.validity);
  os << "reduction: " << (rep.reduction_holds ? "HOLDS" : "VIOLATED") << '\n';
  os << "exclusivity violations: " << rep.exclusivity_violations << '\n';
  summary["tasks"]["reduction_holds"] = rep.reduction_holds;
  if (!rep.reduction_holds || rep.exclusivity_violations > 0) all = Tri::False;
  return all;
}

Tri equivalence(const Scenario& s, const MachinePair& m, const std::vector<SystemRun>& runs,
                const std::vector<TimePath>& schedules, std::ostringstream& os, json& summary) {
  if (!s.hybrid) throw InputError(s.origin + ": /hybrid: scenario has no hybrid section");
  const auto gaps = abstraction_gaps(s.grid, s.hybrid->samples_per_axis);
  const auto hybrid = enumerate_hybrid_runs(m.robot, m.env, s.hybrid->field, s.initial, schedules,
                                            s.hybrid->options, s.run_cap);
  const auto rep = check_trace_equivalence(runs, hybrid, s.n_robots);
  const bool onto = gaps.empty();
  const bool ok = rep.equal && onto;
  os << (ok ? "EQUAL" : "NOT EQUAL") << '\n';
  os << "field: " << field_kind_name(s.hybrid->field.kind) << " substeps=" << s.hybrid->options.substeps
     << '\n';
  os << "machine traces: " << rep.machine_traces << '\n';
  os << "hybrid traces: " << rep.hybrid_traces << '\n';
  os << "clamp events: " << rep.clamps << '\n';
  os << "abstraction onto: " << (onto ? "yes" : "no") << '\n';
  for (auto c : gaps) os << "  unreached cell " << c << '\n';
  for (const auto& w : rep.machine_only) os << "  machine-only " << w << '\n';
  for (const auto& w : rep.hybrid_only) os << "  hybrid-only " << w << '\n';
  summary["equiv"] = {{"equal", ok},
                      {"machine_traces", rep.machine_traces},
                      {"hybrid_traces", rep.hybrid_traces},
                      {"machine_only", rep.machine_only.size()},
                      {"hybrid_only", rep.hybrid_only.size()}};
  return ok ? Tri::True : Tri::False;
}

std::string frame_stats(const InterpretedSystem& sys, json& summary) {
  std::ostringstream os;
  os << "points: " << sys.point_count() << '\n';
  os << "runs: " << sys.runs().size() << '\n';
  for (std::size_t r = 0; r < sys.n_robots(); ++r) {
    os << "r" << r + 1 << " classes: " << sys.class_count(r) << '\n';
    summary["frame"]["r" + std::to_string(r + 1)] = sys.class_count(r);
  }
  std::vector<std::size_t> group(sys.n_robots());
  for (std::size_t r = 0; r < group.size(); ++r) group[r] = r;
  const auto ids = sys.distributed_classes(group);
  std::size_t d = 0;
  for (auto id : *ids) d = std::max<std::size_t>(d, id + 1);
  os << "D classes: " << d << '\n';
  summary["frame"]["points"] = sys.point_count();
  summary["frame"]["distributed"] = d;
  return os.str();
}

}  // namespace

const char* command_name(Command c) {
  switch (c) {
    case Command::Run: return "run";
    case Command::Simulate: return "simulate";
    case Command::Check: return "check";
    case Command::FrameStats: return "frame-stats";
    case Command::Equiv: return "equiv";
  }
  return "?";
}

int exit_code_for(bool any_false, bool any_unknown) {
  if (any_false) return kExitFalse;
  if (any_unknown) return kExitUnknown;
  return kExitPass;
}

Scenario with_overrides(Scenario s, const PipelineOptions& options) {
  if (options.horizon) s.schedule.horizon = *options.horizon;
  if (options.cap) {
    s.schedule.cap = *options.cap;
    s.run_cap = *options.cap;
    s.task.surveillance.max_paths = *options.cap;
  }
  validate_scenario(s);
  return s;
}

PipelineResult run_pipeline(const Scenario& s, Command command, const PipelineOptions& opt) {
  PipelineResult result;
  json summary;
  summary["scenario"] = s.name.empty() ? s.origin : s.name;
  summary["command"] = command_name(command);

  const MachinePair m = build_machines(s);
  const auto schedules = scenario_schedules(s);
  RunOptions ro;
  ro.cap = s.run_cap;
  ro.jobs = opt.jobs;
  ro.pre_move_look = s.pre_move_look;
  const auto runs = enumerate_runs(m.robot, m.env, s.initial, schedules, ro);

  std::size_t closed = 0;
  for (const auto& r : runs) closed += r.closed() ? 1 : 0;
  summary["schedules"] = schedules.size();
  summary["runs"] = runs.size();
  summary["closed_runs"] = closed;

  const auto violations = validate_machine(m.robot, m.env);
  summary["machine_violations"] = violations.size();

  Tally tally;
  if (command == Command::Run || command == Command::Simulate) {
    std::ostringstream os;
    for (const auto& v : violations) os << "# violation " << v.kind << ": " << v.detail << '\n';
    for (const auto& r : runs) os << format_trace(r, m.robot, m.env);
    result.reports["traces.txt"] = os.str();
  }

  if (command == Command::Run || command == Command::Check) {
    Systems systems = build_systems(s, m, runs);
    std::ostringstream verdicts;
    const auto texts = command == Command::Check ? std::vector<std::string>{opt.formula} : s.formulas;
    tally.add(check_formulas(texts, s, systems, opt, verdicts, summary));
    result.reports["verdicts.txt"] = verdicts.str();

    if (command == Command::Run && s.task.kind != TaskSpec::Kind::None) {
      std::ostringstream tasks;
      tasks << "task: " << task_kind_name(s.task.kind) << '\n';
      switch (s.task.kind) {
        case TaskSpec::Kind::Exploration: {
          Checker checker(*systems.items.front());
          tally.add(exploration_tasks(s, checker, opt, tasks, summary));
          break;
        }
        case TaskSpec::Kind::Surveillance:
          tally.add(surveillance_tasks(s, runs, tasks, summary));
          break;
        case TaskSpec::Kind::Gathering: {
          Checker checker(*systems.items.front());
          tally.add(gathering_tasks(s, checker, opt, tasks, summary));
          break;
        }
        case TaskSpec::Kind::None:
          break;
      }
      result.reports["tasks.txt"] = tasks.str();
    }
  }

  if (command == Command::FrameStats) {
    InterpretedSystem sys(runs, s.n_robots);
    result.reports["frame_stats.txt"] = frame_stats(sys, summary);
  }

  if (command == Command::Equiv || (command == Command::Run && s.hybrid)) {
    std::ostringstream os;
    tally.add(equivalence(s, m, runs, schedules, os, summary));
    result.reports["equiv.txt"] = os.str();
  }

  result.exit_code = exit_code_for(tally.any_false, tally.any_unknown);
  summary["exit_code"] = result.exit_code;
  result.reports["summary.json"] = summary.dump(2) + "\n";
  return result;
}

void write_reports(const PipelineResult& result, const std::string& dir, const std::string& header) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError(dir + ": cannot create output directory: " + ec.message());
  for (const auto& [name, body] : result.reports) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path.string() + ": cannot write report");
    if (name.size() > 4 && name.substr(name.size() - 4) == ".txt") out << header << '\n';
    out << body;
  }
}

std::string strip_header(const std::string& text) {
  const auto nl = text.find('\n');
  return nl == std::string::npos ? std::string() : text.substr(nl + 1);
}

}  // namespace lumi
