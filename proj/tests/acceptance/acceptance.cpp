// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "lumi/errors.hpp"
#include "lumi/hybrid.hpp"
#include "lumi/pipeline.hpp"
#include "lumi/tasks.hpp"
#include "oracle.hpp"

using namespace lumi;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances: every count below must be exactly zero.
constexpr std::size_t kS5Formulas = 50;
constexpr std::size_t kS5Depth = 4;
constexpr std::uint64_t kS5Seed = 20240601;
constexpr std::size_t kFrameScenarios = 10;
constexpr std::uint64_t kFrameSeed = 77;
constexpr std::size_t kMaxCurveCells = 6;
constexpr std::size_t kMaxCurveLevels = 6;
constexpr std::size_t kJobsN = 4;

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome fail_with(Outcome o, const std::string& why) {
  o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += why;
  return o;
}

Formula sp(const Region& u) {
  Atom a;
  a.kind = AtomKind::Sp;
  a.region = u;
  a.region_name = u.to_string();
  return Formula::atom(a);
}

std::size_t false_points(Checker& c, const Formula& f) {
  const auto v = c.valid(f);
  return v.value == Tri::False ? v.witness_total : 0;
}

// ---- 1 ----
Outcome s5_suite() {
  std::size_t counterexamples = 0, validities = 0, unknown_open = 0, unknown_closed = 0;
  std::set<std::string> open_scenarios;
  const auto names = test::bundled_scenarios();
  for (const auto& name : names) {
    auto l = test::load(name);
    bool all_closed = true;
    for (const auto& run : l.system->runs()) all_closed = all_closed && run.closed();
    if (!all_closed) open_scenarios.insert(name);
    Checker checker(*l.system);
    test::FormulaGen gen;
    gen.n_robots = l.scenario.n_robots;
    for (const auto& u : region_universe(l.scenario.catalog)) {
      Atom a;
      a.kind = AtomKind::Sp;
      a.region = u;
      a.region_name = u.to_string();
      gen.atoms.push_back(a);
    }
    if (l.machines.robot.own_cell) {
      for (std::size_t r = 0; r < l.scenario.n_robots; ++r) {
        Atom a;
        a.kind = AtomKind::Pos;
        a.robot = r;
        a.cell = static_cast<CellId>(r % l.scenario.grid.cell_count());
        gen.atoms.push_back(a);
      }
    }
    std::mt19937_64 rng(kS5Seed);
    for (std::size_t i = 0; i < kS5Formulas; ++i) {
      const auto phi = test::random_formula(rng, gen, kS5Depth);
      for (std::size_t r = 0; r < l.scenario.n_robots; ++r) {
        const auto k = Formula::know(r, phi);
        const Formula laws[] = {
            Formula::implies(k, phi),
            Formula::implies(k, Formula::know(r, k)),
            Formula::implies(Formula::neg(k), Formula::know(r, Formula::neg(k))),
        };
        for (const auto& law : laws) {
          const auto v = checker.valid(law);
          ++validities;
          if (v.value == Tri::False) counterexamples += v.witness_total;
          if (v.value == Tri::Unknown) ++(all_closed ? unknown_closed : unknown_open);
        }
      }
    }
  }
  Outcome o;
  o.detail = std::to_string(names.size()) + " scenarios, " + std::to_string(validities) +
             " validities, counterexamples=" + std::to_string(counterexamples) +
             ", UNKNOWN on all-closed scenarios=" + std::to_string(unknown_closed) +
             ", UNKNOWN on scenarios with open runs=" + std::to_string(unknown_open) + " (";
  for (const auto& n : open_scenarios) o.detail += (o.detail.back() == '(' ? "" : " ") + n;
  o.detail += ")";
  if (counterexamples != 0 || unknown_closed != 0) o.pass = false;
  return o;
}

// ---- 2 ----
Outcome lattice_suite() {
  std::size_t violations = 0, pairs = 0;
  std::vector<Grid> grids;
  for (int n = 1; n <= 6; ++n) grids.emplace_back(1, n);
  grids.emplace_back(2, 2);
  for (const auto& g : grids) {
    const std::uint64_t n = 1ull << g.cell_count();
    for (std::uint64_t a = 0; a < n; ++a) {
      const Region u(g, a);
      if (!region_leq(u, u) || !(region_join(u, u) == u)) ++violations;
      for (std::uint64_t b = 0; b < n; ++b) {
        const Region v(g, b);
        const Region j = region_join(u, v);
        if (!(j == region_join(v, u)) || !region_leq(u, j) || !region_leq(v, j)) ++violations;
        if (region_leq(u, v) != ((a & ~b) == 0)) ++violations;
        if (region_leq(u, v) && region_leq(v, u) && a != b) ++violations;
        for (std::uint64_t c = 0; c < n && g.cell_count() <= 4; ++c) {
          const Region w(g, c);
          if (region_leq(u, v) && region_leq(v, w) && !region_leq(u, w)) ++violations;
          if (region_leq(u, w) && region_leq(v, w) && !region_leq(j, w)) ++violations;
        }
      }
    }
  }
  std::size_t scenarios = 0;
  for (const auto& name : test::bundled_scenarios()) {
    auto l = test::load(name);
    const Grid& g = l.scenario.grid;
    if (g.cell_count() > 6) continue;
    ++scenarios;
    Checker checker(*l.system);
    const std::uint64_t n = 1ull << g.cell_count();
    for (std::uint64_t v = 0; v < n; ++v) {
      for (std::uint64_t u = v;; u = (u - 1) & v) {
        ++pairs;
        if (checker.valid(Formula::implies(sp(Region(g, v)), sp(Region(g, u)))).value != Tri::True) {
          ++violations;
        }
        if (u == 0) break;
      }
    }
  }
  Outcome o;
  o.detail = std::to_string(grids.size()) + " grids exhaustive, " + std::to_string(pairs) +
             " sp(V)->sp(U) validities on " + std::to_string(scenarios) +
             " scenarios, violations=" + std::to_string(violations);
  o.pass = violations == 0;
  return o;
}

// ---- 3 ----
Outcome liveness_suite() {
  Outcome o;
  std::size_t live_ok = 0, nonlive_ok = 0;
  for (const char* name : {"explore_1d", "explore_2d", "flooding", "eventual_broadcast"}) {
    auto l = test::load(name);
    Checker checker(*l.system);
    const auto live = check_liveness(checker, l.scenario.catalog);
    const auto ev = checker.initially(parse_formula("<> sp(UX)", l.scenario.catalog));
    const auto all = checker.valid(parse_formula("<> sp(UX)", l.scenario.catalog));
    if (live.value == Tri::True && ev.value == Tri::True && all.value == Tri::True) {
      ++live_ok;
    } else {
      o = fail_with(o, std::string(name) + " not live");
    }
  }
  for (const char* name : {"explore_sweep_late", "explore_jump2"}) {
    auto l = test::load(name);
    Checker checker(*l.system);
    const auto live = check_liveness(checker, l.scenario.catalog);
    const auto ev = checker.initially(parse_formula("<> sp(UX)", l.scenario.catalog));
    bool witnessed = false;
    if (ev.value == Tri::False && !ev.witnesses.empty()) {
      const auto& run = l.runs[l.system->run_of(ev.witnesses[0])];
      witnessed = run.closed() && !run.configs.back().explored.is_full();
    }
    if (live.value == Tri::False && witnessed) {
      ++nonlive_ok;
    } else {
      o = fail_with(o, std::string(name) + " expected a witnessed non-live run");
    }
  }
  o.detail = "live " + std::to_string(live_ok) + "/4 with <>sp(X) TRUE on every run, non-live " +
             std::to_string(nonlive_ok) + "/2 with witnessed FALSE run" +
             (o.detail.empty() ? "" : "; " + o.detail);
  o.pass = o.pass && live_ok >= 3 && nonlive_ok >= 2;
  return o;
}

// ---- 4 ----
Outcome termination_suite() {
  Outcome o;
  std::ostringstream d;
  for (const char* name : {"flooding", "explore_2d"}) {
    auto l = test::load(name);
    if (l.scenario.protocol != Protocol::FloodExplore ||
        l.scenario.caps.visibility != Capabilities::Visibility::Full) {
      o = fail_with(o, std::string(name) + " is not a flooding/full-visibility scenario");
    }
    Checker checker(*l.system);
    if (check_liveness(checker, l.scenario.catalog).value != Tri::True) {
      o = fail_with(o, std::string(name) + " not live");
    }
    d << name << ":";
    for (auto m : {TerminationMode::Parallel, TerminationMode::Selfish, TerminationMode::Cooperative}) {
      const auto v = check_termination(checker, m, l.scenario.catalog).value;
      d << ' ' << termination_name(m) << '=' << tri_name(v);
      if (v != Tri::True) o = fail_with(o, std::string(name) + " " + termination_name(m));
    }
    d << "  ";
  }
  auto l = test::load("silent_mutant");
  Checker checker(*l.system);
  const auto par = check_termination(checker, TerminationMode::Parallel, l.scenario.catalog).value;
  const auto sel = check_termination(checker, TerminationMode::Selfish, l.scenario.catalog).value;
  d << "silent_mutant: PARALLEL=" << tri_name(par) << " SELFISH=" << tri_name(sel);
  if (par != Tri::True || sel != Tri::False) o = fail_with(o, "silent mutant");
  o.detail = d.str() + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// ---- 5 ----
Outcome comm_liveness_suite() {
  Outcome o;
  auto l = test::load("eventual_broadcast");
  Checker checker(*l.system);
  const bool non_flooding = l.scenario.options.broadcast == ProtocolOptions::Broadcast::OnComplete;
  const auto cl = check_comm_liveness(checker, l.scenario.catalog).value;
  const auto coop =
      check_termination(checker, TerminationMode::Cooperative, l.scenario.catalog).value;
  o.detail = std::string("eventual_broadcast: broadcast=") +
             (non_flooding ? "on_complete" : "always") + " comm-liveness=" + tri_name(cl) +
             " COOPERATIVE=" + tri_name(coop);
  o.pass = non_flooding && cl == Tri::True && coop == Tri::True;
  return o;
}

// ---- 6 ----
Outcome curve_catching_suite() {
  std::size_t misses = 0, disagreements = 0, pairs = 0, grids = 0, path_mismatch = 0;
  std::vector<Grid> gs;
  for (int n = 1; n <= static_cast<int>(kMaxCurveCells); ++n) gs.emplace_back(1, n);
  gs.emplace_back(2, 2);
  for (const auto& g : gs) {
    ++grids;
    for (std::size_t levels = 1; levels <= kMaxCurveLevels; ++levels) {
      const auto paths = enumerate_intruder_paths(g, 1.0, levels, 10000000);
      if (paths != test::brute_intruder_paths(g, levels)) ++path_mismatch;
      const auto fns = test::brute_level_functions(g, levels);
      for (const auto& f : fns) {
        for (std::size_t i = 1; i < paths.size(); ++i) {
          ++pairs;
          const bool meets = curve_meets(g, paths[i], f, levels);
          if (meets != test::brute_meets(paths[i], f)) ++disagreements;
          if (!meets) ++misses;
        }
      }
    }
  }
  Outcome o;
  o.detail = std::to_string(grids) + " grids x levels 1.." + std::to_string(kMaxCurveLevels) +
             ", " + std::to_string(pairs) + " (path, level function) pairs, misses=" +
             std::to_string(misses) + " oracle disagreements=" + std::to_string(disagreements) +
             " path family mismatches=" + std::to_string(path_mismatch);
  o.pass = misses == 0 && disagreements == 0 && path_mismatch == 0;
  return o;
}

// ---- 7 ----
Outcome surveillance_suite() {
  Outcome o;
  std::ostringstream d;
  const std::vector<SurveillanceMode> plain{SurveillanceMode::Plain};
  for (const char* name : {"surveillance_1d", "surveillance_pair", "surveillance_parked"}) {
    auto l = test::load(name);
    const auto rep = check_surveillance(l.runs, l.scenario.n_robots, l.scenario.grid,
                                        l.scenario.task.surveillance, l.scenario.catalog, plain);
    const Tri v = rep.verdicts.at(SurveillanceMode::Plain);
    const bool live = std::string(name) != "surveillance_parked";
    d << name << ": " << tri_name(v) << " over " << rep.paths
      << " paths, found-and-secure runs=" << rep.both_found_and_secure << "  ";
    if (live && v != Tri::True) o = fail_with(o, std::string(name) + " not TRUE");
    if (rep.both_found_and_secure != 0) o = fail_with(o, std::string(name) + " FOUND and SECURE");
  }
  o.detail = d.str() + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// ---- 8 ----
Outcome gathering_suite() {
  Outcome o;
  std::size_t reductions = 0;
  for (const char* name :
       {"gather_1d_single", "gather_1d_pair", "gather_2d", "gather_triple", "gather_ssync"}) {
    auto l = test::load(name);
    Checker checker(*l.system);
    const auto rep = check_gathering(checker, l.scenario.catalog, l.scenario.task.rendezvous);
    const bool premise = rep.agreement.value == Tri::True && rep.validity.value == Tri::True;
    const bool conclusion =
        rep.eventual_gathering.value == Tri::True && rep.starting_validity.value == Tri::True;
    if (premise && conclusion) {
      ++reductions;
    } else {
      o = fail_with(o, std::string(name) + (premise ? " gathering not TRUE" : " agreement not TRUE"));
    }
  }
  auto l = test::load("gather_oscillate");
  Checker checker(*l.system);
  const auto rep = check_gathering(checker, l.scenario.catalog, l.scenario.task.rendezvous);
  o.detail = std::to_string(reductions) + "/5 scenarios agreement+validity => both gathering TRUE;" +
             " gather_oscillate agreement=" + tri_name(rep.agreement.value) +
             " eventual_gathering=" + tri_name(rep.eventual_gathering.value) +
             (o.detail.empty() ? "" : "; " + o.detail);
  o.pass = o.pass && reductions >= 4 && rep.agreement.value == Tri::False &&
           rep.eventual_gathering.value == Tri::False;
  return o;
}

// ---- 9 ----
EquivalenceReport equivalence_of(const std::string& name) {
  auto l = test::load(name);
  if (!l.scenario.hybrid) throw ModelError(name + " has no hybrid section");
  const auto hs = enumerate_hybrid_runs(l.machines.robot, l.machines.env, l.scenario.hybrid->field,
                                        l.scenario.initial, l.schedules,
                                        l.scenario.hybrid->options, l.scenario.run_cap);
  return check_trace_equivalence(l.runs, hs, l.scenario.n_robots);
}

Outcome equivalence_suite() {
  Outcome o;
  std::ostringstream d;
  for (const char* name : {"walker_hybrid", "walker_hybrid_ssync"}) {
    const auto rep = equivalence_of(name);
    d << name << ": " << (rep.equal ? "EQUAL" : "NOT EQUAL") << " (" << rep.machine_traces
      << " traces)  ";
    if (!rep.equal) o = fail_with(o, std::string(name) + " not equal");
  }
  const auto mut = equivalence_of("walker_jump2");
  d << "walker_jump2: " << (mut.equal ? "EQUAL" : "NOT EQUAL") << " machine-only witnesses="
    << mut.machine_only.size();
  if (mut.equal || mut.machine_only.empty()) o = fail_with(o, "mutant not caught");
  o.detail = d.str() + (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// ---- 10 ----
Scenario random_scenario(std::mt19937_64& rng) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  Scenario s;
  s.name = "random";
  s.grid = pick(4) == 0 ? Grid(2, 2) : Grid(1, 2 + static_cast<int>(pick(4)));
  s.n_robots = 1 + pick(3);
  const std::size_t cells = s.grid.cell_count();
  const bool ssync = s.n_robots > 1 && pick(2) == 0;
  s.caps.synchrony = ssync ? Synchrony::ssync() : Synchrony::fsync();
  s.schedule.n_robots = s.n_robots;
  s.schedule.synchrony = s.caps.synchrony;
  s.schedule.horizon = 2 + pick(2);
  s.schedule.fairness_bound = 2;
  if (pick(2) == 0) s.caps.communication = Capabilities::Communication::Silent;
  s.caps.sensor_radius = pick(2) == 0 ? 0.0 : s.grid.cell_width();
  switch (pick(3)) {
    case 0: s.protocol = Protocol::ExploreSweep; break;
    case 1: s.protocol = Protocol::FloodExplore; break;
    default: {
      s.protocol = Protocol::Explicit;
      ExplicitTables t;
      const std::size_t ns = 2 + pick(3);
      const std::size_t no = 1 + pick(2);
      for (std::size_t i = 0; i < ns; ++i) t.states.push_back("s" + std::to_string(i));
      for (std::size_t i = 0; i < no; ++i) t.observations.push_back("o" + std::to_string(i));
      for (std::size_t c = 0; c < cells; ++c) t.obs_of_cell.push_back(pick(no));
      t.step.assign(ns, std::vector<std::optional<std::size_t>>(no));
      for (auto& row : t.step) {
        for (auto& e : row) e = pick(ns);
      }
      const char* moves[] = {"stay", "+1@a0", "-1@a0"};
      for (std::size_t i = 0; i < ns; ++i) {
        t.control.push_back(std::string(moves[pick(3)]));
        t.light.push_back(0);
      }
      for (std::size_t r = 0; r < s.n_robots; ++r) t.initial.push_back(pick(ns));
      s.tables = t;
    }
  }
  const std::size_t placements = 1 + pick(3);
  for (std::size_t i = 0; i < placements; ++i) {
    std::vector<CellId> p(s.n_robots);
    for (auto& c : p) c = static_cast<CellId>(pick(cells));
    s.initial.push_back(p);
  }
  s.catalog.grid = s.grid;
  s.catalog.n_robots = s.n_robots;
  return s;
}

Outcome frame_oracle_suite() {
  std::mt19937_64 rng(kFrameSeed);
  std::size_t mismatches = 0, relations = 0, points = 0;
  for (std::size_t i = 0; i < kFrameScenarios; ++i) {
    auto l = test::build(random_scenario(rng));
    const auto& sys = *l.system;
    points += sys.point_count();
    const std::size_t n = sys.n_robots();
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      std::vector<std::size_t> group;
      for (std::size_t r = 0; r < n; ++r) {
        if (mask & (1u << r)) group.push_back(r);
      }
      const auto oracle = test::refine_partition(sys, group);
      ++relations;
      if (distributed_relation(sys, group) != oracle) ++mismatches;
      if (oracle != test::pairwise_partition(sys, group)) ++mismatches;
      if (group.size() == 1) {
        if (class_partition(sys.classes(group[0])) != oracle) ++mismatches;
        if (sys.class_count(group[0]) != oracle.size()) ++mismatches;
      }
    }
  }
  Outcome o;
  o.detail = std::to_string(kFrameScenarios) + " random scenarios, " + std::to_string(points) +
             " points, " + std::to_string(relations) + " relations, mismatches=" +
             std::to_string(mismatches);
  o.pass = mismatches == 0;
  return o;
}

// ---- 11 ----
std::map<std::string, std::string> read_reports(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    std::string body = s.str();
    if (e.path().extension() == ".txt") body = strip_header(body);
    out[e.path().filename().string()] = body;
  }
  return out;
}

#ifdef LUMICHECK_BIN
int invoke(const std::string& args) {
  const std::string cmd = std::string(LUMICHECK_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

Outcome determinism_suite() {
  Outcome o;
  std::size_t compared = 0, differing = 0;
  const fs::path root = fs::temp_directory_path() / "lumi_acceptance_determinism";
  fs::remove_all(root);
  const auto names = test::bundled_scenarios();
  for (const auto& name : names) {
    const auto path = test::scenario_path(name);
    std::map<std::string, std::string> runs[3];
#ifdef LUMICHECK_BIN
    const std::string flags[3] = {"--jobs 1", "--jobs 1", "--jobs " + std::to_string(kJobsN)};
    for (int k = 0; k < 3; ++k) {
      const fs::path dir = root / (name + "_" + std::to_string(k));
      invoke(flags[k] + " --out " + dir.string() + " run " + path);
      if (fs::exists(dir)) runs[k] = read_reports(dir);
    }
#else
    for (int k = 0; k < 3; ++k) {
      PipelineOptions opt;
      opt.jobs = k == 2 ? kJobsN : 1;
      runs[k] = run_pipeline(load_scenario(path), Command::Run, opt).reports;
    }
#endif
    ++compared;
    if (runs[0].empty() || runs[0] != runs[1] || runs[0] != runs[2]) {
      ++differing;
      o = fail_with(o, name);
    }
  }
  fs::remove_all(root);
  o.detail = std::to_string(compared) + " scenarios x (2 consecutive --jobs 1, --jobs " +
             std::to_string(kJobsN) + "), differing=" + std::to_string(differing) +
             (o.detail.empty() ? "" : "; " + o.detail);
  o.pass = differing == 0;
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"AC1", "S5 knowledge", s5_suite},
      {"AC2", "region lattice", lattice_suite},
      {"AC3", "liveness sufficiency/necessity", liveness_suite},
      {"AC4", "termination equivalence", termination_suite},
      {"AC5", "communication liveness", comm_liveness_suite},
      {"AC6", "discrete curve catching", curve_catching_suite},
      {"AC7", "surveillance verdict", surveillance_suite},
      {"AC8", "gathering reduction", gathering_suite},
      {"AC9", "trace equivalence", equivalence_suite},
      {"AC10", "frame construction oracle", frame_oracle_suite},
      {"AC11", "determinism", determinism_suite},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.id << " " << c.name << ": " << o.detail << " ("
              << ms << " ms)" << std::endl;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << failed << "/" << std::size(criteria)
            << " criteria failed" << std::endl;
  return failed ? 1 : 0;
}
