#include "lumi/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "lumi/errors.hpp"
#include "lumi/formula.hpp"

namespace lumi {

namespace {

using json = nlohmann::json;

class Reader {
 public:
  Reader(const json& j, std::string where, std::string origin)
      : j_(j), where_(std::move(where)), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw InputError(origin_ + ": " + (where_.empty() ? "/" : where_) + ": " + msg);
  }

  void expect_object() const {
    if (!j_.is_object()) fail("expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    expect_object();
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!ok.count(it.key())) Reader(it.value(), where_ + "/" + it.key(), origin_).fail("unknown key");
    }
  }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }
  Reader at(const std::string& key) const {
    if (!has(key.c_str())) fail("missing key " + key);
    return Reader(j_.at(key), where_ + "/" + key, origin_);
  }
  Reader at(std::size_t i) const {
    return Reader(j_.at(i), where_ + "/" + std::to_string(i), origin_);
  }
  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }
  const json& raw() const { return j_; }

  std::string str() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  double num() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  std::size_t count() const {
    if (!j_.is_number_integer() || j_.get<long long>() < 0) fail("expected a non-negative integer");
    return j_.get<std::size_t>();
  }
  bool flag() const {
    if (!j_.is_boolean()) fail("expected true or false");
    return j_.get<bool>();
  }
  std::vector<double> nums() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).num());
    return out;
  }
  std::vector<std::vector<double>> matrix() const {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(at(i).nums());
    return out;
  }

  std::string str_or(const char* key, std::string dflt) const { return has(key) ? at(key).str() : dflt; }
  double num_or(const char* key, double dflt) const { return has(key) ? at(key).num() : dflt; }
  std::size_t count_or(const char* key, std::size_t dflt) const {
    return has(key) ? at(key).count() : dflt;
  }
  bool flag_or(const char* key, bool dflt) const { return has(key) ? at(key).flag() : dflt; }

  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  std::string origin_;
};

std::vector<CellId> read_cells(const Reader& r, const Grid& grid) {
  std::vector<CellId> out;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto c = r.at(i).count();
    if (c >= grid.cell_count()) r.at(i).fail("cell " + std::to_string(c) + " outside the grid");
    out.push_back(c);
  }
  return out;
}

Capabilities read_caps(const Reader& r) {
  r.allow({"visibility", "radius", "movement", "min_distance", "memory", "communication",
           "synchrony", "k", "sensor_radius"});
  Capabilities caps;
  const auto vis = r.str_or("visibility", "full");
  if (vis == "full") {
    caps.visibility = Capabilities::Visibility::Full;
  } else if (vis == "myopic") {
    caps.visibility = Capabilities::Visibility::Myopic;
  } else {
    r.at("visibility").fail("expected full or myopic");
  }
  caps.visibility_radius = r.num_or("radius", 0.0);
  const auto mov = r.str_or("movement", "rigid");
  if (mov == "rigid") {
    caps.movement = Capabilities::Movement::Rigid;
  } else if (mov == "non_rigid") {
    caps.movement = Capabilities::Movement::NonRigid;
  } else {
    r.at("movement").fail("expected rigid or non_rigid");
  }
  caps.min_distance = r.num_or("min_distance", 1.0);
  const auto mem = r.str_or("memory", "luminous");
  if (mem == "luminous") {
    caps.memory = Capabilities::Memory::Luminous;
  } else if (mem == "oblivious") {
    caps.memory = Capabilities::Memory::Oblivious;
  } else {
    r.at("memory").fail("expected luminous or oblivious");
  }
  const auto com = r.str_or("communication", "luminous");
  if (com == "luminous") {
    caps.communication = Capabilities::Communication::Luminous;
  } else if (com == "silent") {
    caps.communication = Capabilities::Communication::Silent;
  } else {
    r.at("communication").fail("expected luminous or silent");
  }
  const auto syn = r.str_or("synchrony", "FSYNC");
  const auto k = static_cast<std::uint32_t>(r.count_or("k", 1));
  if (syn == "FSYNC") {
    caps.synchrony = Synchrony::fsync();
  } else if (syn == "SSYNC") {
    caps.synchrony = Synchrony::ssync();
  } else if (syn == "ASYNC") {
    caps.synchrony = Synchrony::k_async(k);
  } else {
    r.at("synchrony").fail("expected FSYNC, SSYNC or ASYNC");
  }
  caps.sensor_radius = r.num_or("sensor_radius", 0.0);
  try {
    caps.validate();
  } catch (const ModelError& e) {
    r.fail(e.what());
  }
  return caps;
}

ExplicitTables read_tables(const Reader& r, const Grid& grid, std::size_t n_robots) {
  r.allow({"states", "observations", "obs_of_cell", "step", "control", "light", "light_count",
           "initial", "oblivious"});
  ExplicitTables t;
  std::map<std::string, std::size_t> state_idx, obs_idx;
  const auto states = r.at("states");
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto s = states.at(i).str();
    if (!state_idx.emplace(s, i).second) states.at(i).fail("duplicate state " + s);
    t.states.push_back(s);
  }
  const auto obs = r.at("observations");
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const auto s = obs.at(i).str();
    if (!obs_idx.emplace(s, i).second) obs.at(i).fail("duplicate observation " + s);
    t.observations.push_back(s);
  }
  auto state_of = [&](const Reader& v) {
    auto it = state_idx.find(v.str());
    if (it == state_idx.end()) v.fail("unknown state " + v.str());
    return it->second;
  };
  const auto cells = r.at("obs_of_cell");
  if (cells.size() != grid.cell_count()) cells.fail("needs one entry per cell");
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto v = cells.at(c);
    if (v.raw().is_null()) {
      t.obs_of_cell.push_back(std::nullopt);
      continue;
    }
    auto it = obs_idx.find(v.str());
    if (it == obs_idx.end()) v.fail("unknown observation " + v.str());
    t.obs_of_cell.push_back(it->second);
  }
  t.step.assign(t.states.size(), std::vector<std::optional<std::size_t>>(t.observations.size()));
  const auto step = r.at("step");
  step.expect_object();
  for (auto it = step.raw().begin(); it != step.raw().end(); ++it) {
    auto si = state_idx.find(it.key());
    if (si == state_idx.end()) step.at(it.key()).fail("unknown state " + it.key());
    const auto rr = step.at(it.key());
    rr.expect_object();
    for (auto jt = rr.raw().begin(); jt != rr.raw().end(); ++jt) {
      auto oi = obs_idx.find(jt.key());
      if (oi == obs_idx.end()) rr.at(jt.key()).fail("unknown observation " + jt.key());
      t.step[si->second][oi->second] = state_of(rr.at(jt.key()));
    }
  }
  t.control.assign(t.states.size(), std::nullopt);
  t.light_count = r.count_or("light_count", 1);
  if (t.light_count == 0) r.at("light_count").fail("must be positive");
  t.light.assign(t.states.size(), std::nullopt);
  if (r.has("control")) {
    const auto ctl = r.at("control");
    ctl.expect_object();
    for (auto it = ctl.raw().begin(); it != ctl.raw().end(); ++it) {
      const auto v = ctl.at(it.key());
      auto si = state_idx.find(it.key());
      if (si == state_idx.end()) v.fail("unknown state " + it.key());
      if (!delta_from_name(grid.dim(), v.str())) v.fail("unknown move " + v.str());
      t.control[si->second] = v.str();
    }
  }
  if (r.has("light")) {
    const auto lt = r.at("light");
    lt.expect_object();
    for (auto it = lt.raw().begin(); it != lt.raw().end(); ++it) {
      const auto v = lt.at(it.key());
      auto si = state_idx.find(it.key());
      if (si == state_idx.end()) v.fail("unknown state " + it.key());
      t.light[si->second] = v.count();
    }
  } else {
    for (auto& l : t.light) l = 0;
  }
  const auto init = r.at("initial");
  if (init.size() != n_robots) init.fail("needs one initial state per robot");
  for (std::size_t i = 0; i < init.size(); ++i) t.initial.push_back(state_of(init.at(i)));
  t.oblivious = r.flag_or("oblivious", false);
  return t;
}

void read_protocol(const Reader& r, Scenario& s) {
  r.allow({"name", "broadcast", "mutation", "tables"});
  const auto name = r.at("name").str();
  const auto p = protocol_from_name(name);
  if (!p) r.at("name").fail("unknown protocol " + name);
  s.protocol = *p;
  const auto b = r.str_or("broadcast", "always");
  if (b == "always") {
    s.options.broadcast = ProtocolOptions::Broadcast::Always;
  } else if (b == "on_complete") {
    s.options.broadcast = ProtocolOptions::Broadcast::OnComplete;
  } else {
    r.at("broadcast").fail("expected always or on_complete");
  }
  const auto m = r.str_or("mutation", "none");
  if (m == "none") {
    s.options.mutation = ProtocolOptions::Mutation::None;
  } else if (m == "oscillate") {
    s.options.mutation = ProtocolOptions::Mutation::Oscillate;
  } else if (m == "jump2") {
    s.options.mutation = ProtocolOptions::Mutation::Jump2;
  } else {
    r.at("mutation").fail("expected none, oscillate or jump2");
  }
  if (s.protocol == Protocol::Explicit) {
    s.tables = read_tables(r.at("tables"), s.grid, s.n_robots);
  } else if (r.has("tables")) {
    r.at("tables").fail("tables are only read for the EXPLICIT protocol");
  }
}

void read_initial(const Reader& r, Scenario& s) {
  if (r.raw().is_string()) {
    const auto mode = r.str();
    if (mode != "all" && mode != "distinct") r.fail("expected a list, \"all\" or \"distinct\"");
    std::vector<CellId> cur(s.n_robots, 0);
    const std::size_t cells = s.grid.cell_count();
    while (true) {
      std::set<CellId> uniq(cur.begin(), cur.end());
      if (mode == "all" || uniq.size() == cur.size()) s.initial.push_back(cur);
      std::size_t i = 0;
      while (i < cur.size() && ++cur[i] == cells) cur[i++] = 0;
      if (i == cur.size()) break;
    }
    std::sort(s.initial.begin(), s.initial.end());
    return;
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto placement = r.at(i);
    if (placement.size() != s.n_robots) placement.fail("needs one cell per robot");
    s.initial.push_back(read_cells(placement, s.grid));
  }
  if (s.initial.empty()) r.fail("needs at least one placement");
}

void read_scheduler(const Reader& r, Scenario& s) {
  r.allow({"horizon", "fairness_bound", "cap", "run_cap", "instantaneous_moves", "pre_move_look",
           "paths"});
  s.schedule.n_robots = s.n_robots;
  s.schedule.synchrony = s.caps.synchrony;
  s.schedule.horizon = r.count_or("horizon", 4);
  s.schedule.fairness_bound = r.count_or("fairness_bound", 1);
  s.schedule.cap = r.count_or("cap", 100000);
  s.schedule.instantaneous_moves = r.flag_or("instantaneous_moves", false);
  s.pre_move_look = r.flag_or("pre_move_look", false);
  s.run_cap = r.count_or("run_cap", 100000);
  if (r.has("paths")) {
    const auto paths = r.at("paths");
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const auto p = paths.at(i);
      std::vector<std::vector<std::size_t>> sets;
      for (std::size_t k = 0; k < p.size(); ++k) {
        std::vector<std::size_t> set;
        const auto step = p.at(k);
        for (std::size_t j = 0; j < step.size(); ++j) {
          const auto robot = step.at(j).count();
          if (robot < 1 || robot > s.n_robots) step.at(j).fail("robots are numbered from 1");
          set.push_back(robot - 1);
        }
        sets.push_back(std::move(set));
      }
      try {
        TimePath tp = TimePath::from_sets(s.n_robots, sets, s.schedule.instantaneous_moves);
        const auto bad = validate_path(tp);
        if (!bad.empty()) p.fail(bad.front().kind + ": " + bad.front().detail);
        s.paths.push_back(std::move(tp));
      } catch (const ModelError& e) {
        p.fail(e.what());
      }
    }
  }
}

void read_regions(const Reader& r, Scenario& s) {
  r.expect_object();
  for (auto it = r.raw().begin(); it != r.raw().end(); ++it) {
    const std::string& name = it.key();
    const auto v = r.at(name);
    if (name == "UX" || name == "UEMPTY") v.fail("region name " + name + " is reserved");
    if (v.raw().is_array()) {
      s.catalog.regions.emplace(name, Region(s.grid, read_cells(v, s.grid)));
      continue;
    }
    v.allow({"levels"});
    const auto levels = v.at("levels");
    CylinderRegion cyl(s.grid, levels.size());
    for (std::size_t l = 0; l < levels.size(); ++l) {
      for (CellId c : read_cells(levels.at(l), s.grid)) cyl.insert(c, l);
    }
    s.catalog.cylinders.emplace(name, cyl);
  }
}

void read_task(const Reader& r, Scenario& s) {
  r.allow({"kind", "checks", "speed", "levels", "max_paths", "rendezvous"});
  const auto kind = r.at("kind").str();
  if (kind == "exploration") {
    s.task.kind = TaskSpec::Kind::Exploration;
  } else if (kind == "surveillance") {
    s.task.kind = TaskSpec::Kind::Surveillance;
  } else if (kind == "gathering") {
    s.task.kind = TaskSpec::Kind::Gathering;
  } else if (kind == "none") {
    s.task.kind = TaskSpec::Kind::None;
  } else {
    r.at("kind").fail("expected exploration, surveillance, gathering or none");
  }
  if (r.has("checks")) {
    const auto c = r.at("checks");
    for (std::size_t i = 0; i < c.size(); ++i) s.task.checks.push_back(c.at(i).str());
  }
  s.task.surveillance.speed = r.num_or("speed", 1.0);
  s.task.surveillance.levels = r.count_or("levels", s.schedule.horizon);
  s.task.surveillance.max_paths = r.count_or("max_paths", 100000);
  if (r.has("rendezvous")) {
    const auto rv = r.at("rendezvous");
    for (std::size_t i = 0; i < rv.size(); ++i) s.task.rendezvous.push_back(rv.at(i).str());
  }
}

void read_hybrid(const Reader& r, Scenario& s) {
  r.allow({"field", "substeps", "speed_cap", "A", "B", "c", "samples"});
  HybridSpec h;
  const auto name = r.str_or("field", "walker");
  const auto kind = field_kind_from_name(name);
  if (!kind) r.at("field").fail("unknown field " + name);
  h.field.kind = *kind;
  h.field.speed_cap = r.num_or("speed_cap", 1.0);
  if (r.has("A")) h.field.A = r.at("A").matrix();
  if (r.has("B")) h.field.B = r.at("B").matrix();
  if (r.has("c")) h.field.c = r.at("c").nums();
  h.options.substeps = r.count_or("substeps", 64);
  h.samples_per_axis = r.count_or("samples", 3);
  try {
    h.field.validate(s.grid.dim());
  } catch (const InputError& e) {
    r.fail(e.what());
  }
  s.hybrid = h;
}

const std::set<std::string>& known_checks(TaskSpec::Kind kind) {
  static const std::set<std::string> none;
  static const std::set<std::string> exploration{"agency",      "independence", "stability",
                                                 "recall",      "liveness",     "PARALLEL",
                                                 "SELFISH",     "COOPERATIVE",  "comm-liveness"};
  static const std::set<std::string> surveillance{"SURVEILLANCE", "PARALLEL", "SELFISH",
                                                  "COOPERATIVE"};
  static const std::set<std::string> gathering{"eventual_gathering", "starting_validity",
                                               "agreement", "validity"};
  switch (kind) {
    case TaskSpec::Kind::Exploration: return exploration;
    case TaskSpec::Kind::Surveillance: return surveillance;
    case TaskSpec::Kind::Gathering: return gathering;
    case TaskSpec::Kind::None: return none;
  }
  return none;
}

}  // namespace

const char* task_kind_name(TaskSpec::Kind kind) {
  switch (kind) {
    case TaskSpec::Kind::None: return "none";
    case TaskSpec::Kind::Exploration: return "exploration";
    case TaskSpec::Kind::Surveillance: return "surveillance";
    case TaskSpec::Kind::Gathering: return "gathering";
  }
  return "?";
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(origin + ": byte " + std::to_string(e.byte) + ": malformed JSON: " + e.what());
  }
  const Reader r(doc, "", origin);
  r.allow({"format_version", "name", "grid", "robots", "capabilities", "protocol", "initial",
           "scheduler", "regions", "task", "formulas", "hybrid"});
  const auto version = r.at("format_version").count();
  if (version != static_cast<std::size_t>(kScenarioFormatVersion)) {
    r.at("format_version").fail("unsupported version " + std::to_string(version));
  }
  Scenario s;
  s.origin = origin;
  s.name = r.str_or("name", "");
  {
    const auto g = r.at("grid");
    g.allow({"dim", "cells_per_axis"});
    try {
      s.grid = Grid(static_cast<int>(g.at("dim").count()), static_cast<int>(g.at("cells_per_axis").count()));
    } catch (const std::exception& e) {
      g.fail(e.what());
    }
  }
  s.n_robots = r.at("robots").count();
  if (s.n_robots == 0) r.at("robots").fail("needs at least one robot");
  s.caps = r.has("capabilities") ? read_caps(r.at("capabilities")) : Capabilities{};
  read_protocol(r.at("protocol"), s);
  read_initial(r.at("initial"), s);
  if (r.has("scheduler")) {
    read_scheduler(r.at("scheduler"), s);
  } else {
    read_scheduler(Reader(json::object(), "/scheduler", origin), s);
  }
  s.catalog.grid = s.grid;
  s.catalog.n_robots = s.n_robots;
  if (r.has("regions")) read_regions(r.at("regions"), s);
  if (r.has("task")) read_task(r.at("task"), s);
  if (r.has("formulas")) {
    const auto f = r.at("formulas");
    for (std::size_t i = 0; i < f.size(); ++i) s.formulas.push_back(f.at(i).str());
  }
  if (r.has("hybrid")) read_hybrid(r.at("hybrid"), s);
  validate_scenario(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open scenario");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

void validate_scenario(const Scenario& s) {
  const std::string& o = s.origin;
  if (s.schedule.horizon == 0) throw InputError(o + ": /scheduler/horizon: must be positive");
  if (s.schedule.cap == 0) throw InputError(o + ": /scheduler/cap: must be positive");
  if (s.run_cap == 0) throw InputError(o + ": /scheduler/run_cap: must be positive");
  if (s.schedule.fairness_bound == 0) throw InputError(o + ": /scheduler/fairness_bound: must be positive");
  for (std::size_t i = 0; i < s.initial.size(); ++i) {
    if (s.initial[i].size() != s.n_robots) {
      throw InputError(o + ": /initial/" + std::to_string(i) + ": needs one cell per robot");
    }
  }
  for (std::size_t i = 0; i < s.formulas.size(); ++i) {
    try {
      parse_formula(s.formulas[i], s.catalog);
    } catch (const ParseError& e) {
      throw InputError(o + ": /formulas/" + std::to_string(i) + ": offset " +
                       std::to_string(e.offset()) + ": " + e.what());
    }
  }
  const auto& known = known_checks(s.task.kind);
  for (const auto& c : s.task.checks) {
    if (!known.count(c)) {
      throw InputError(o + ": /task/checks: unknown check " + c + " for task " +
                       task_kind_name(s.task.kind));
    }
  }
  if (s.task.kind == TaskSpec::Kind::Gathering || s.protocol == Protocol::GatherMinRegion) {
    if (s.task.rendezvous.empty()) throw InputError(o + ": /task/rendezvous: needs at least one region");
    std::vector<Region> regions;
    for (const auto& n : s.task.rendezvous) {
      auto r = s.catalog.find_region(n);
      if (!r) throw InputError(o + ": /task/rendezvous: unknown region " + n);
      regions.push_back(*r);
    }
    try {
      require_disjoint(regions);
    } catch (const InputError& e) {
      throw InputError(o + ": /task/rendezvous: " + e.what());
    }
  }
  if (s.task.kind == TaskSpec::Kind::Surveillance) {
    if (s.task.surveillance.levels == 0) throw InputError(o + ": /task/levels: must be positive");
    if (s.task.surveillance.speed < 0.0) throw InputError(o + ": /task/speed: must be >= 0");
    for (const auto& [name, cyl] : s.catalog.cylinders) {
      if (cyl.levels() != s.task.surveillance.levels) {
        throw InputError(o + ": /regions/" + name + ": level count differs from /task/levels");
      }
    }
  }
  if (s.hybrid && s.hybrid->options.substeps == 0) {
    throw InputError(o + ": /hybrid/substeps: must be positive");
  }
}

MachinePair build_machines(const Scenario& s) {
  if (s.protocol == Protocol::Explicit) {
    if (!s.tables) throw InputError(s.origin + ": /protocol/tables: missing");
    return make_explicit_machine(s.grid, s.caps, s.n_robots, *s.tables);
  }
  ProtocolOptions opts = s.options;
  opts.rendezvous.clear();
  for (const auto& n : s.task.rendezvous) {
    auto r = s.catalog.find_region(n);
    if (r) opts.rendezvous.push_back(*r);
  }
  return make_grid_walker(s.grid, s.caps, s.protocol, s.n_robots, opts);
}

std::vector<TimePath> scenario_schedules(const Scenario& s) {
  if (!s.paths.empty()) return s.paths;
  ScheduleSpec spec = s.schedule;
  spec.n_robots = s.n_robots;
  spec.synchrony = s.caps.synchrony;
  return gen_schedules(spec);
}

}  // namespace lumi
