#include "oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>

namespace lumi::test {

namespace {

bool same_view(const InterpretedSystem& sys, std::size_t p, std::size_t q,
               const std::vector<std::size_t>& group) {
  const auto& a = sys.config(p).robots;
  const auto& b = sys.config(q).robots;
  for (auto r : group) {
    if (a[r].e != b[r].e) return false;
  }
  return true;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

Partition normalise(Partition blocks) {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end());
  return blocks;
}

Tri t_and(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
  return Tri::True;
}

Tri t_or(Tri a, Tri b) {
  if (a == Tri::True || b == Tri::True) return Tri::True;
  if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
  return Tri::False;
}

}  // namespace

Partition pairwise_partition(const InterpretedSystem& sys, const std::vector<std::size_t>& group) {
  const std::size_t n = sys.point_count();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      if (same_view(sys, p, q, group)) parent[find_root(parent, q)] = find_root(parent, p);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> blocks;
  for (std::size_t p = 0; p < n; ++p) blocks[find_root(parent, p)].push_back(p);
  Partition out;
  for (auto& [root, b] : blocks) out.push_back(std::move(b));
  return normalise(std::move(out));
}

Partition refine_partition(const InterpretedSystem& sys, const std::vector<std::size_t>& group) {
  std::vector<std::size_t> all(sys.point_count());
  std::iota(all.begin(), all.end(), 0);
  Partition blocks{all};
  for (auto r : group) {
    Partition next;
    for (const auto& b : blocks) {
      std::map<StateId, std::vector<std::size_t>> split;
      for (auto p : b) split[sys.config(p).robots[r].e].push_back(p);
      for (auto& [e, part] : split) next.push_back(std::move(part));
    }
    blocks = std::move(next);
  }
  return normalise(std::move(blocks));
}

std::vector<Tri> naive_labels(const InterpretedSystem& sys, const Formula& f) {
  const std::size_t n = sys.point_count();
  std::vector<Tri> out(n, Tri::False);
  switch (f.op()) {
    case Op::Atom: {
      const auto& t = sys.truth(f.atom_value());
      for (std::size_t p = 0; p < n; ++p) out[p] = t[p] ? Tri::True : Tri::False;
      break;
    }
    case Op::Not: {
      const auto a = naive_labels(sys, f.left());
      for (std::size_t p = 0; p < n; ++p) {
        out[p] = a[p] == Tri::Unknown ? Tri::Unknown : (a[p] == Tri::True ? Tri::False : Tri::True);
      }
      break;
    }
    case Op::And: {
      const auto a = naive_labels(sys, f.left());
      const auto b = naive_labels(sys, f.right());
      for (std::size_t p = 0; p < n; ++p) out[p] = t_and(a[p], b[p]);
      break;
    }
    case Op::Know:
    case Op::Dist: {
      const std::vector<std::size_t> group =
          f.op() == Op::Know ? std::vector<std::size_t>{f.robot()} : f.group();
      const auto a = naive_labels(sys, f.left());
      for (std::size_t p = 0; p < n; ++p) {
        Tri v = Tri::True;
        for (std::size_t q = 0; q < n; ++q) {
          if (same_view(sys, p, q, group)) v = t_and(v, a[q]);
        }
        out[p] = v;
      }
      break;
    }
    case Op::Eventually: {
      const auto a = naive_labels(sys, f.left());
      for (std::size_t p = 0; p < n; ++p) {
        const std::size_t r = sys.run_of(p);
        const std::size_t t = sys.time_of(p);
        const auto& run = sys.runs()[r];
        // Closed runs: from t the loop is reached, so every point from
        // min(t, loop start) on recurs.
        const std::size_t from = run.lasso ? std::min(t, run.lasso->start) : t;
        Tri v = run.lasso ? Tri::False : Tri::Unknown;
        for (std::size_t u = from; u <= run.horizon(); ++u) v = t_or(v, a[sys.point_id(r, u)]);
        out[p] = v;
      }
      break;
    }
  }
  return out;
}

Formula random_formula(std::mt19937_64& rng, const FormulaGen& gen, std::size_t depth) {
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  if (depth <= 1 || pick(5) == 0) return Formula::atom(gen.atoms[pick(gen.atoms.size())]);
  const std::size_t ops = gen.temporal ? 5 : 4;
  switch (pick(ops)) {
    case 0: return Formula::neg(random_formula(rng, gen, depth - 1));
    case 1:
      return Formula::conj(random_formula(rng, gen, depth - 1), random_formula(rng, gen, depth - 1));
    case 2: return Formula::know(pick(gen.n_robots), random_formula(rng, gen, depth - 1));
    case 3: {
      std::vector<std::size_t> group;
      for (std::size_t r = 0; r < gen.n_robots; ++r) {
        if (rng() & 1u) group.push_back(r);
      }
      if (group.empty()) group.push_back(pick(gen.n_robots));
      return Formula::dist(group, random_formula(rng, gen, depth - 1));
    }
    default: return Formula::eventually(random_formula(rng, gen, depth - 1));
  }
}

bool adjacent_or_equal(const Grid& grid, CellId a, CellId b) {
  const auto ca = grid.coords(a);
  const auto cb = grid.coords(b);
  int d = 0;
  for (std::size_t i = 0; i < ca.size(); ++i) d += std::abs(ca[i] - cb[i]);
  return d <= 1;
}

std::vector<IntruderPath> brute_intruder_paths(const Grid& grid, std::size_t levels) {
  std::vector<IntruderPath> out{{}};
  const std::size_t n = grid.cell_count();
  std::size_t total = 1;
  for (std::size_t l = 0; l < levels; ++l) total *= n;
  for (std::size_t k = 0; k < total; ++k) {
    IntruderPath p(levels);
    std::size_t rest = k;
    for (std::size_t l = levels; l-- > 0;) {
      p[l] = static_cast<CellId>(rest % n);
      rest /= n;
    }
    bool ok = true;
    for (std::size_t l = 0; ok && l + 1 < levels; ++l) ok = adjacent_or_equal(grid, p[l], p[l + 1]);
    if (ok) out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::vector<std::size_t>> brute_level_functions(const Grid& grid, std::size_t levels) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t n = grid.cell_count();
  std::vector<std::size_t> g(n, 0);
  while (true) {
    bool ok = true;
    for (CellId a = 0; ok && a < n; ++a) {
      for (CellId b = a + 1; ok && b < n; ++b) {
        if (!adjacent_or_equal(grid, a, b)) continue;
        const auto d = g[a] > g[b] ? g[a] - g[b] : g[b] - g[a];
        ok = d <= 1;
      }
    }
    if (ok) out.push_back(g);
    std::size_t i = 0;
    while (i < n && ++g[i] == levels) g[i++] = 0;
    if (i == n) break;
  }
  return out;
}

bool brute_meets(const IntruderPath& path, const std::vector<std::size_t>& g) {
  for (std::size_t l = 0; l < path.size(); ++l) {
    if (g[path[l]] == l) return true;
    if (l + 1 < path.size() && g[path[l + 1]] == l) return true;
  }
  return false;
}

std::vector<std::vector<std::vector<std::size_t>>> brute_schedule_sets(const ScheduleSpec& spec) {
  const std::size_t n = spec.n_robots;
  const std::size_t steps = spec.horizon * kPhasesPerCycle;
  const std::uint32_t full = (1u << n) - 1;
  std::vector<std::vector<std::vector<std::size_t>>> out;
  std::vector<std::uint32_t> seq(steps, 1);
  auto set_of = [&](std::uint32_t m) {
    std::vector<std::size_t> s;
    for (std::size_t r = 0; r < n; ++r) {
      if (m & (1u << r)) s.push_back(r);
    }
    return s;
  };
  auto accept = [&]() {
    if (n == 1 || spec.synchrony.kind == SynchronyKind::FSync) {
      return std::all_of(seq.begin(), seq.end(), [&](auto m) { return m == full; });
    }
    if (spec.synchrony.kind == SynchronyKind::SSync) {
      for (std::size_t s = 0; s < steps; ++s) {
        if (seq[s] != seq[s - s % kPhasesPerCycle]) return false;
      }
      const std::size_t rounds = spec.horizon;
      for (std::size_t i = 0; i + spec.fairness_bound <= rounds; ++i) {
        std::uint32_t seen = 0;
        for (std::size_t j = i; j < i + spec.fairness_bound; ++j) seen |= seq[j * kPhasesPerCycle];
        if (seen != full) return false;
      }
      return true;
    }
    std::vector<std::uint32_t> clock(n, 0);
    for (std::size_t s = 0; s < steps; ++s) {
      bool move = false, look = false;
      for (std::size_t r = 0; r < n; ++r) {
        if (!(seq[s] & (1u << r))) continue;
        move |= clock[r] % 3 == 0;
        look |= clock[r] % 3 == 1;
        ++clock[r];
      }
      if (spec.instantaneous_moves && move && look) return false;
      const auto [lo, hi] = std::minmax_element(clock.begin(), clock.end());
      if (*hi / 3 - *lo / 3 > spec.synchrony.k) return false;
    }
    const std::size_t window = spec.fairness_bound * kPhasesPerCycle;
    for (std::size_t i = 0; i + window <= steps; ++i) {
      for (std::size_t r = 0; r < n; ++r) {
        std::size_t fired = 0;
        for (std::size_t j = i; j < i + window; ++j) fired += (seq[j] >> r) & 1u;
        if (fired < kPhasesPerCycle) return false;
      }
    }
    return true;
  };
  while (true) {
    if (accept()) {
      std::vector<std::vector<std::size_t>> sets;
      for (auto m : seq) sets.push_back(set_of(m));
      out.push_back(std::move(sets));
    }
    std::size_t i = steps;
    while (i > 0) {
      --i;
      if (seq[i] < full) {
        ++seq[i];
        break;
      }
      seq[i] = 1;
      if (i == 0) return out;
    }
    if (steps == 0) return out;
  }
}

}  // namespace lumi::test
