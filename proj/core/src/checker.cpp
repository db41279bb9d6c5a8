#include "lumi/checker.hpp"

#include <algorithm>
#include <unordered_map>

namespace lumi {

const char* tri_name(Tri v) {
  switch (v) {
    case Tri::False: return "FALSE";
    case Tri::True: return "TRUE";
    case Tri::Unknown: return "UNKNOWN";
  }
  return "?";
}

Tri tri_not(Tri a) {
  if (a == Tri::Unknown) return a;
  return a == Tri::True ? Tri::False : Tri::True;
}

Tri tri_and(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
  return Tri::True;
}

Tri tri_or(Tri a, Tri b) { return tri_not(tri_and(tri_not(a), tri_not(b))); }

std::string point_name(const InterpretedSystem& sys, std::size_t point) {
  return "run " + std::to_string(sys.run_of(point)) + " t=" + std::to_string(sys.time_of(point));
}

Checker::Checker(const InterpretedSystem& sys, std::size_t max_witnesses)
    : sys_(sys), max_witnesses_(max_witnesses) {}

const std::vector<Tri>& Checker::label(const Formula& f) {
  const std::string key = f.to_string();
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  auto labels = compute(f);
  return memo_.emplace(key, std::move(labels)).first->second;
}

namespace {

std::vector<Tri> knowledge(const std::vector<std::uint32_t>& ids, const std::vector<Tri>& inner) {
  std::unordered_map<std::uint32_t, Tri> fold;
  for (std::size_t p = 0; p < ids.size(); ++p) {
    auto [it, fresh] = fold.emplace(ids[p], inner[p]);
    if (!fresh) it->second = tri_and(it->second, inner[p]);
  }
  std::vector<Tri> out(ids.size());
  for (std::size_t p = 0; p < ids.size(); ++p) out[p] = fold[ids[p]];
  return out;
}

}  // namespace

std::vector<Tri> Checker::compute(const Formula& f) {
  const std::size_t n = sys_.point_count();
  std::vector<Tri> out(n, Tri::False);
  switch (f.op()) {
    case Op::Atom: {
      const Truth& t = sys_.truth(f.atom_value());
      for (std::size_t p = 0; p < n; ++p) out[p] = t[p] ? Tri::True : Tri::False;
      return out;
    }
    case Op::Not: {
      const auto& a = label(f.left());
      for (std::size_t p = 0; p < n; ++p) out[p] = tri_not(a[p]);
      return out;
    }
    case Op::And: {
      const auto a = label(f.left());
      const auto& b = label(f.right());
      for (std::size_t p = 0; p < n; ++p) out[p] = tri_and(a[p], b[p]);
      return out;
    }
    case Op::Know: {
      if (f.robot() >= sys_.n_robots()) throw InputError("formula mentions an unknown robot");
      return knowledge(sys_.classes(f.robot()), label(f.left()));
    }
    case Op::Dist: {
      for (auto r : f.group()) {
        if (r >= sys_.n_robots()) throw InputError("formula mentions an unknown robot");
      }
      const auto ids = sys_.distributed_classes(f.group());
      return knowledge(*ids, label(f.left()));
    }
    case Op::Eventually: {
      const auto& a = label(f.left());
      for (std::size_t r = 0; r < sys_.runs().size(); ++r) {
        const auto& run = sys_.runs()[r];
        const std::size_t T = run.horizon();
        const std::size_t base = sys_.point_id(r, 0);
        if (run.lasso) {
          const std::size_t ls = run.lasso->start;
          Tri loop = Tri::False;
          for (std::size_t t = ls; t <= T; ++t) loop = tri_or(loop, a[base + t]);
          for (std::size_t t = ls; t <= T; ++t) out[base + t] = loop;
          for (std::size_t t = ls; t-- > 0;) out[base + t] = tri_or(a[base + t], out[base + t + 1]);
        } else {
          out[base + T] = tri_or(a[base + T], Tri::Unknown);
          for (std::size_t t = T; t-- > 0;) out[base + t] = tri_or(a[base + t], out[base + t + 1]);
        }
      }
      return out;
    }
  }
  return out;
}

Verdict Checker::eval(std::size_t point, const Formula& f) {
  if (point >= sys_.point_count()) throw ModelError("point outside the system");
  Verdict v;
  v.value = label(f)[point];
  if (f.op() == Op::Eventually && v.value == Tri::True) {
    const auto& a = label(f.left());
    const std::size_t r = sys_.run_of(point);
    const auto& run = sys_.runs()[r];
    const std::size_t base = sys_.point_id(r, 0);
    std::vector<std::size_t> order;
    for (std::size_t t = sys_.time_of(point); t <= run.horizon(); ++t) order.push_back(t);
    if (run.lasso) {
      for (std::size_t t = run.lasso->start; t < sys_.time_of(point); ++t) order.push_back(t);
    }
    for (auto t : order) {
      if (a[base + t] == Tri::True) {
        v.witnesses.push_back(base + t);
        break;
      }
    }
    v.witness_total = v.witnesses.size();
  }
  return v;
}

Verdict Checker::valid(const Formula& f) {
  const auto& l = label(f);
  Verdict v;
  std::vector<std::size_t> unknown;
  std::size_t unknown_total = 0;
  for (std::size_t p = 0; p < l.size(); ++p) {
    if (l[p] == Tri::False) {
      v.value = Tri::False;
      if (v.witnesses.size() < max_witnesses_) v.witnesses.push_back(p);
      ++v.witness_total;
    } else if (l[p] == Tri::Unknown) {
      if (unknown.size() < max_witnesses_) unknown.push_back(p);
      ++unknown_total;
    }
  }
  if (v.value != Tri::False && unknown_total > 0) {
    v.value = Tri::Unknown;
    v.witnesses = std::move(unknown);
    v.witness_total = unknown_total;
  }
  return v;
}

Verdict Checker::initially(const Formula& f) {
  const auto& l = label(f);
  Verdict v;
  std::vector<std::size_t> unknown;
  std::size_t unknown_total = 0;
  for (std::size_t r = 0; r < sys_.runs().size(); ++r) {
    const std::size_t p = sys_.point_id(r, 0);
    if (l[p] == Tri::False) {
      v.value = Tri::False;
      if (v.witnesses.size() < max_witnesses_) v.witnesses.push_back(p);
      ++v.witness_total;
    } else if (l[p] == Tri::Unknown) {
      if (unknown.size() < max_witnesses_) unknown.push_back(p);
      ++unknown_total;
    }
  }
  if (v.value != Tri::False && unknown_total > 0) {
    v.value = Tri::Unknown;
    v.witnesses = std::move(unknown);
    v.witness_total = unknown_total;
  }
  return v;
}

Tri Checker::at_start(std::size_t run, const Formula& f) { return label(f)[sys_.point_id(run, 0)]; }

}  // namespace lumi
