#pragma once

// Three-valued model checking over a finite interpreted system. Closed
// runs are evaluated on their lasso unrolling; on open runs a pending
// eventuality is UNKNOWN rather than FALSE.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "lumi/formula.hpp"
#include "lumi/runs.hpp"

namespace lumi {

enum class Tri : std::uint8_t { False = 0, True = 1, Unknown = 2 };

const char* tri_name(Tri v);
Tri tri_not(Tri a);
Tri tri_and(Tri a, Tri b);
Tri tri_or(Tri a, Tri b);

struct Verdict {
  Tri value = Tri::True;
  // Points backing the verdict: FALSE/UNKNOWN points for validity,
  // the satisfying point for an eventuality.
  std::vector<std::size_t> witnesses;
  std::size_t witness_total = 0;  // before truncation
};

// Not thread-safe: memoisation is per checker instance.
class Checker {
 public:
  explicit Checker(const InterpretedSystem& sys, std::size_t max_witnesses = 16);

  /// Label of every point, memoised per subformula.
  const std::vector<Tri>& label(const Formula& f);

  Verdict eval(std::size_t point, const Formula& f);
  /// Conjunction over all points.
  Verdict valid(const Formula& f);
  /// Conjunction over the initial point of every run.
  Verdict initially(const Formula& f);

  /// Verdict of `f` at time 0 of one run.
  Tri at_start(std::size_t run, const Formula& f);

  const InterpretedSystem& system() const { return sys_; }

 private:
  std::vector<Tri> compute(const Formula& f);

  const InterpretedSystem& sys_;
  std::size_t max_witnesses_;
  std::map<std::string, std::vector<Tri>> memo_;
};

/// Formats a point as "run 3 t=7".
std::string point_name(const InterpretedSystem& sys, std::size_t point);

}  // namespace lumi
