#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "lumi/space.hpp"

namespace lumi {

enum class AtomKind : std::uint8_t { Sp, Found, Secure, Pos, InitPos, In };

const char* atom_kind_name(AtomKind kind);

struct Atom {
  AtomKind kind = AtomKind::Sp;
  std::string region_name;        // as written; Sp and In
  std::optional<Region> region;   // resolved cell region; Sp and In
  bool cylinder = false;          // Sp over a named cylinder region
  std::size_t robot = 0;          // Pos and InitPos, 0-based
  CellId cell = 0;                // Pos, InitPos and In

  /// Canonical identity: regions compare by content, not by name.
  std::string key() const;
  /// Concrete syntax, e.g. "pos[r1](c3)".
  std::string to_string() const;

  friend bool operator==(const Atom& a, const Atom& b) { return a.key() == b.key(); }
};

/// Names a formula may refer to.
struct AtomCatalog {
  Grid grid;
  std::size_t n_robots = 1;
  std::map<std::string, Region> regions;
  std::map<std::string, CylinderRegion> cylinders;

  /// Reserved names UX (whole grid) and UEMPTY (empty region) always resolve.
  std::optional<Region> find_region(const std::string& name) const;
};

}  // namespace lumi
