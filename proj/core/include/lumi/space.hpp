#pragma once

// Discretized exploration space: a k-dimensional grid of cells inside
// [0,1]^k, regions as cell sets, and space-time cylinder regions.
//
// Every cell set counts as an open set, so the space statements sp(U)
// form a finite join-lattice under cell-set containment.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lumi {

using CellId = std::uint32_t;

/// Grids are capped at 64 cells so a region fits one machine word.
inline constexpr std::size_t kMaxCells = 64;

/// Tolerance used for every "within radius" comparison.
inline constexpr double kDistanceTolerance = 1e-9;

class Grid {
 public:
  Grid() = default;
  Grid(int dim, int cells_per_axis);

  int dim() const { return dim_; }
  int cells_per_axis() const { return n_; }
  std::size_t cell_count() const { return count_; }
  double cell_width() const { return 1.0 / n_; }

  // Axis 0 varies fastest in the cell index.
  std::vector<int> coords(CellId cell) const;
  CellId index(std::span<const int> coords) const;
  std::vector<double> center(CellId cell) const;

  double distance(CellId a, CellId b) const;
  std::vector<CellId> neighbors(CellId cell) const;

  // Cell whose closed box contains the point; coordinates outside [0,1]
  // are clamped first.
  CellId locate(std::span<const double> point) const;

  bool contains(CellId cell) const { return cell < count_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int dim_ = 0;
  int n_ = 0;
  std::size_t count_ = 0;
};

class Region {
 public:
  Region() = default;
  explicit Region(Grid grid, std::uint64_t bits = 0);
  Region(Grid grid, std::span<const CellId> cells);
  Region(Grid grid, std::initializer_list<CellId> cells);

  static Region empty(const Grid& grid) { return Region(grid); }
  static Region full(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::uint64_t bits() const { return bits_; }

  bool contains(CellId cell) const {
    return cell < kMaxCells && ((bits_ >> cell) & 1u);
  }
  bool is_empty() const { return bits_ == 0; }
  bool is_full() const;
  std::size_t size() const;
  std::vector<CellId> cells() const;

  Region& insert(CellId cell);
  Region& erase(CellId cell);

  /// Sorted cell list, e.g. "{0,2,3}".
  std::string to_string() const;

  friend bool operator==(const Region&, const Region&) = default;

 private:
  Grid grid_;
  std::uint64_t bits_ = 0;
};

// Lattice operations. All throw DimensionError on a grid mismatch.
bool region_leq(const Region& u, const Region& v);
Region region_join(const Region& u, const Region& v);
Region region_meet(const Region& u, const Region& v);
Region region_minus(const Region& u, const Region& v);

/// True iff the union of the cover is the whole grid.
bool cover_is_full(const Grid& grid, std::span<const Region> cover);

/// Cells inside U with a neighbour outside, plus cells outside U with a
/// neighbour inside. The outer edge of the grid is not a boundary.
Region boundary_cells(const Region& u);

/// All cells whose centre lies within `radius` of a boundary cell centre.
Region ball_around_boundary(const Region& u, double radius);

/// Region of all cells whose centre lies within `radius` of `cell`'s centre.
Region ball_around_cell(const Grid& grid, CellId cell, double radius);

/// A set of (cell, level) pairs in the space-time cylinder X x [0, levels).
class CylinderRegion {
 public:
  CylinderRegion() = default;
  CylinderRegion(Grid grid, std::size_t levels);

  const Grid& grid() const { return grid_; }
  std::size_t levels() const { return levels_.size(); }

  bool contains(CellId cell, std::size_t level) const;
  void insert(CellId cell, std::size_t level);
  void erase(CellId cell, std::size_t level);
  void add_level(std::size_t level, const Region& region);

  Region level(std::size_t level) const;
  bool is_empty() const;
  std::size_t size() const;

  /// Cell-wise containment; level counts must match.
  bool subset_of(const CylinderRegion& other) const;

  std::string to_string() const;

  friend bool operator==(const CylinderRegion&, const CylinderRegion&) = default;

 private:
  Grid grid_;
  std::vector<std::uint64_t> levels_;
};

}  // namespace lumi
