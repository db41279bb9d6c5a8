#include "lumi/space.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "lumi/errors.hpp"

namespace lumi {

namespace {

void require_same_grid(const Region& u, const Region& v) {
  if (!(u.grid() == v.grid())) {
    throw DimensionError("regions live on different grids");
  }
}

std::uint64_t full_mask(std::size_t count) {
  return count >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << count) - 1);
}

}  // namespace

Grid::Grid(int dim, int cells_per_axis) : dim_(dim), n_(cells_per_axis) {
  if (dim < 1 || cells_per_axis < 1) {
    throw DimensionError("grid needs dim >= 1 and cells_per_axis >= 1");
  }
  std::size_t count = 1;
  for (int i = 0; i < dim; ++i) {
    count *= static_cast<std::size_t>(cells_per_axis);
    if (count > kMaxCells) {
      throw DimensionError("grid exceeds " + std::to_string(kMaxCells) + " cells");
    }
  }
  count_ = count;
}

std::vector<int> Grid::coords(CellId cell) const {
  if (!contains(cell)) throw DimensionError("cell index out of range");
  std::vector<int> out(static_cast<std::size_t>(dim_));
  std::size_t rest = cell;
  for (int a = 0; a < dim_; ++a) {
    out[static_cast<std::size_t>(a)] = static_cast<int>(rest % static_cast<std::size_t>(n_));
    rest /= static_cast<std::size_t>(n_);
  }
  return out;
}

CellId Grid::index(std::span<const int> coords) const {
  if (coords.size() != static_cast<std::size_t>(dim_)) {
    throw DimensionError("coordinate arity does not match grid dimension");
  }
  std::size_t idx = 0;
  std::size_t stride = 1;
  for (int a = 0; a < dim_; ++a) {
    const int c = coords[static_cast<std::size_t>(a)];
    if (c < 0 || c >= n_) throw DimensionError("coordinate outside grid");
    idx += static_cast<std::size_t>(c) * stride;
    stride *= static_cast<std::size_t>(n_);
  }
  return static_cast<CellId>(idx);
}

std::vector<double> Grid::center(CellId cell) const {
  const auto c = coords(cell);
  std::vector<double> out(c.size());
  for (std::size_t a = 0; a < c.size(); ++a) {
    out[a] = (c[a] + 0.5) / n_;
  }
  return out;
}

double Grid::distance(CellId a, CellId b) const {
  const auto ca = coords(a);
  const auto cb = coords(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const double d = static_cast<double>(ca[i] - cb[i]) / n_;
    sum += d * d;
  }
  return std::sqrt(sum);
}

std::vector<CellId> Grid::neighbors(CellId cell) const {
  auto c = coords(cell);
  std::vector<CellId> out;
  for (std::size_t a = 0; a < c.size(); ++a) {
    for (int delta : {-1, 1}) {
      const int v = c[a] + delta;
      if (v < 0 || v >= n_) continue;
      auto nc = c;
      nc[a] = v;
      out.push_back(index(nc));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

CellId Grid::locate(std::span<const double> point) const {
  if (point.size() != static_cast<std::size_t>(dim_)) {
    throw DimensionError("point arity does not match grid dimension");
  }
  std::vector<int> c(point.size());
  for (std::size_t a = 0; a < point.size(); ++a) {
    const double x = std::clamp(point[a], 0.0, 1.0);
    c[a] = std::min(n_ - 1, static_cast<int>(std::floor(x * n_)));
  }
  return index(c);
}

Region::Region(Grid grid, std::uint64_t bits) : grid_(grid), bits_(bits) {
  if (bits_ & ~full_mask(grid_.cell_count())) {
    throw DimensionError("region mentions cells outside its grid");
  }
}

Region::Region(Grid grid, std::span<const CellId> cells) : grid_(grid) {
  for (CellId c : cells) insert(c);
}

Region::Region(Grid grid, std::initializer_list<CellId> cells) : grid_(grid) {
  for (CellId c : cells) insert(c);
}

Region Region::full(const Grid& grid) {
  return Region(grid, full_mask(grid.cell_count()));
}

bool Region::is_full() const { return bits_ == full_mask(grid_.cell_count()); }

std::size_t Region::size() const { return static_cast<std::size_t>(std::popcount(bits_)); }

std::vector<CellId> Region::cells() const {
  std::vector<CellId> out;
  for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
    out.push_back(static_cast<CellId>(std::countr_zero(b)));
  }
  return out;
}

Region& Region::insert(CellId cell) {
  if (!grid_.contains(cell)) throw DimensionError("cell " + std::to_string(cell) + " outside grid");
  bits_ |= std::uint64_t{1} << cell;
  return *this;
}

Region& Region::erase(CellId cell) {
  if (!grid_.contains(cell)) throw DimensionError("cell " + std::to_string(cell) + " outside grid");
  bits_ &= ~(std::uint64_t{1} << cell);
  return *this;
}

std::string Region::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (CellId c : cells()) {
    if (!first) os << ',';
    os << c;
    first = false;
  }
  os << '}';
  return os.str();
}

bool region_leq(const Region& u, const Region& v) {
  require_same_grid(u, v);
  return (u.bits() & ~v.bits()) == 0;
}

Region region_join(const Region& u, const Region& v) {
  require_same_grid(u, v);
  return Region(u.grid(), u.bits() | v.bits());
}

Region region_meet(const Region& u, const Region& v) {
  require_same_grid(u, v);
  return Region(u.grid(), u.bits() & v.bits());
}

Region region_minus(const Region& u, const Region& v) {
  require_same_grid(u, v);
  return Region(u.grid(), u.bits() & ~v.bits());
}

bool cover_is_full(const Grid& grid, std::span<const Region> cover) {
  Region acc = Region::empty(grid);
  for (const auto& u : cover) acc = region_join(acc, u);
  return acc.is_full();
}

Region boundary_cells(const Region& u) {
  const Grid& g = u.grid();
  Region out = Region::empty(g);
  for (CellId c = 0; c < g.cell_count(); ++c) {
    const bool inside = u.contains(c);
    for (CellId nb : g.neighbors(c)) {
      if (u.contains(nb) != inside) {
        out.insert(c);
        break;
      }
    }
  }
  return out;
}

Region ball_around_cell(const Grid& grid, CellId cell, double radius) {
  Region out = Region::empty(grid);
  for (CellId c = 0; c < grid.cell_count(); ++c) {
    if (grid.distance(c, cell) <= radius + kDistanceTolerance) out.insert(c);
  }
  return out;
}

Region ball_around_boundary(const Region& u, double radius) {
  if (radius < 0.0) throw DimensionError("negative radius");
  const Grid& g = u.grid();
  Region out = Region::empty(g);
  for (CellId b : boundary_cells(u).cells()) {
    out = region_join(out, ball_around_cell(g, b, radius));
  }
  return out;
}

CylinderRegion::CylinderRegion(Grid grid, std::size_t levels)
    : grid_(grid), levels_(levels, 0) {
  if (levels == 0) throw DimensionError("cylinder needs at least one level");
}

bool CylinderRegion::contains(CellId cell, std::size_t level) const {
  return level < levels_.size() && cell < kMaxCells && ((levels_[level] >> cell) & 1u);
}

void CylinderRegion::insert(CellId cell, std::size_t level) {
  if (level >= levels_.size() || !grid_.contains(cell)) {
    throw DimensionError("cylinder cell out of range");
  }
  levels_[level] |= std::uint64_t{1} << cell;
}

void CylinderRegion::erase(CellId cell, std::size_t level) {
  if (level >= levels_.size() || !grid_.contains(cell)) {
    throw DimensionError("cylinder cell out of range");
  }
  levels_[level] &= ~(std::uint64_t{1} << cell);
}

void CylinderRegion::add_level(std::size_t level, const Region& region) {
  if (!(region.grid() == grid_)) throw DimensionError("region on a different grid");
  if (level >= levels_.size()) throw DimensionError("level out of range");
  levels_[level] |= region.bits();
}

Region CylinderRegion::level(std::size_t level) const {
  if (level >= levels_.size()) throw DimensionError("level out of range");
  return Region(grid_, levels_[level]);
}

bool CylinderRegion::is_empty() const {
  return std::all_of(levels_.begin(), levels_.end(), [](std::uint64_t b) { return b == 0; });
}

std::size_t CylinderRegion::size() const {
  std::size_t n = 0;
  for (auto b : levels_) n += static_cast<std::size_t>(std::popcount(b));
  return n;
}

bool CylinderRegion::subset_of(const CylinderRegion& other) const {
  if (!(grid_ == other.grid_) || levels_.size() != other.levels_.size()) {
    throw DimensionError("cylinders differ in grid or level count");
  }
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    if (levels_[l] & ~other.levels_[l]) return false;
  }
  return true;
}

std::string CylinderRegion::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    for (CellId c : Region(grid_, levels_[l]).cells()) {
      if (!first) os << ',';
      os << '(' << c << ',' << l << ')';
      first = false;
    }
  }
  os << '}';
  return os.str();
}

}  // namespace lumi
