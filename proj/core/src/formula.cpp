#include "lumi/formula.hpp"

#include <algorithm>
#include <sstream>

namespace lumi {

const char* atom_kind_name(AtomKind kind) {
  switch (kind) {
    case AtomKind::Sp: return "sp";
    case AtomKind::Found: return "FOUND";
    case AtomKind::Secure: return "SECURE";
    case AtomKind::Pos: return "pos";
    case AtomKind::InitPos: return "init_pos";
    case AtomKind::In: return "in";
  }
  return "?";
}

std::string Atom::key() const {
  std::ostringstream os;
  switch (kind) {
    case AtomKind::Sp:
      if (cylinder) {
        os << "sp@" << region_name;
      } else {
        os << "sp" << (region ? region->to_string() : region_name);
      }
      break;
    case AtomKind::Found: os << "FOUND"; break;
    case AtomKind::Secure: os << "SECURE"; break;
    case AtomKind::Pos: os << "pos " << robot << ' ' << cell; break;
    case AtomKind::InitPos: os << "init_pos " << robot << ' ' << cell; break;
    case AtomKind::In:
      os << "in " << cell << ' ' << (region ? region->to_string() : region_name);
      break;
  }
  return os.str();
}

std::string Atom::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case AtomKind::Sp: os << "sp(" << region_name << ')'; break;
    case AtomKind::Found: os << "FOUND"; break;
    case AtomKind::Secure: os << "SECURE"; break;
    case AtomKind::Pos: os << "pos[r" << robot + 1 << "](c" << cell << ')'; break;
    case AtomKind::InitPos: os << "init_pos[r" << robot + 1 << "](c" << cell << ')'; break;
    case AtomKind::In: os << "in(c" << cell << ", " << region_name << ')'; break;
  }
  return os.str();
}

std::optional<Region> AtomCatalog::find_region(const std::string& name) const {
  if (name == "UX") return Region::full(grid);
  if (name == "UEMPTY") return Region::empty(grid);
  auto it = regions.find(name);
  if (it == regions.end()) return std::nullopt;
  return it->second;
}

Formula Formula::atom(Atom a) {
  auto n = std::make_shared<FormulaNode>();
  n->op = Op::Atom;
  n->atom = std::move(a);
  return Formula(std::move(n));
}

Formula Formula::neg(Formula f) {
  auto n = std::make_shared<FormulaNode>();
  n->op = Op::Not;
  n->a = std::move(f);
  return Formula(std::move(n));
}

Formula Formula::conj(Formula a, Formula b) {
  auto n = std::make_shared<FormulaNode>();
  n->op = Op::And;
  n->a = std::move(a);
  n->b = std::move(b);
  return Formula(std::move(n));
}

Formula Formula::know(std::size_t robot, Formula f) {
  auto n = std::make_shared<FormulaNode>();
  n->op = Op::Know;
  n->robot = robot;
  n->a = std::move(f);
  return Formula(std::move(n));
}

Formula Formula::dist(std::vector<std::size_t> group, Formula f) {
  std::sort(group.begin(), group.end());
  group.erase(std::unique(group.begin(), group.end()), group.end());
  if (group.empty()) throw InputError("distributed knowledge needs a nonempty group");
  auto n = std::make_shared<FormulaNode>();
  n->op = Op::Dist;
  n->group = std::move(group);
  n->a = std::move(f);
  return Formula(std::move(n));
}

Formula Formula::eventually(Formula f) {
  auto n = std::make_shared<FormulaNode>();
  n->op = Op::Eventually;
  n->a = std::move(f);
  return Formula(std::move(n));
}

Formula Formula::disj(Formula a, Formula b) { return neg(conj(neg(std::move(a)), neg(std::move(b)))); }

Formula Formula::implies(Formula a, Formula b) { return neg(conj(std::move(a), neg(std::move(b)))); }

Formula Formula::iff(Formula a, Formula b) { return conj(implies(a, b), implies(b, a)); }

Formula Formula::always(Formula f) { return neg(eventually(neg(std::move(f)))); }

Formula Formula::everyone(std::size_t n_robots, Formula f) {
  if (n_robots == 0) throw InputError("E needs at least one robot");
  Formula out = know(0, f);
  for (std::size_t r = 1; r < n_robots; ++r) out = conj(out, know(r, f));
  return out;
}

Formula Formula::conj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) throw InputError("empty conjunction");
  Formula out = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) out = conj(out, fs[i]);
  return out;
}

Formula Formula::disj_all(const std::vector<Formula>& fs) {
  if (fs.empty()) throw InputError("empty disjunction");
  Formula out = fs[0];
  for (std::size_t i = 1; i < fs.size(); ++i) out = disj(out, fs[i]);
  return out;
}

Op Formula::op() const { return node_->op; }
const Atom& Formula::atom_value() const { return node_->atom; }
const Formula& Formula::left() const { return node_->a; }
const Formula& Formula::right() const { return node_->b; }
std::size_t Formula::robot() const { return node_->robot; }
const std::vector<std::size_t>& Formula::group() const { return node_->group; }

std::size_t Formula::depth() const {
  switch (op()) {
    case Op::Atom: return 0;
    case Op::And: return 1 + std::max(left().depth(), right().depth());
    default: return 1 + left().depth();
  }
}

std::string Formula::to_string() const {
  if (!node_) return "<empty>";
  switch (op()) {
    case Op::Atom: return atom_value().to_string();
    case Op::Not: return "!" + left().to_string();
    case Op::And: return "(" + left().to_string() + " & " + right().to_string() + ")";
    case Op::Know: return "K[r" + std::to_string(robot() + 1) + "] " + left().to_string();
    case Op::Dist: {
      std::string g;
      for (std::size_t i = 0; i < group().size(); ++i) {
        g += (i ? ",r" : "r") + std::to_string(group()[i] + 1);
      }
      return "D[{" + g + "}] " + left().to_string();
    }
    case Op::Eventually: return "<> " + left().to_string();
  }
  return "?";
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Atom: return a.atom_value() == b.atom_value();
    case Op::Not:
    case Op::Eventually: return a.left() == b.left();
    case Op::And: return a.left() == b.left() && a.right() == b.right();
    case Op::Know: return a.robot() == b.robot() && a.left() == b.left();
    case Op::Dist: return a.group() == b.group() && a.left() == b.left();
  }
  return false;
}

}  // namespace lumi
