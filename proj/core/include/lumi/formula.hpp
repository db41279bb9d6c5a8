#pragma once

// Temporal-epistemic formulas. The core syntax has six constructs; the
// parser rewrites |, ->, <->, [] and E into them.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "lumi/atom.hpp"
#include "lumi/errors.hpp"

namespace lumi {

enum class Op : std::uint8_t { Atom, Not, And, Know, Dist, Eventually };

struct FormulaNode;

class Formula {
 public:
  Formula() = default;

  static Formula atom(Atom a);
  static Formula neg(Formula f);
  static Formula conj(Formula a, Formula b);
  static Formula know(std::size_t robot, Formula f);
  static Formula dist(std::vector<std::size_t> group, Formula f);
  static Formula eventually(Formula f);

  // Derived forms, expanded immediately.
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);
  static Formula iff(Formula a, Formula b);
  static Formula always(Formula f);
  static Formula everyone(std::size_t n_robots, Formula f);
  static Formula conj_all(const std::vector<Formula>& fs);
  static Formula disj_all(const std::vector<Formula>& fs);

  bool valid() const { return node_ != nullptr; }
  Op op() const;
  const Atom& atom_value() const;
  const Formula& left() const;   // operand for unary nodes
  const Formula& right() const;  // And only
  std::size_t robot() const;     // Know only
  const std::vector<std::size_t>& group() const;  // Dist only

  std::size_t depth() const;
  /// Fully parenthesised core syntax; parse(to_string()) rebuilds the same tree.
  std::string to_string() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const FormulaNode> node_;
};

struct FormulaNode {
  Op op = Op::Atom;
  Atom atom;
  Formula a;
  Formula b;
  std::size_t robot = 0;
  std::vector<std::size_t> group;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t offset, const std::string& message);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Parses the concrete syntax, resolving names against the catalog.
Formula parse_formula(const std::string& text, const AtomCatalog& catalog);

}  // namespace lumi
