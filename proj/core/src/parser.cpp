#include <cctype>

#include "lumi/formula.hpp"

namespace lumi {

ParseError::ParseError(std::size_t offset, const std::string& message)
    : InputError("at offset " + std::to_string(offset) + ": " + message), offset_(offset) {}

namespace {

class Parser {
 public:
  Parser(const std::string& text, const AtomCatalog& catalog) : s_(text), cat_(catalog) {}

  Formula parse() {
    Formula f = parse_iff();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(const std::string& tok) {
    skip();
    return s_.compare(pos_, tok.size(), tok) == 0;
  }

  bool accept(const std::string& tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }

  void expect(const std::string& tok) {
    if (!accept(tok)) fail("expected '" + tok + "'");
  }

  // Keyword followed by a non-identifier character.
  bool accept_word(const std::string& word) {
    if (!peek(word)) return false;
    const std::size_t end = pos_ + word.size();
    if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) {
      return false;
    }
    pos_ = end;
    return true;
  }

  std::string identifier() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected an identifier");
    return s_.substr(start, pos_ - start);
  }

  std::size_t number() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a number");
    return std::stoul(s_.substr(start, pos_ - start));
  }

  std::size_t robot() {
    skip();
    const std::size_t at = pos_;
    const std::string id = identifier();
    bool ok = id.size() > 1 && id[0] == 'r';
    for (std::size_t i = 1; ok && i < id.size(); ++i) ok = std::isdigit(static_cast<unsigned char>(id[i]));
    if (!ok) throw ParseError(at, "expected a robot name like r1, got '" + id + "'");
    const std::size_t idx = std::stoul(id.substr(1));
    if (idx == 0 || idx > cat_.n_robots) throw ParseError(at, "unknown robot '" + id + "'");
    return idx - 1;
  }

  CellId cell() {
    skip();
    const std::size_t at = pos_;
    const std::string id = identifier();
    bool ok = id.size() > 1 && id[0] == 'c';
    for (std::size_t i = 1; ok && i < id.size(); ++i) ok = std::isdigit(static_cast<unsigned char>(id[i]));
    if (!ok) throw ParseError(at, "expected a cell name like c0, got '" + id + "'");
    const std::size_t idx = std::stoul(id.substr(1));
    if (idx >= cat_.grid.cell_count()) throw ParseError(at, "unknown cell '" + id + "'");
    return static_cast<CellId>(idx);
  }

  // Fills region/region_name; cylinders only where allowed.
  void region_ref(Atom& a, bool allow_cylinder) {
    skip();
    const std::size_t at = pos_;
    if (accept("{")) {
      Region r = Region::empty(cat_.grid);
      if (!accept("}")) {
        do {
          const std::size_t c = number();
          if (c >= cat_.grid.cell_count()) throw ParseError(at, "cell " + std::to_string(c) + " outside grid");
          r.insert(static_cast<CellId>(c));
        } while (accept(","));
        expect("}");
      }
      a.region = r;
      a.region_name = r.to_string();
      return;
    }
    const std::string name = identifier();
    if (auto r = cat_.find_region(name)) {
      a.region = *r;
      a.region_name = name;
      return;
    }
    if (allow_cylinder && cat_.cylinders.count(name)) {
      a.cylinder = true;
      a.region_name = name;
      return;
    }
    throw ParseError(at, "unknown region '" + name + "'");
  }

  Formula parse_iff() {
    Formula f = parse_imp();
    while (accept("<->")) f = Formula::iff(f, parse_imp());
    return f;
  }

  Formula parse_imp() {
    Formula f = parse_or();
    if (accept("->")) return Formula::implies(f, parse_imp());
    return f;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (accept("|")) f = Formula::disj(f, parse_and());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (accept("&")) f = Formula::conj(f, parse_unary());
    return f;
  }

  Formula parse_unary() {
    skip();
    if (accept("!")) return Formula::neg(parse_unary());
    if (accept("<>")) return Formula::eventually(parse_unary());
    if (accept("[]")) return Formula::always(parse_unary());
    if (peek("K[")) {
      expect("K[");
      const std::size_t r = robot();
      expect("]");
      return Formula::know(r, parse_unary());
    }
    if (peek("D[")) {
      expect("D[");
      expect("{");
      std::vector<std::size_t> group{robot()};
      while (accept(",")) group.push_back(robot());
      expect("}");
      expect("]");
      return Formula::dist(std::move(group), parse_unary());
    }
    if (accept_word("E")) return Formula::everyone(cat_.n_robots, parse_unary());
    return parse_primary();
  }

  Formula parse_primary() {
    skip();
    if (accept("(")) {
      Formula f = parse_iff();
      expect(")");
      return f;
    }
    const std::size_t at = pos_;
    if (pos_ >= s_.size()) fail("unexpected end of formula");
    const std::string word = identifier();
    Atom a;
    if (word == "sp") {
      a.kind = AtomKind::Sp;
      expect("(");
      region_ref(a, true);
      expect(")");
    } else if (word == "FOUND") {
      a.kind = AtomKind::Found;
    } else if (word == "SECURE") {
      a.kind = AtomKind::Secure;
    } else if (word == "pos" || word == "init_pos") {
      a.kind = word == "pos" ? AtomKind::Pos : AtomKind::InitPos;
      expect("[");
      a.robot = robot();
      expect("]");
      expect("(");
      a.cell = cell();
      expect(")");
    } else if (word == "in") {
      a.kind = AtomKind::In;
      expect("(");
      a.cell = cell();
      expect(",");
      region_ref(a, false);
      expect(")");
    } else {
      throw ParseError(at, "unknown atom '" + word + "'");
    }
    return Formula::atom(std::move(a));
  }

  const std::string& s_;
  const AtomCatalog& cat_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(const std::string& text, const AtomCatalog& catalog) {
  return Parser(text, catalog).parse();
}

}  // namespace lumi
