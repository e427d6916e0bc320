#pragma once

// Operator expressions:
//   expr   := term (("+" | "-") term)*
//   term   := factor ("*" factor)*
//   factor := "-"? atom ("^" sint)?
//   atom   := rational | var | "(" expr ")"
//   var    := ("y" | "d") uint
// Products are kept in the order written.

#include <cctype>
#include <string>
#include <vector>

#include "ncres/opalg.hpp"

namespace ncres {

struct Expr {
  enum class Kind { Num, Var, Pow, Mul, Add, Neg };
  Kind kind = Kind::Num;
  Rational value;       // Num
  char var = 'y';       // Var
  std::size_t index = 0;  // Var, 1-based
  Exp exponent = 1;     // Pow
  std::vector<Expr> kids;

  bool operator==(const Expr& o) const {
    return kind == o.kind && value == o.value && var == o.var && index == o.index && exponent == o.exponent &&
           kids == o.kids;
  }
};

// Compact structural rendering, e.g. "Add[Mul[y1,d1],1]".
inline std::string to_debug_string(const Expr& e) {
  auto list = [&](const char* name) {
    std::string s = std::string(name) + "[";
    for (std::size_t i = 0; i < e.kids.size(); ++i) s += (i ? "," : "") + to_debug_string(e.kids[i]);
    return s + "]";
  };
  switch (e.kind) {
    case Expr::Kind::Num: return to_string(e.value);
    case Expr::Kind::Var: return e.var + std::to_string(e.index);
    case Expr::Kind::Pow: return "Pow(" + to_debug_string(e.kids[0]) + "," + std::to_string(e.exponent) + ")";
    case Expr::Kind::Mul: return list("Mul");
    case Expr::Kind::Add: return list("Add");
    case Expr::Kind::Neg: return list("Neg");
  }
  return "";
}

namespace detail {

class Parser {
 public:
  explicit Parser(const std::string& src) : s_(src) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SyntaxError(what + " at line " + std::to_string(line) + ", column " + std::to_string(col));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool peek_digit() const { return pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])); }

  std::string digits() {
    std::string out;
    while (peek_digit()) out += s_[pos_++];
    if (out.empty()) fail("expected digits");
    return out;
  }

  Exp sint() {
    skip();
    bool neg = false;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) neg = s_[pos_++] == '-';
    std::string d = digits();
    if (d.size() > 9) fail("exponent too large");
    const Exp v = std::stol(d);
    return neg ? -v : v;
  }

  Expr expr() {
    Expr first = term();
    std::vector<Expr> parts{first};
    while (true) {
      if (eat('+')) {
        parts.push_back(term());
      } else if (eat('-')) {
        Expr neg{Expr::Kind::Neg};
        neg.kids.push_back(term());
        parts.push_back(neg);
      } else {
        break;
      }
    }
    if (parts.size() == 1) return first;
    Expr e{Expr::Kind::Add};
    e.kids = std::move(parts);
    return e;
  }

  Expr term() {
    std::vector<Expr> parts{factor()};
    while (eat('*')) parts.push_back(factor());
    if (parts.size() == 1) return parts[0];
    Expr e{Expr::Kind::Mul};
    e.kids = std::move(parts);
    return e;
  }

  Expr factor() {
    skip();
    // A sign directly in front of digits belongs to the number.
    if (pos_ + 1 < s_.size() && s_[pos_] == '-' && !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))) {
      ++pos_;
      Expr e{Expr::Kind::Neg};
      e.kids.push_back(factor());
      return e;
    }
    Expr a = atom();
    if (eat('^')) {
      const std::size_t at = pos_;
      const Exp k = sint();
      if (k == 0) {
        pos_ = at;
        fail("exponent must be nonzero");
      }
      Expr p{Expr::Kind::Pow};
      p.exponent = k;
      p.kids.push_back(std::move(a));
      return p;
    }
    return a;
  }

  Expr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (c == 'y' || c == 'd') {
      ++pos_;
      if (!peek_digit()) fail("expected a variable index");
      const std::string d = digits();
      if (d.size() > 6 || std::stoul(d) == 0) fail("variable index out of range");
      Expr e{Expr::Kind::Var};
      e.var = c;
      e.index = std::stoul(d);
      return e;
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      if (c == '-') {
        num += '-';
        ++pos_;
      }
      num += digits();
      if (pos_ < s_.size() && s_[pos_] == '/') {
        ++pos_;
        const std::size_t at = pos_;
        std::string den = digits();
        if (den.find_first_not_of('0') == std::string::npos) {
          pos_ = at;
          fail("zero denominator");
        }
        num += "/" + den;
      }
      Expr e{Expr::Kind::Num};
      e.value = parse_rational(num);
      return e;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse_expr(const std::string& src) { return detail::Parser(src).parse(); }

struct EvalConfig {
  std::size_t n = 1;
  Mode mode = Mode::Diff;
  TruncationWindow window = TruncationWindow::uniform(1, -6);  // for products with infinite tails
};

namespace detail {

// Exact when the Leibniz tail is finite, otherwise truncated at the window.
inline OperatorElement eval_mul(const OperatorElement& a, const OperatorElement& b, const EvalConfig& cfg) {
  try {
    return op_mul(a, b);
  } catch (const PrecisionError&) {
    if (cfg.mode != Mode::PsiDiff) throw;
    return op_mul(a, b, cfg.window);
  }
}

}  // namespace detail

inline OperatorElement eval_expr(const Expr& e, const EvalConfig& cfg) {
  switch (e.kind) {
    case Expr::Kind::Num: return OperatorElement::constant(cfg.n, cfg.mode, e.value);
    case Expr::Kind::Var: {
      if (e.index > cfg.n) throw DimensionMismatch("variable " + std::string(1, e.var) + std::to_string(e.index) +
                                                   " exceeds n = " + std::to_string(cfg.n));
      return e.var == 'y' ? OperatorElement::y(cfg.n, cfg.mode, e.index - 1)
                          : OperatorElement::d(cfg.n, cfg.mode, e.index - 1);
    }
    case Expr::Kind::Pow: {
      const Expr& base = e.kids[0];
      if (e.exponent < 0) {
        if (cfg.mode == Mode::Diff) throw NegativeExponentInDiffMode("negative exponents need --mode psidiff");
        if (base.kind != Expr::Kind::Var) throw SyntaxError("negative powers apply to a single variable");
        if (base.index > cfg.n) throw DimensionMismatch("variable index exceeds n");
        return base.var == 'y' ? OperatorElement::y(cfg.n, cfg.mode, base.index - 1, e.exponent)
                               : OperatorElement::d(cfg.n, cfg.mode, base.index - 1, e.exponent);
      }
      const OperatorElement b = eval_expr(base, cfg);
      OperatorElement out = b;
      for (Exp k = 1; k < e.exponent; ++k) out = detail::eval_mul(out, b, cfg);
      return out;
    }
    case Expr::Kind::Mul: {
      OperatorElement out = eval_expr(e.kids[0], cfg);
      for (std::size_t i = 1; i < e.kids.size(); ++i) out = detail::eval_mul(out, eval_expr(e.kids[i], cfg), cfg);
      return out;
    }
    case Expr::Kind::Add: {
      OperatorElement out(cfg.n, cfg.mode);
      for (const auto& k : e.kids) out = op_add(out, eval_expr(k, cfg));
      return out;
    }
    case Expr::Kind::Neg: return scalar_mul(-1, eval_expr(e.kids[0], cfg));
  }
  return OperatorElement(cfg.n, cfg.mode);
}

inline OperatorElement parse_operator(const std::string& src, const EvalConfig& cfg) {
  return eval_expr(parse_expr(src), cfg);
}

}  // namespace ncres
