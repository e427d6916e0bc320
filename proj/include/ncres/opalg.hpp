#pragma once

// Normal-ordered differential and truncated pseudodifferential operators
// y^a d^b in n variables with exact rational coefficients.

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ncres/core.hpp"

namespace ncres {

enum class Mode { Diff, PsiDiff };

inline const char* mode_name(Mode m) { return m == Mode::Diff ? "diff" : "psidiff"; }

struct Monomial {
  std::vector<Exp> y;
  std::vector<Exp> d;

  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;

  static Monomial one(std::size_t n) { return {std::vector<Exp>(n, 0), std::vector<Exp>(n, 0)}; }
};

// Per-variable floors. Components may be kNegInf when used as exactness floors.
struct TruncationWindow {
  std::vector<Exp> y;
  std::vector<Exp> d;

  static TruncationWindow uniform(std::size_t n, Exp f) {
    return {std::vector<Exp>(n, f), std::vector<Exp>(n, f)};
  }
  static TruncationWindow exact(std::size_t n) { return uniform(n, kNegInf); }

  bool is_exact() const {
    return std::all_of(y.begin(), y.end(), is_neg_inf) && std::all_of(d.begin(), d.end(), is_neg_inf);
  }
  bool operator==(const TruncationWindow&) const = default;
  auto operator<=>(const TruncationWindow&) const = default;
};

inline TruncationWindow vmax(const TruncationWindow& a, const TruncationWindow& b) {
  return {vmax(a.y, b.y), vmax(a.d, b.d)};
}

class OperatorElement {
 public:
  using Terms = std::map<Monomial, Rational>;

  OperatorElement() = default;
  OperatorElement(std::size_t n, Mode mode)
      : n_(n), mode_(mode), floors_(TruncationWindow::exact(n)), supp_(TruncationWindow::exact(n)) {}

  // Builds an element, dropping zero and below-floor terms. When `supp` is
  // absent it is taken from the stored terms (appropriate for exact input).
  static OperatorElement make(std::size_t n, Mode mode, const Terms& terms,
                              std::optional<TruncationWindow> floors = std::nullopt,
                              std::optional<TruncationWindow> supp = std::nullopt) {
    OperatorElement e(n, mode);
    if (floors) e.floors_ = *floors;
    if (mode == Mode::Diff && !e.floors_.is_exact()) {
      throw ModeMismatch("Diff elements are always exact");
    }
    for (const auto& [m, c] : terms) {
      if (m.y.size() != n || m.d.size() != n) throw DimensionMismatch("monomial has wrong length");
      if (mode == Mode::Diff) {
        for (std::size_t i = 0; i < n; ++i) {
          if (m.y[i] < 0 || m.d[i] < 0) throw ModeMismatch("negative exponent in Diff mode");
        }
      }
      if (c != 0 && e.in_exact_region(m)) e.terms_.emplace(m, c);
    }
    if (supp) {
      e.supp_ = *supp;
    } else {
      for (const auto& [m, c] : e.terms_) {
        e.supp_.y = vmax(e.supp_.y, m.y);
        e.supp_.d = vmax(e.supp_.d, m.d);
      }
    }
    return e;
  }

  static OperatorElement monomial(std::size_t n, Mode mode, const Monomial& m, const Rational& c = 1) {
    return make(n, mode, Terms{{m, c}});
  }
  static OperatorElement constant(std::size_t n, Mode mode, const Rational& c) {
    return monomial(n, mode, Monomial::one(n), c);
  }
  static OperatorElement y(std::size_t n, Mode mode, std::size_t i, Exp e = 1) {
    Monomial m = Monomial::one(n);
    m.y.at(i) = e;
    return monomial(n, mode, m);
  }
  static OperatorElement d(std::size_t n, Mode mode, std::size_t i, Exp e = 1) {
    Monomial m = Monomial::one(n);
    m.d.at(i) = e;
    return monomial(n, mode, m);
  }

  std::size_t n() const { return n_; }
  Mode mode() const { return mode_; }
  const Terms& terms() const { return terms_; }
  const TruncationWindow& floors() const { return floors_; }
  const TruncationWindow& support_hi() const { return supp_; }

  bool is_zero() const { return terms_.empty(); }
  bool is_exact() const { return floors_.is_exact(); }
  bool is_exact_zero() const { return terms_.empty() && floors_.is_exact(); }

  bool in_exact_region(const Monomial& m) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (m.y[i] < floors_.y[i] || m.d[i] < floors_.d[i]) return false;
    }
    return true;
  }

  bool operator==(const OperatorElement& o) const {
    return n_ == o.n_ && mode_ == o.mode_ && floors_ == o.floors_ && terms_ == o.terms_;
  }
  // Total order for use as a map key; support bounds are metadata and ignored.
  bool operator<(const OperatorElement& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    if (mode_ != o.mode_) return mode_ < o.mode_;
    if (floors_ != o.floors_) return floors_ < o.floors_;
    return std::lexicographical_compare(
        terms_.begin(), terms_.end(), o.terms_.begin(), o.terms_.end(), [](const auto& a, const auto& b) {
          if (a.first != b.first) return a.first < b.first;
          return a.second < b.second;
        });
  }

 private:
  std::size_t n_ = 0;
  Mode mode_ = Mode::Diff;
  Terms terms_;
  TruncationWindow floors_;
  TruncationWindow supp_;
};

namespace detail {

inline void check_compatible(const OperatorElement& a, const OperatorElement& b) {
  if (a.n() != b.n()) throw DimensionMismatch("operands have different numbers of variables");
  if (a.mode() != b.mode()) throw ModeMismatch("operands have different modes");
}

}  // namespace detail

inline OperatorElement as_psidiff(const OperatorElement& a) {
  if (a.mode() == Mode::PsiDiff) return a;
  return OperatorElement::make(a.n(), Mode::PsiDiff, a.terms(), a.floors(), a.support_hi());
}

// Raises the floors of `a` to at least `w` (PsiDiff only; Diff is returned unchanged).
inline OperatorElement truncate(const OperatorElement& a, const TruncationWindow& w) {
  if (a.mode() == Mode::Diff) return a;
  return OperatorElement::make(a.n(), a.mode(), a.terms(), vmax(a.floors(), w), a.support_hi());
}

inline OperatorElement op_add(const OperatorElement& a, const OperatorElement& b) {
  detail::check_compatible(a, b);
  OperatorElement::Terms t = a.terms();
  for (const auto& [m, c] : b.terms()) t[m] += c;
  TruncationWindow s{vmax(a.support_hi().y, b.support_hi().y), vmax(a.support_hi().d, b.support_hi().d)};
  return OperatorElement::make(a.n(), a.mode(), t, vmax(a.floors(), b.floors()), s);
}

inline OperatorElement scalar_mul(const Rational& c, const OperatorElement& a) {
  OperatorElement::Terms t;
  if (c != 0) {
    for (const auto& [m, v] : a.terms()) t.emplace(m, c * v);
  }
  TruncationWindow s = a.support_hi();
  if (c == 0) s = TruncationWindow::exact(a.n());
  return OperatorElement::make(a.n(), a.mode(), t, a.floors(), s);
}

inline OperatorElement op_sub(const OperatorElement& a, const OperatorElement& b) {
  return op_add(a, scalar_mul(-1, b));
}

// Normal-ordered product. In PsiDiff mode the optional window raises the
// result floors; an unbounded Leibniz tail with no finite floor is an error.
inline OperatorElement op_mul(const OperatorElement& a, const OperatorElement& b,
                              const std::optional<TruncationWindow>& window = std::nullopt) {
  detail::check_compatible(a, b);
  const std::size_t n = a.n();
  TruncationWindow fl{vmax(sat_add(a.floors().y, b.support_hi().y), sat_add(b.floors().y, a.support_hi().y)),
                      vmax(sat_add(a.floors().d, b.support_hi().d), sat_add(b.floors().d, a.support_hi().d))};
  if (window && a.mode() == Mode::PsiDiff) fl = vmax(fl, *window);
  TruncationWindow supp{sat_add(a.support_hi().y, b.support_hi().y), sat_add(a.support_hi().d, b.support_hi().d)};

  OperatorElement::Terms out;
  // Per-variable Leibniz series: list of (k, coefficient).
  std::vector<std::vector<std::pair<Exp, Integer>>> series(n);
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      bool empty = false;
      for (std::size_t i = 0; i < n && !empty; ++i) {
        auto& s = series[i];
        s.clear();
        const Exp bexp = ma.d[i];
        const Exp cexp = mb.y[i];
        if (bexp < 0 && cexp < 0 && is_neg_inf(fl.y[i]) && is_neg_inf(fl.d[i])) {
          throw PrecisionError("infinite Leibniz tail needs a truncation window");
        }
        Integer binom = 1;
        Integer fall = 1;
        for (Exp k = 0;; ++k) {
          if ((bexp >= 0 && k > bexp) || (cexp >= 0 && k > cexp)) break;
          const Exp ye = ma.y[i] + cexp - k;
          const Exp de = bexp + mb.d[i] - k;
          if (ye < fl.y[i] || de < fl.d[i]) break;
          if (k > 0) {
            binom = binom * Integer(static_cast<long>(bexp - k + 1)) / Integer(static_cast<long>(k));
            fall *= Integer(static_cast<long>(cexp - k + 1));
          }
          Integer coef = binom * fall;
          if (coef != 0) s.emplace_back(k, coef);
        }
        if (s.empty()) empty = true;
      }
      if (empty) continue;
      // Cartesian product over variables.
      std::vector<std::size_t> idx(n, 0);
      const Rational cab = ca * cb;
      while (true) {
        Monomial m{std::vector<Exp>(n), std::vector<Exp>(n)};
        Rational c = cab;
        for (std::size_t i = 0; i < n; ++i) {
          const auto& [k, coef] = series[i][idx[i]];
          m.y[i] = ma.y[i] + mb.y[i] - k;
          m.d[i] = ma.d[i] + mb.d[i] - k;
          c *= coef;
        }
        out[m] += c;
        std::size_t i = 0;
        for (; i < n; ++i) {
          if (++idx[i] < series[i].size()) break;
          idx[i] = 0;
        }
        if (i == n) break;
      }
    }
  }
  return OperatorElement::make(n, a.mode(), out, fl, supp);
}

inline OperatorElement commutator(const OperatorElement& a, const OperatorElement& b,
                                  const std::optional<TruncationWindow>& window = std::nullopt) {
  return op_sub(op_mul(a, b, window), op_mul(b, a, window));
}

namespace detail {

// Shared body of the two log-derivations. `use_y` selects ad(ln y_i), whose
// series is driven by the d-exponent; otherwise ad(ln d_i), driven by the y-exponent.
inline OperatorElement ad_log(bool use_y, std::size_t i, const OperatorElement& a0, const TruncationWindow& w) {
  const OperatorElement a = as_psidiff(a0);
  const std::size_t n = a.n();
  if (i >= n) throw DimensionMismatch("derivation index out of range");
  if (w.y.size() != n || w.d.size() != n) throw DimensionMismatch("window has wrong length");
  for (std::size_t v = 0; v < n; ++v) {
    if (w.y[v] < a.floors().y[v] || w.d[v] < a.floors().d[v]) {
      throw WindowTooWide("requested window extends below the input exactness region");
    }
  }
  OperatorElement::Terms out;
  for (const auto& [m, c] : a.terms()) {
    const Exp drive = use_y ? m.d[i] : m.y[i];
    Integer binom = 1;
    Integer fact = 1;  // (k-1)!
    for (Exp k = 1;; ++k) {
      if (drive >= 0 && k > drive) break;
      Monomial r = m;
      r.y[i] -= k;
      r.d[i] -= k;
      if (r.y[i] < w.y[i] || r.d[i] < w.d[i]) break;
      binom = binom * Integer(static_cast<long>(drive - k + 1)) / Integer(static_cast<long>(k));
      if (k > 1) fact *= Integer(static_cast<long>(k - 1));
      Integer coef = binom * fact;
      if (k % 2 == 0) coef = -coef;
      if (use_y) coef = -coef;
      if (coef != 0) out[r] += c * coef;
    }
  }
  TruncationWindow supp = a.support_hi();
  supp.y[i] = sat_add(supp.y[i], -1);
  supp.d[i] = sat_add(supp.d[i], -1);
  if (a.is_exact_zero()) supp = TruncationWindow::exact(n);
  return OperatorElement::make(n, Mode::PsiDiff, out, w, supp);
}

}  // namespace detail

// ad(ln y_i): y^a d^b -> -sum_{k>=1} C(b_i,k)(-1)^{k-1}(k-1)! y^{a-k e_i} d^{b-k e_i}.
inline OperatorElement ad_log_y(std::size_t i, const OperatorElement& a, const TruncationWindow& w) {
  return detail::ad_log(true, i, a, w);
}

// ad(ln d_i): y^a d^b -> sum_{k>=1} C(a_i,k)(-1)^{k-1}(k-1)! y^{a-k e_i} d^{b-k e_i}.
inline OperatorElement ad_log_d(std::size_t i, const OperatorElement& a, const TruncationWindow& w) {
  return detail::ad_log(false, i, a, w);
}

// The window actually usable for a derivation of `a`: w raised to a's floors.
inline TruncationWindow effective_window(const OperatorElement& a, const TruncationWindow& w) {
  return vmax(a.floors(), w);
}

inline Rational coefficient_at(const OperatorElement& a, const Monomial& m) {
  if (m.y.size() != a.n() || m.d.size() != a.n()) throw DimensionMismatch("monomial has wrong length");
  if (!a.in_exact_region(m)) throw PrecisionError("monomial lies below the exactness floors");
  auto it = a.terms().find(m);
  return it == a.terms().end() ? Rational(0) : it->second;
}

// Coefficient of y^{-1..-1} d^{-1..-1}.
inline Rational residue_trace(const OperatorElement& a) {
  Monomial m{std::vector<Exp>(a.n(), -1), std::vector<Exp>(a.n(), -1)};
  if (a.mode() == Mode::Diff) return 0;
  return coefficient_at(a, m);
}

// True when a and b have equal coefficients on every monomial exact in both.
inline bool agree(const OperatorElement& a, const OperatorElement& b) {
  detail::check_compatible(a, b);
  for (const auto& [m, c] : a.terms()) {
    if (!b.in_exact_region(m)) continue;
    auto it = b.terms().find(m);
    if (it == b.terms().end() || it->second != c) return false;
  }
  for (const auto& [m, c] : b.terms()) {
    if (!a.in_exact_region(m)) continue;
    if (a.terms().find(m) == a.terms().end()) return false;
  }
  return true;
}

// Canonical text: terms in (y, d) lexicographic order, e.g. "1 + 2 * y1*d1^-1".
inline std::string to_string(const OperatorElement& a) {
  if (a.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : a.terms()) {
    Rational shown = c;
    if (first) {
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
      shown = abs(c);
    }
    os << to_string(shown);
    std::string factors;
    auto emit = [&](char v, std::size_t i, Exp e) {
      if (e == 0) return;
      if (!factors.empty()) factors += "*";
      factors += v + std::to_string(i + 1);
      if (e != 1) factors += "^" + std::to_string(e);
    };
    for (std::size_t i = 0; i < a.n(); ++i) emit('y', i, m.y[i]);
    for (std::size_t i = 0; i < a.n(); ++i) emit('d', i, m.d[i]);
    if (!factors.empty()) os << " * " << factors;
  }
  return os.str();
}

}  // namespace ncres
