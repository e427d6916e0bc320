#pragma once

// Chain-algebra adapters for operators and operator matrices.

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ncres/chains.hpp"
#include "ncres/matrix.hpp"

namespace ncres {

inline std::string to_string(const MatrixOperator& m) {
  std::string s = "[";
  s += m.declared_size() ? std::to_string(*m.declared_size()) : std::string("inf");
  for (const auto& [ij, e] : m.entries()) {
    s += ";" + std::to_string(ij.first) + "," + std::to_string(ij.second) + ":" + to_string(e);
  }
  return s + "]";
}

// Diff_n (exact elements only): basis of monomials.
class OpAlgebra {
 public:
  using Elem = OperatorElement;

  OpAlgebra(std::size_t n, Mode mode) : n_(n), mode_(mode) {}

  std::size_t n() const { return n_; }
  Mode mode() const { return mode_; }

  Elem zero() const { return Elem(n_, mode_); }
  Elem unit() const { return Elem::constant(n_, mode_, 1); }
  Elem add(const Elem& a, const Elem& b) const { return op_add(a, b); }
  Elem scale(const Rational& c, const Elem& a) const { return scalar_mul(c, a); }
  Elem mul(const Elem& a, const Elem& b) const { return op_mul(a, b); }
  Elem d(const Elem&) const { return zero(); }
  int degree(const Elem&) const { return 0; }
  bool is_zero(const Elem& a) const { return a.is_zero(); }
  std::string key(const Elem& a) const { return to_string(a); }

  std::vector<std::pair<Elem, Rational>> decompose(const Elem& a) const {
    if (!a.is_exact()) throw PrecisionError("chains need exact operator entries");
    std::vector<std::pair<Elem, Rational>> out;
    for (const auto& [m, c] : a.terms()) out.emplace_back(Elem::monomial(n_, mode_, m), c);
    return out;
  }
  bool is_unit(const Elem& a) const {
    return a.terms().size() == 1 && a.terms().begin()->first == Monomial::one(n_) && a.terms().begin()->second == 1;
  }

 private:
  std::size_t n_;
  Mode mode_;
};

// M_r(Diff_n) (declared size, unital) or gl^fin(Diff_n) (unbounded). With
// n = 0 the entries are plain rationals, giving M_r(Q).
//
// For a declared size the basis is unit adapted: the identity replaces E_00(1),
// and E_ii(1) for i >= 1 stay basis elements.
class MatAlgebra {
 public:
  using Elem = MatrixOperator;

  MatAlgebra(std::size_t n, Mode mode, std::optional<std::size_t> size) : n_(n), mode_(mode), size_(size) {}

  std::size_t n() const { return n_; }
  Mode mode() const { return mode_; }
  std::optional<std::size_t> size() const { return size_; }

  Elem zero() const { return Elem(n_, mode_, size_); }
  Elem unit() const {
    if (!size_) throw DimensionMismatch("gl^fin has no unit");
    return identity_matrix(n_, mode_, *size_);
  }
  Elem add(const Elem& a, const Elem& b) const { return mat_add(a, b); }
  Elem scale(const Rational& c, const Elem& a) const { return mat_scalar_mul(c, a); }
  Elem mul(const Elem& a, const Elem& b) const { return mat_mul(a, b); }
  Elem d(const Elem&) const { return zero(); }
  int degree(const Elem&) const { return 0; }
  bool is_zero(const Elem& a) const { return a.is_zero(); }
  std::string key(const Elem& a) const { return to_string(a); }

  Elem basis(std::size_t i, std::size_t j, const Monomial& m) const {
    return unit_embed(OperatorElement::monomial(n_, mode_, m), i, j, size_);
  }

  std::vector<std::pair<Elem, Rational>> decompose(const Elem& a) const {
    std::vector<std::pair<Elem, Rational>> out;
    const Monomial one = Monomial::one(n_);
    Rational c0 = 0;
    if (size_) {
      const OperatorElement* e00 = a.find(0, 0);
      if (e00) {
        auto it = e00->terms().find(one);
        if (it != e00->terms().end()) c0 = it->second;
      }
      if (c0 != 0) out.emplace_back(unit(), c0);
    }
    for (const auto& [ij, e] : a.entries()) {
      if (!e.is_exact()) throw PrecisionError("chains need exact operator entries");
      for (const auto& [m, c] : e.terms()) {
        Rational v = c;
        if (size_ && ij.first == ij.second && m == one) v -= c0;
        if (v != 0) out.emplace_back(basis(ij.first, ij.second, m), v);
      }
    }
    if (size_ && c0 != 0) {
      // Diagonal constants that were absent still receive -c0.
      for (std::size_t i = 1; i < *size_; ++i) {
        const OperatorElement* e = a.find(i, i);
        bool present = e && e->terms().count(one);
        if (!present) out.emplace_back(basis(i, i, one), -c0);
      }
    }
    return out;
  }
  bool is_unit(const Elem& a) const { return size_ && a == unit(); }

 private:
  std::size_t n_;
  Mode mode_;
  std::optional<std::size_t> size_;
};

static_assert(ChainAlgebra<OpAlgebra>);
static_assert(ChainAlgebra<MatAlgebra>);

// Generalized trace M_r(A)-words -> A-words by index contraction
// (M_0)_{i0 i1} (x) (M_1)_{i1 i2} (x) ... (x) (M_k)_{ik i0}.
inline Chain<OperatorElement> generalized_trace(const MatAlgebra& mat, const Chain<MatrixOperator>& x) {
  OpAlgebra base(mat.n(), mat.mode());
  Chain<OperatorElement> out(x.kind == ChainKind::Lie ? ChainKind::Hochschild : x.kind, x.normalized);
  for (const auto& [w, c] : x.words) {
    const std::size_t k = w.size();
    // Depth-first walk over index chains.
    std::vector<OperatorElement> entries(k);
    std::function<void(std::size_t, std::size_t, std::size_t)> walk = [&](std::size_t pos, std::size_t start,
                                                                          std::size_t row) {
      if (pos == k) return;
      for (const auto& [ij, e] : w[pos].entries()) {
        if (ij.first != row) continue;
        entries[pos] = e;
        if (pos + 1 == k) {
          if (ij.second == start) add_word(base, out, entries, c);
        } else {
          walk(pos + 1, start, ij.second);
        }
      }
    };
    std::set<std::size_t> rows;
    for (const auto& [ij, e] : w[0].entries()) rows.insert(ij.first);
    for (std::size_t r : rows) walk(0, r, r);
  }
  return out;
}

// Lie chain over gl^fin(A) -> Connes chain over A: each expanded word w of
// k+1 factors contributes (1/(k+1)) * gentrace(w).
inline Chain<OperatorElement> L_map(const MatAlgebra& mat, const Chain<MatrixOperator>& x) {
  if (x.kind != ChainKind::Lie) throw KindMismatch("L_map needs a Lie chain");
  Chain<OperatorElement> out(ChainKind::Connes, false);
  for (const auto& [w, c] : x.words) {
    Chain<MatrixOperator> one(ChainKind::Hochschild, false);
    one.words.emplace(w, c / Rational(static_cast<long>(w.size())));
    Chain<OperatorElement> t = generalized_trace(mat, one);
    for (const auto& [v, cv] : t.words) out.add_basis_word(v, cv);
  }
  return out;
}

// The cycle (1, y_1, d_1, ..., y_n, d_n) alternated, over Diff_n.
inline Chain<OperatorElement> c_cycle_diff(std::size_t n) {
  OpAlgebra alg(n, Mode::Diff);
  std::vector<OperatorElement> coords;
  for (std::size_t i = 0; i < n; ++i) {
    coords.push_back(OperatorElement::y(n, Mode::Diff, i));
    coords.push_back(OperatorElement::d(n, Mode::Diff, i));
  }
  return c_cycle(alg, coords);
}

// The same cycle with entries Id_r (x) y_i, Id_r (x) d_i over M_r(Diff_n).
inline Chain<MatrixOperator> c_r_cycle(std::size_t n, std::size_t r) {
  MatAlgebra alg(n, Mode::Diff, r);
  auto scalar = [&](const OperatorElement& e) {
    MatrixOperator m(n, Mode::Diff, r);
    for (std::size_t i = 0; i < r; ++i) m.accumulate(i, i, e);
    return m;
  };
  std::vector<MatrixOperator> coords;
  for (std::size_t i = 0; i < n; ++i) {
    coords.push_back(scalar(OperatorElement::y(n, Mode::Diff, i)));
    coords.push_back(scalar(OperatorElement::d(n, Mode::Diff, i)));
  }
  return c_cycle(alg, coords);
}

}  // namespace ncres
