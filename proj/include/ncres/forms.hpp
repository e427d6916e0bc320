#pragma once

// Polynomial differential forms on a polydisc with operator-matrix
// coefficients. Form generators are dz_1..dz_n (bits 0..n-1) and
// dzbar_1..dzbar_n (bits n..2n-1).

#include <bit>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncres/algebras.hpp"

namespace ncres {

struct FormKey {
  std::uint32_t mask = 0;
  std::vector<Exp> z;
  std::vector<Exp> zbar;

  auto operator<=>(const FormKey&) const = default;
  bool operator==(const FormKey&) const = default;

  int degree() const { return std::popcount(mask); }
  static FormKey one(std::size_t n) { return {0, std::vector<Exp>(n, 0), std::vector<Exp>(n, 0)}; }
};

// Sign of g ^ (mask), or 0 if g is already present.
inline int insert_sign(std::uint32_t mask, unsigned g) {
  if (mask & (1u << g)) return 0;
  return sign_of(std::popcount(mask & ((1u << g) - 1)));
}

// Sign of (ma) ^ (mb) rewritten in sorted order, or 0 if they overlap.
inline int wedge_sign(std::uint32_t ma, std::uint32_t mb) {
  if (ma & mb) return 0;
  long s = 0;
  for (unsigned g = 0; g < 32; ++g)
    if (mb & (1u << g)) s += std::popcount(ma >> (g + 1));
  return sign_of(s);
}

// Scalar-valued polynomial forms.
class ScalarForm {
 public:
  using Terms = std::map<FormKey, Rational>;

  ScalarForm() = default;
  explicit ScalarForm(std::size_t n) : n_(n) {}

  static ScalarForm constant(std::size_t n, const Rational& c) {
    ScalarForm f(n);
    f.add(FormKey::one(n), c);
    return f;
  }

  std::size_t n() const { return n_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const FormKey& k, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(k, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  // True when the form is a constant function (possibly zero).
  bool is_constant() const {
    for (const auto& [k, c] : terms_)
      if (!(k == FormKey::one(n_))) return false;
    return true;
  }
  Rational constant_value() const {
    auto it = terms_.find(FormKey::one(n_));
    return it == terms_.end() ? Rational(0) : it->second;
  }

  bool operator==(const ScalarForm& o) const { return n_ == o.n_ && terms_ == o.terms_; }

 private:
  std::size_t n_ = 0;
  Terms terms_;
};

inline ScalarForm operator+(const ScalarForm& a, const ScalarForm& b) {
  ScalarForm r = a;
  for (const auto& [k, c] : b.terms()) r.add(k, c);
  return r;
}

inline ScalarForm operator*(const Rational& s, const ScalarForm& a) {
  ScalarForm r(a.n());
  for (const auto& [k, c] : a.terms()) r.add(k, s * c);
  return r;
}

inline FormKey key_product(const FormKey& a, const FormKey& b) {
  FormKey k{a.mask | b.mask, a.z, a.zbar};
  for (std::size_t i = 0; i < k.z.size(); ++i) {
    k.z[i] += b.z[i];
    k.zbar[i] += b.zbar[i];
  }
  return k;
}

inline ScalarForm wedge(const ScalarForm& a, const ScalarForm& b) {
  ScalarForm r(a.n());
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms()) {
      int s = wedge_sign(ka.mask, kb.mask);
      if (s) r.add(key_product(ka, kb), ca * cb * s);
    }
  return r;
}

namespace detail {

// d of the monomial coefficient of key k: list of (new key, factor).
inline std::vector<std::pair<FormKey, Rational>> d_key(const FormKey& k) {
  std::vector<std::pair<FormKey, Rational>> out;
  const std::size_t n = k.z.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (int bar = 0; bar < 2; ++bar) {
      const Exp e = bar ? k.zbar[i] : k.z[i];
      if (e == 0) continue;
      const unsigned g = static_cast<unsigned>(bar ? n + i : i);
      const int s = insert_sign(k.mask, g);
      if (!s) continue;
      FormKey r = k;
      r.mask |= 1u << g;
      (bar ? r.zbar[i] : r.z[i]) -= 1;
      out.emplace_back(r, Rational(static_cast<long>(e)) * s);
    }
  }
  return out;
}

}  // namespace detail

inline ScalarForm form_d(const ScalarForm& a) {
  ScalarForm r(a.n());
  for (const auto& [k, c] : a.terms())
    for (const auto& [nk, f] : detail::d_key(k)) r.add(nk, c * f);
  return r;
}

// (-1)^{floor(q/2)} on q-forms.
inline ScalarForm involution(const ScalarForm& a) {
  ScalarForm r(a.n());
  for (const auto& [k, c] : a.terms()) r.add(k, c * sign_of(k.degree() / 2));
  return r;
}

// Forms with matrix-of-operator coefficients.
class FormOperator {
 public:
  using Components = std::map<FormKey, MatrixOperator>;

  FormOperator() = default;
  FormOperator(std::size_t n, Mode mode, std::optional<std::size_t> size) : n_(n), mode_(mode), size_(size) {}

  std::size_t n() const { return n_; }
  Mode mode() const { return mode_; }
  std::optional<std::size_t> size() const { return size_; }
  const Components& components() const { return comps_; }

  void accumulate(const FormKey& k, const MatrixOperator& m) {
    if (m.n() != n_ || m.mode() != mode_) throw ModelMismatch("coefficient does not match the form model");
    if (m.declared_size() != size_) throw ModelMismatch("coefficient matrix size does not match the form model");
    if (k.z.size() != n_ || k.zbar.size() != n_) throw ModelMismatch("form key has the wrong dimension");
    auto it = comps_.find(k);
    if (it == comps_.end()) {
      if (!m.is_zero()) comps_.emplace(k, m);
      return;
    }
    it->second = mat_add(it->second, m);
    if (it->second.is_zero()) comps_.erase(it);
  }

  bool is_zero() const { return comps_.empty(); }

  // Form degree; -1 for zero, throws for inhomogeneous elements.
  int degree() const {
    int deg = -1;
    for (const auto& [k, m] : comps_) {
      if (deg == -1) deg = k.degree();
      else if (deg != k.degree()) throw ShapeError("form is not homogeneous");
    }
    return deg;
  }

  bool operator==(const FormOperator& o) const {
    return n_ == o.n_ && mode_ == o.mode_ && size_ == o.size_ && comps_ == o.comps_;
  }
  bool operator<(const FormOperator& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    if (mode_ != o.mode_) return mode_ < o.mode_;
    if (size_ != o.size_) return size_ < o.size_;
    return std::lexicographical_compare(comps_.begin(), comps_.end(), o.comps_.begin(), o.comps_.end(),
                                        [](const auto& a, const auto& b) {
                                          if (a.first != b.first) return a.first < b.first;
                                          return a.second < b.second;
                                        });
  }

 private:
  std::size_t n_ = 0;
  Mode mode_ = Mode::Diff;
  std::optional<std::size_t> size_;
  Components comps_;
};

namespace detail {

inline void check_model(const FormOperator& a, const FormOperator& b) {
  if (a.n() != b.n() || a.mode() != b.mode() || a.size() != b.size()) {
    throw ModelMismatch("forms belong to different models");
  }
}

}  // namespace detail

inline FormOperator form_from(const FormKey& k, const MatrixOperator& m) {
  FormOperator f(m.n(), m.mode(), m.declared_size());
  f.accumulate(k, m);
  return f;
}

inline FormOperator form_add(const FormOperator& a, const FormOperator& b) {
  detail::check_model(a, b);
  FormOperator r = a;
  for (const auto& [k, m] : b.components()) r.accumulate(k, m);
  return r;
}

inline FormOperator form_scale(const Rational& c, const FormOperator& a) {
  FormOperator r(a.n(), a.mode(), a.size());
  if (c == 0) return r;
  for (const auto& [k, m] : a.components()) r.accumulate(k, mat_scalar_mul(c, m));
  return r;
}

inline FormOperator form_mul(const FormOperator& a, const FormOperator& b) {
  detail::check_model(a, b);
  FormOperator r(a.n(), a.mode(), a.size());
  for (const auto& [ka, ma] : a.components())
    for (const auto& [kb, mb] : b.components()) {
      const int s = wedge_sign(ka.mask, kb.mask);
      if (s) r.accumulate(key_product(ka, kb), mat_scalar_mul(s, mat_mul(ma, mb)));
    }
  return r;
}

// De Rham differential on the polynomial coefficients.
inline FormOperator form_d(const FormOperator& a) {
  FormOperator r(a.n(), a.mode(), a.size());
  for (const auto& [k, m] : a.components())
    for (const auto& [nk, f] : detail::d_key(k)) r.accumulate(nk, mat_scalar_mul(f, m));
  return r;
}

// Graded commutator [a, b] = ab - (-1)^{|a||b|} ba, componentwise in degree.
inline FormOperator form_bracket(const FormOperator& a, const FormOperator& b) {
  detail::check_model(a, b);
  FormOperator r(a.n(), a.mode(), a.size());
  for (const auto& [ka, ma] : a.components())
    for (const auto& [kb, mb] : b.components()) {
      FormOperator x = form_from(ka, ma);
      FormOperator y = form_from(kb, mb);
      const int s = sign_of(static_cast<long>(ka.degree()) * kb.degree());
      r = form_add(r, form_add(form_mul(x, y), form_scale(-s, form_mul(y, x))));
    }
  return r;
}

inline bool mc_check(const FormOperator& omega) {
  for (const auto& [k, m] : omega.components())
    if (k.degree() != 1) return false;
  return form_add(form_d(omega), form_mul(omega, omega)).is_zero();
}

inline FormOperator twisted_d(const FormOperator& a, const FormOperator& omega) {
  if (!mc_check(omega)) throw NotMaurerCartan("omega is not a Maurer-Cartan form");
  return form_add(form_d(a), form_bracket(omega, a));
}

inline FormKey dz_key(std::size_t n, std::size_t i, bool bar = false) {
  FormKey k = FormKey::one(n);
  k.mask = 1u << (bar ? n + i : i);
  return k;
}

// Identity-blocked operator a (x) Id_r (size r), or a in entry (0,0) when r is unbounded.
inline MatrixOperator scalar_block(const OperatorElement& a, std::optional<std::size_t> r) {
  if (!r) return unit_embed(a, 0, 0);
  MatrixOperator m(a.n(), a.mode(), r);
  for (std::size_t i = 0; i < *r; ++i) m.accumulate(i, i, a);
  return m;
}

// omega_std = -sum_i dz_i (x) d_{y_i} (x) Id_r. For an unbounded matrix model
// the identity is taken on the first `blocks` diagonal slots.
inline FormOperator omega_std(std::size_t n, std::optional<std::size_t> r, std::size_t blocks = 1) {
  FormOperator w(n, Mode::Diff, r);
  for (std::size_t i = 0; i < n; ++i) {
    OperatorElement di = scalar_mul(-1, OperatorElement::d(n, Mode::Diff, i));
    MatrixOperator m(n, Mode::Diff, r);
    const std::size_t count = r ? *r : blocks;
    for (std::size_t j = 0; j < count; ++j) m.accumulate(j, j, di);
    w.accumulate(dz_key(n, i), m);
  }
  return w;
}

// A second flat form for n = 1 whose antiholomorphic part does not commute
// with y: -dz (x) d + dzbar (x) (y + z). dw = dz ^ dzbar and w^2 = -dz ^ dzbar.
inline FormOperator omega_heis(std::optional<std::size_t> r, std::size_t blocks = 1) {
  FormOperator w = omega_std(1, r, blocks);
  FormKey kz = dz_key(1, 0, true);
  kz.z[0] = 1;
  const std::size_t count = r ? *r : blocks;
  MatrixOperator my(1, Mode::Diff, r), m1(1, Mode::Diff, r);
  for (std::size_t j = 0; j < count; ++j) {
    my.accumulate(j, j, OperatorElement::y(1, Mode::Diff, 0));
    m1.accumulate(j, j, OperatorElement::constant(1, Mode::Diff, 1));
  }
  w.accumulate(dz_key(1, 0, true), my);
  w.accumulate(kz, m1);
  return w;
}

// Taylor substitution z -> y + z, d_z -> d_y of a holomorphic operator. The
// input uses y_i for z_i and d_i for d/dz_i.
inline FormOperator taylor_flat_section(const MatrixOperator& D) {
  if (D.mode() != Mode::Diff) throw NotHolomorphic("flat sections need a differential operator");
  const std::size_t n = D.n();
  FormOperator out(n, Mode::Diff, D.declared_size());
  for (const auto& [ij, e] : D.entries()) {
    for (const auto& [m, c] : e.terms()) {
      // (y + z)^a = sum_k C(a, k) y^k z^{a-k}
      std::vector<Exp> k(n, 0);
      while (true) {
        Rational coef = c;
        FormKey key = FormKey::one(n);
        Monomial mono{k, m.d};
        for (std::size_t i = 0; i < n; ++i) {
          coef *= Rational(binomial(m.y[i], k[i]));
          key.z[i] = m.y[i] - k[i];
        }
        out.accumulate(key, unit_embed(OperatorElement::monomial(n, Mode::Diff, mono, coef), ij.first, ij.second,
                                       D.declared_size()));
        std::size_t i = 0;
        for (; i < n; ++i) {
          if (++k[i] <= m.y[i]) break;
          k[i] = 0;
        }
        if (i == n) break;
      }
    }
  }
  return out;
}

// Same, for an operator given as a degree-0 form in z with y-free entries.
inline FormOperator taylor_flat_section(const FormOperator& D) {
  MatrixOperator hol(D.n(), D.mode(), D.size());
  for (const auto& [k, m] : D.components()) {
    if (k.mask != 0) throw NotHolomorphic("input has positive form degree");
    for (Exp e : k.zbar)
      if (e != 0) throw NotHolomorphic("input depends on zbar");
    for (const auto& [ij, e] : m.entries()) {
      for (const auto& [mono, c] : e.terms()) {
        for (Exp ye : mono.y)
          if (ye != 0) throw NotHolomorphic("input has fibre coordinates");
        Monomial zm{k.z, mono.d};
        hol.accumulate(ij.first, ij.second, OperatorElement::monomial(D.n(), D.mode(), zm, c));
      }
    }
  }
  return taylor_flat_section(hol);
}

// Flat sections for omega_heis: z -> y + z, d_z -> d_y + zbar. Both images
// are flat and [d^, y^] = 1, so substitution in normal order is an algebra map.
inline FormOperator heis_flat_section(const MatrixOperator& D) {
  if (D.mode() != Mode::Diff) throw NotHolomorphic("flat sections need a differential operator");
  if (D.n() != 1) throw DimensionMismatch("the heisenberg model has n = 1");
  const OperatorElement one = OperatorElement::constant(1, Mode::Diff, 1);
  FormKey kz = FormKey::one(1), kzb = FormKey::one(1);
  kz.z[0] = 1;
  kzb.zbar[0] = 1;
  auto scalar = [&](const FormKey& k, const OperatorElement& e) { return form_from(k, unit_embed(e, 0, 0, 1)); };
  const FormOperator yhat = form_add(scalar(FormKey::one(1), OperatorElement::y(1, Mode::Diff, 0)), scalar(kz, one));
  const FormOperator dhat = form_add(scalar(FormKey::one(1), OperatorElement::d(1, Mode::Diff, 0)), scalar(kzb, one));
  FormOperator out(1, Mode::Diff, D.declared_size());
  for (const auto& [ij, e] : D.entries()) {
    for (const auto& [m, c] : e.terms()) {
      FormOperator P = scalar(FormKey::one(1), one);
      for (Exp a = 0; a < m.y[0]; ++a) P = form_mul(P, yhat);
      for (Exp b = 0; b < m.d[0]; ++b) P = form_mul(P, dhat);
      for (const auto& [k, pm] : P.components())
        out.accumulate(k, unit_embed(scalar_mul(c, pm.at(0, 0)), ij.first, ij.second, D.declared_size()));
    }
  }
  return out;
}

inline std::string to_string(const FormKey& k) {
  std::string s = std::to_string(k.mask) + "|";
  for (Exp e : k.z) s += std::to_string(e) + ",";
  s += "|";
  for (Exp e : k.zbar) s += std::to_string(e) + ",";
  return s;
}

inline std::string to_string(const FormOperator& f) {
  std::string s = "{";
  for (const auto& [k, m] : f.components()) s += to_string(k) + "=" + to_string(m) + ";";
  return s + "}";
}

// DG algebra of FormOperators, optionally twisted: d + [omega, -].
class FormAlgebra {
 public:
  using Elem = FormOperator;

  FormAlgebra(std::size_t n, Mode mode, std::optional<std::size_t> size,
              std::optional<FormOperator> omega = std::nullopt)
      : n_(n), mode_(mode), size_(size), omega_(std::move(omega)) {}

  std::size_t n() const { return n_; }
  std::optional<std::size_t> size() const { return size_; }
  const std::optional<FormOperator>& omega() const { return omega_; }
  FormAlgebra untwisted() const { return FormAlgebra(n_, mode_, size_); }

  Elem zero() const { return Elem(n_, mode_, size_); }
  Elem unit() const {
    if (!size_) throw DimensionMismatch("gl^fin has no unit");
    return form_from(FormKey::one(n_), identity_matrix(n_, mode_, *size_));
  }
  Elem add(const Elem& a, const Elem& b) const { return form_add(a, b); }
  Elem scale(const Rational& c, const Elem& a) const { return form_scale(c, a); }
  Elem mul(const Elem& a, const Elem& b) const { return form_mul(a, b); }
  Elem d(const Elem& a) const {
    Elem r = form_d(a);
    if (omega_) r = form_add(r, form_bracket(*omega_, a));
    return r;
  }
  int degree(const Elem& a) const {
    int g = a.degree();
    return g < 0 ? 0 : g;
  }
  bool is_zero(const Elem& a) const { return a.is_zero(); }
  std::string key(const Elem& a) const { return to_string(a); }

  std::vector<std::pair<Elem, Rational>> decompose(const Elem& a) const {
    std::vector<std::pair<Elem, Rational>> out;
    MatAlgebra mat(n_, mode_, size_);
    for (const auto& [k, m] : a.components())
      for (const auto& [b, c] : mat.decompose(m)) out.emplace_back(form_from(k, b), c);
    return out;
  }
  bool is_unit(const Elem& a) const { return size_ && a == unit(); }

 private:
  std::size_t n_;
  Mode mode_;
  std::optional<std::size_t> size_;
  std::optional<FormOperator> omega_;
};

static_assert(ChainAlgebra<FormAlgebra>);

// Splits a basis element into its form key and matrix part.
inline std::pair<FormKey, MatrixOperator> split_basis(const FormOperator& b) {
  if (b.components().size() != 1) throw ShapeError("not a basis element");
  return *b.components().begin();
}

}  // namespace ncres
