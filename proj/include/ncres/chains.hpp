#pragma once

// Hochschild, bar, Connes and Chevalley-Eilenberg chains over a DG algebra
// adapter. An adapter `Alg` provides:
//
//   using Elem;                               totally ordered value type
//   Elem zero() const; Elem unit() const;
//   Elem add(Elem, Elem); Elem scale(Rational, Elem); Elem mul(Elem, Elem);
//   Elem d(Elem);                             internal differential
//   int degree(Elem);                         for homogeneous (basis) elements
//   std::vector<std::pair<Elem, Rational>> decompose(Elem);
//   bool is_unit(Elem);                       basis element equal to the unit
//   bool is_zero(Elem);
//   std::string key(Elem);                    canonical text, used for hashing
//
// Chains store words of basis elements; the basis must contain the unit when
// the algebra is unital so that normalization is a plain pruning.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ncres/core.hpp"
#include "ncres/linsolve.hpp"

namespace ncres {

template <class A>
concept ChainAlgebra = requires(const A& alg, const typename A::Elem& x, const Rational& c) {
  { alg.zero() } -> std::convertible_to<typename A::Elem>;
  { alg.add(x, x) } -> std::convertible_to<typename A::Elem>;
  { alg.scale(c, x) } -> std::convertible_to<typename A::Elem>;
  { alg.mul(x, x) } -> std::convertible_to<typename A::Elem>;
  { alg.d(x) } -> std::convertible_to<typename A::Elem>;
  { alg.degree(x) } -> std::convertible_to<int>;
  { alg.decompose(x) } -> std::convertible_to<std::vector<std::pair<typename A::Elem, Rational>>>;
  { alg.is_unit(x) } -> std::convertible_to<bool>;
  { alg.is_zero(x) } -> std::convertible_to<bool>;
  { alg.key(x) } -> std::convertible_to<std::string>;
};

enum class ChainKind { Hochschild, Bar, Connes, Lie };

inline const char* kind_name(ChainKind k) {
  switch (k) {
    case ChainKind::Hochschild: return "hochschild";
    case ChainKind::Bar: return "bar";
    case ChainKind::Connes: return "connes";
    case ChainKind::Lie: return "lie";
  }
  return "?";
}

inline int sign_of(long e) { return (e % 2 == 0) ? 1 : -1; }

template <class Elem>
struct Chain {
  using Word = std::vector<Elem>;

  ChainKind kind = ChainKind::Hochschild;
  bool normalized = true;
  std::map<Word, Rational> words;

  Chain() = default;
  Chain(ChainKind k, bool norm) : kind(k), normalized(norm) {}

  static Chain like(const Chain& o) { return Chain(o.kind, o.normalized); }

  void add_basis_word(const Word& w, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = words.emplace(w, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) words.erase(it);
    }
  }
  bool is_zero() const { return words.empty(); }
  bool operator==(const Chain& o) const { return kind == o.kind && words == o.words; }
};

template <class Elem>
Chain<Elem> operator+(const Chain<Elem>& a, const Chain<Elem>& b) {
  Chain<Elem> r = a;
  for (const auto& [w, c] : b.words) r.add_basis_word(w, c);
  return r;
}

template <class Elem>
Chain<Elem> operator*(const Rational& s, const Chain<Elem>& a) {
  Chain<Elem> r = Chain<Elem>::like(a);
  if (s == 0) return r;
  for (const auto& [w, c] : a.words) r.words.emplace(w, s * c);
  return r;
}

template <class Elem>
Chain<Elem> operator-(const Chain<Elem>& a, const Chain<Elem>& b) {
  return a + Rational(-1) * b;
}

// Adds c * (e_0, ..., e_k) expanded multilinearly in the basis. Normalized
// Hochschild chains drop words with the unit in a position >= 1.
template <ChainAlgebra Alg>
void add_word(const Alg& alg, Chain<typename Alg::Elem>& ch, const std::vector<typename Alg::Elem>& entries,
              const Rational& c) {
  using Elem = typename Alg::Elem;
  if (c == 0) return;
  std::vector<std::vector<std::pair<Elem, Rational>>> parts;
  parts.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto dec = alg.decompose(entries[i]);
    if (ch.normalized && ch.kind == ChainKind::Hochschild && i >= 1) {
      std::erase_if(dec, [&](const auto& p) { return alg.is_unit(p.first); });
    }
    if (dec.empty()) return;
    parts.push_back(std::move(dec));
  }
  std::vector<std::size_t> idx(parts.size(), 0);
  std::vector<Elem> w(parts.size());
  while (true) {
    Rational coef = c;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      w[i] = parts[i][idx[i]].first;
      coef *= parts[i][idx[i]].second;
    }
    ch.add_basis_word(w, coef);
    std::size_t i = 0;
    for (; i < parts.size(); ++i) {
      if (++idx[i] < parts[i].size()) break;
      idx[i] = 0;
    }
    if (i == parts.size()) break;
  }
}

template <ChainAlgebra Alg>
Chain<typename Alg::Elem> make_chain(const Alg& alg, ChainKind kind, bool normalized,
                                     const std::vector<std::pair<std::vector<typename Alg::Elem>, Rational>>& ws) {
  Chain<typename Alg::Elem> ch(kind, normalized);
  for (const auto& [w, c] : ws) add_word(alg, ch, w, c);
  return ch;
}

// Homological degree of a word: (#entries - 1) minus the internal degrees.
template <ChainAlgebra Alg>
int word_degree(const Alg& alg, const std::vector<typename Alg::Elem>& w) {
  int s = static_cast<int>(w.size()) - 1;
  for (const auto& e : w) s -= alg.degree(e);
  return s;
}

// Returns the common degree of all words, or 0 for the zero chain. Throws
// ShapeError for inhomogeneous chains.
template <ChainAlgebra Alg>
int chain_degree(const Alg& alg, const Chain<typename Alg::Elem>& ch) {
  bool first = true;
  int deg = 0;
  for (const auto& [w, c] : ch.words) {
    int dw = word_degree(alg, w);
    if (first) {
      deg = dw;
      first = false;
    } else if (dw != deg) {
      throw ShapeError("chain is not homogeneous");
    }
  }
  return deg;
}

template <class Elem>
Chain<Elem> restrict_entries(const Chain<Elem>& ch, std::size_t max_entries) {
  Chain<Elem> r = Chain<Elem>::like(ch);
  for (const auto& [w, c] : ch.words)
    if (w.size() <= max_entries) r.words.emplace(w, c);
  return r;
}

// ---------------------------------------------------------------------------
// Hochschild complex

namespace detail {

template <ChainAlgebra Alg>
std::vector<int> degrees(const Alg& alg, const std::vector<typename Alg::Elem>& w) {
  std::vector<int> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) g[i] = alg.degree(w[i]);
  return g;
}

// eps[i] = g_0 + sum_{j=1..i} (g_j - 1)
inline std::vector<long> hoch_eps(const std::vector<int>& g) {
  std::vector<long> eps(g.size());
  long s = g.empty() ? 0 : g[0];
  if (!g.empty()) eps[0] = s;
  for (std::size_t i = 1; i < g.size(); ++i) {
    s += g[i] - 1;
    eps[i] = s;
  }
  return eps;
}

template <ChainAlgebra Alg>
void external_boundary(const Alg& alg, const Chain<typename Alg::Elem>& x, Chain<typename Alg::Elem>& out,
                       bool with_cyclic_term) {
  using Elem = typename Alg::Elem;
  for (const auto& [w, c] : x.words) {
    const std::size_t n = w.size() - 1;
    if (n == 0) continue;
    auto g = degrees(alg, w);
    auto eps = hoch_eps(g);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Elem> v;
      v.reserve(n);
      for (std::size_t j = 0; j < i; ++j) v.push_back(w[j]);
      v.push_back(alg.mul(w[i], w[i + 1]));
      for (std::size_t j = i + 2; j <= n; ++j) v.push_back(w[j]);
      add_word(alg, out, v, c * sign_of(eps[i]));
    }
    if (with_cyclic_term) {
      std::vector<Elem> v;
      v.reserve(n);
      v.push_back(alg.mul(w[n], w[0]));
      for (std::size_t j = 1; j < n; ++j) v.push_back(w[j]);
      add_word(alg, out, v, -c * sign_of(static_cast<long>(g[n] - 1) * eps[n - 1]));
    }
  }
}

}  // namespace detail

// The part of the Hochschild differential coming from the algebra product.
template <ChainAlgebra Alg>
Chain<typename Alg::Elem> hochschild_b(const Alg& alg, const Chain<typename Alg::Elem>& x) {
  auto out = Chain<typename Alg::Elem>::like(x);
  detail::external_boundary(alg, x, out, true);
  return out;
}

// The part induced by the internal differential of the algebra.
template <ChainAlgebra Alg>
Chain<typename Alg::Elem> hochschild_d(const Alg& alg, const Chain<typename Alg::Elem>& x) {
  using Elem = typename Alg::Elem;
  auto out = Chain<Elem>::like(x);
  for (const auto& [w, c] : x.words) {
    auto g = detail::degrees(alg, w);
    auto eps = detail::hoch_eps(g);
    for (std::size_t i = 0; i < w.size(); ++i) {
      Elem di = alg.d(w[i]);
      if (alg.is_zero(di)) continue;
      std::vector<Elem> v = w;
      v[i] = di;
      add_word(alg, out, v, i == 0 ? c : -c * sign_of(eps[i - 1]));
    }
  }
  return out;
}

// Total differential b + d of the Hochschild complex of a DG algebra.
template <ChainAlgebra Alg>
Chain<typename Alg::Elem> hochschild_boundary(const Alg& alg, const Chain<typename Alg::Elem>& x) {
  if (x.kind != ChainKind::Hochschild && x.kind != ChainKind::Connes) {
    throw KindMismatch("hochschild_boundary needs a Hochschild or Connes chain");
  }
  return hochschild_b(alg, x) + hochschild_d(alg, x);
}

// b' (no cyclic term), plus the internal differential.
template <ChainAlgebra Alg>
Chain<typename Alg::Elem> bar_boundary(const Alg& alg, const Chain<typename Alg::Elem>& x) {
  if (x.kind != ChainKind::Bar) throw KindMismatch("bar_boundary needs a Bar chain");
  auto out = Chain<typename Alg::Elem>::like(x);
  detail::external_boundary(alg, x, out, false);
  return out + hochschild_d(alg, x);
}

// sum over sigma in S_{2n} of sgn(sigma) (1, coords_{sigma(1)}, ..., coords_{sigma(2n)})
template <ChainAlgebra Alg>
Chain<typename Alg::Elem> c_cycle(const Alg& alg, const std::vector<typename Alg::Elem>& coords) {
  using Elem = typename Alg::Elem;
  Chain<Elem> ch(ChainKind::Hochschild, true);
  std::vector<std::size_t> p(coords.size());
  std::iota(p.begin(), p.end(), 0);
  do {
    long inv = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = i + 1; j < p.size(); ++j)
        if (p[i] > p[j]) ++inv;
    std::vector<Elem> w{alg.unit()};
    for (std::size_t i : p) w.push_back(coords[i]);
    add_word(alg, ch, w, sign_of(inv));
  } while (std::next_permutation(p.begin(), p.end()));
  return ch;
}

// Koszul sign of the shuffle that interleaves u (length p) and v (length q)
// according to `from_v` (true picks the next element of v), with the given
// per-element parities.
inline int shuffle_sign(const std::vector<bool>& from_v, const std::vector<long>& par_u,
                        const std::vector<long>& par_v) {
  long s = 0;
  std::size_t iu = 0;
  std::size_t iv = 0;
  for (bool b : from_v) {
    if (b) {
      // v[iv] moves past the remaining elements of u.
      for (std::size_t k = iu; k < par_u.size(); ++k) s += par_v[iv] * par_u[k];
      ++iv;
    } else {
      ++iu;
    }
  }
  return sign_of(s);
}

template <class F>
void for_each_shuffle(std::size_t p, std::size_t q, F&& f) {
  std::vector<bool> mask(p + q, false);
  std::fill(mask.begin() + static_cast<long>(p), mask.end(), true);
  do {
    f(mask);
  } while (std::next_permutation(mask.begin(), mask.end()));
}

// (a_0, a_1..a_p) x (b_0, b_1..b_q) = sum over shuffles of (a_0 b_0, shuffle),
// signs from the shifted degrees |a_i| - 1 and from moving b_0 past the a_i.
template <ChainAlgebra Alg>
Chain<typename Alg::Elem> shuffle_product(const Alg& alg, const Chain<typename Alg::Elem>& x,
                                          const Chain<typename Alg::Elem>& y) {
  using Elem = typename Alg::Elem;
  if (x.kind != ChainKind::Hochschild || y.kind != ChainKind::Hochschild) {
    throw KindMismatch("shuffle_product needs Hochschild chains");
  }
  Chain<Elem> out(ChainKind::Hochschild, x.normalized && y.normalized);
  for (const auto& [u, cu] : x.words) {
    for (const auto& [v, cv] : y.words) {
      const std::size_t p = u.size() - 1;
      const std::size_t q = v.size() - 1;
      std::vector<long> pu(p), pv(q);
      long shifted_u = 0;
      for (std::size_t i = 0; i < p; ++i) {
        pu[i] = alg.degree(u[i + 1]) - 1;
        shifted_u += pu[i];
      }
      for (std::size_t j = 0; j < q; ++j) pv[j] = alg.degree(v[j + 1]) - 1;
      const int s0 = sign_of(static_cast<long>(alg.degree(v[0])) * shifted_u);
      Elem head = alg.mul(u[0], v[0]);
      for_each_shuffle(p, q, [&](const std::vector<bool>& mask) {
        std::vector<Elem> w{head};
        std::size_t iu = 1;
        std::size_t iv = 1;
        for (bool b : mask) w.push_back(b ? v[iv++] : u[iu++]);
        add_word(alg, out, w, cu * cv * s0 * shuffle_sign(mask, pu, pv));
      });
    }
  }
  return out;
}

// True when d(omega) + omega^2 vanishes in `alg`.
template <ChainAlgebra Alg>
bool is_maurer_cartan(const Alg& alg, const typename Alg::Elem& omega) {
  return alg.is_zero(alg.add(alg.d(omega), alg.mul(omega, omega)));
}

// x |-> x * sum_k (-1)^k (1, omega, ..., omega), keeping words with at most
// `max_entries` entries (the product complex is truncated componentwise).
template <ChainAlgebra Alg>
Chain<typename Alg::Elem> mc_twist_hoch(const Alg& plain, const Chain<typename Alg::Elem>& x,
                                        const typename Alg::Elem& omega, std::size_t max_entries,
                                        int sign = -1) {
  using Elem = typename Alg::Elem;
  if (!is_maurer_cartan(plain, omega)) throw NotMaurerCartan("omega does not satisfy d omega + omega^2 = 0");
  Chain<Elem> out(ChainKind::Hochschild, x.normalized);
  std::size_t min_len = max_entries + 1;
  for (const auto& [w, c] : x.words) min_len = std::min(min_len, w.size());
  if (min_len > max_entries) return out;
  for (std::size_t k = 0; k + min_len <= max_entries; ++k) {
    std::vector<Elem> pw(k + 1, omega);
    pw[0] = plain.unit();
    Chain<Elem> pk(ChainKind::Hochschild, x.normalized);
    add_word(plain, pk, pw, sign_of(k) == 1 ? Rational(1) : Rational(sign));
    out = out + restrict_entries(shuffle_product(plain, x, pk), max_entries);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cyclic structure (unnormalized words)

template <ChainAlgebra Alg>
std::pair<std::vector<typename Alg::Elem>, int> rotate_word(const Alg& alg, const std::vector<typename Alg::Elem>& w) {
  const std::size_t k = w.size();
  std::vector<typename Alg::Elem> r;
  r.reserve(k);
  r.push_back(w[k - 1]);
  long before = 0;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    r.push_back(w[i]);
    before += alg.degree(w[i]);
  }
  const int s = sign_of(static_cast<long>(k) - 1) * sign_of(static_cast<long>(alg.degree(w[k - 1])) * before);
  return {r, s};
}

template <ChainAlgebra Alg>
Chain<typename Alg::Elem> cyclic_t(const Alg& alg, const Chain<typename Alg::Elem>& x) {
  if (x.kind == ChainKind::Lie) throw KindMismatch("cyclic_t needs a Hochschild-type chain");
  auto out = Chain<typename Alg::Elem>::like(x);
  for (const auto& [w, c] : x.words) {
    auto [r, s] = rotate_word(alg, w);
    out.add_basis_word(r, c * s);
  }
  return out;
}

template <ChainAlgebra Alg>
Chain<typename Alg::Elem> cyclic_N(const Alg& alg, const Chain<typename Alg::Elem>& x) {
  if (x.kind == ChainKind::Lie) throw KindMismatch("cyclic_N needs a Hochschild-type chain");
  auto out = Chain<typename Alg::Elem>::like(x);
  for (const auto& [w, c] : x.words) {
    std::vector<typename Alg::Elem> cur = w;
    int s = 1;
    for (std::size_t j = 0; j < w.size(); ++j) {
      out.add_basis_word(cur, c * s);
      auto [r, t] = rotate_word(alg, cur);
      cur = std::move(r);
      s *= t;
    }
  }
  return out;
}

// Canonical representative modulo im(1 - t): each word is replaced by the
// smallest word in its rotation orbit, with the matching sign, or by zero
// when the orbit identifies the word with its own negative.
template <ChainAlgebra Alg>
Chain<typename Alg::Elem> connes_project(const Alg& alg, const Chain<typename Alg::Elem>& x) {
  using Elem = typename Alg::Elem;
  if (x.kind == ChainKind::Lie) throw KindMismatch("connes_project needs a Hochschild-type chain");
  Chain<Elem> out(ChainKind::Connes, false);
  for (const auto& [w, c] : x.words) {
    std::vector<std::pair<std::vector<Elem>, int>> orbit;
    std::vector<Elem> cur = w;
    int s = 1;
    for (std::size_t j = 0; j < w.size(); ++j) {
      orbit.emplace_back(cur, s);
      auto [r, t] = rotate_word(alg, cur);
      cur = std::move(r);
      s *= t;
    }
    const auto& best = std::min_element(orbit.begin(), orbit.end(), [](const auto& a, const auto& b) {
                         return a.first < b.first;
                       })->first;
    int sign = 0;
    bool killed = false;
    for (const auto& [v, t] : orbit) {
      if (v != best) continue;
      if (sign == 0) sign = t;
      else if (sign != t) killed = true;
    }
    if (!killed) out.add_basis_word(best, c * sign);
  }
  return out;
}

// Decides x == y in the Connes quotient by exact linear algebra: the
// difference must lie in the span of (1 - t)w over the rotation closure.
template <ChainAlgebra Alg>
bool connes_equal(const Alg& alg, const Chain<typename Alg::Elem>& x, const Chain<typename Alg::Elem>& y) {
  using Elem = typename Alg::Elem;
  using Word = std::vector<Elem>;
  Chain<Elem> diff = x - y;
  if (diff.is_zero()) return true;
  std::map<Word, std::size_t> index;
  std::vector<Word> gens;
  for (const auto& [w, c] : diff.words) {
    Word cur = w;
    for (std::size_t j = 0; j < w.size(); ++j) {
      if (index.emplace(cur, index.size()).second) gens.push_back(cur);
      cur = rotate_word(alg, cur).first;
    }
  }
  // Columns: generators (1 - t)g. Rows: words.
  SparseMatrix a(index.size(), gens.size());
  for (std::size_t col = 0; col < gens.size(); ++col) {
    a.add(index.at(gens[col]), col, 1);
    auto [r, s] = rotate_word(alg, gens[col]);
    a.add(index.at(r), col, -s);
  }
  Vector rhs(index.size(), Rational(0));
  for (const auto& [w, c] : diff.words) rhs[index.at(w)] = c;
  return solve(a, rhs).has_value();
}

// Tsygan bicomplex: even columns carry Hochschild chains with b, odd columns
// bar chains with b'; horizontal maps are (1 - t) out of odd columns and N out
// of even columns p >= 2. Squares commute, so the total differential is
// d_h + (-1)^p d_v.
template <class Elem>
struct TsyganElement {
  std::map<int, Chain<Elem>> columns;
};

template <ChainAlgebra Alg>
TsyganElement<typename Alg::Elem> tsygan_total(const Alg& alg, const TsyganElement<typename Alg::Elem>& x) {
  using Elem = typename Alg::Elem;
  TsyganElement<Elem> out;
  auto column = [&](int p) -> Chain<Elem>& {
    auto it = out.columns.find(p);
    if (it == out.columns.end()) {
      it = out.columns.emplace(p, Chain<Elem>(p % 2 == 0 ? ChainKind::Hochschild : ChainKind::Bar, false)).first;
    }
    return it->second;
  };
  for (const auto& [p, ch] : x.columns) {
    const ChainKind want = (p % 2 == 0) ? ChainKind::Hochschild : ChainKind::Bar;
    if (p < 0 || ch.kind != want || ch.normalized) {
      throw ShapeError("Tsygan column " + std::to_string(p) + " has the wrong kind");
    }
    Chain<Elem> dv;
    if (p % 2 == 0) {
      dv = hochschild_boundary(alg, ch);
    } else {
      dv = bar_boundary(alg, ch);
    }
    Chain<Elem>& here = column(p);
    here = here + Rational(sign_of(p)) * dv;
    if (p >= 1) {
      Chain<Elem> dh = (p % 2 == 1) ? ch - cyclic_t(alg, ch) : cyclic_N(alg, ch);
      dh.kind = (p % 2 == 1) ? ChainKind::Hochschild : ChainKind::Bar;
      Chain<Elem>& left = column(p - 1);
      left = left + dh;
    }
  }
  std::erase_if(out.columns, [](const auto& kv) { return kv.second.is_zero(); });
  return out;
}

// ---------------------------------------------------------------------------
// Chevalley-Eilenberg chains. A wedge g_0 ^ ... ^ g_k is stored expanded as
// sum over permutations with graded antisymmetry signs
// g ^ h = -(-1)^{|g||h|} h ^ g. An expanded chain X = sum c_w w therefore
// stands for (1/(k+1)!) sum c_w (^w).

namespace detail {

// Sign of reordering w into w o perm under graded antisymmetry.
inline int antisym_sign(const std::vector<std::size_t>& perm, const std::vector<int>& g) {
  long s = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) s += 1 + static_cast<long>(g[perm[i]]) * g[perm[j]];
  return sign_of(s);
}

}  // namespace detail

// Adds c * expand(e_0 ^ ... ^ e_k), expanding entries in the basis first.
template <ChainAlgebra Alg>
void add_wedge(const Alg& alg, Chain<typename Alg::Elem>& ch, const std::vector<typename Alg::Elem>& entries,
               const Rational& c) {
  using Elem = typename Alg::Elem;
  Chain<Elem> tensors(ChainKind::Lie, false);
  add_word(alg, tensors, entries, c);
  for (const auto& [w, cw] : tensors.words) {
    auto g = detail::degrees(alg, w);
    std::vector<std::size_t> p(w.size());
    std::iota(p.begin(), p.end(), 0);
    do {
      std::vector<Elem> v(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[p[i]];
      ch.add_basis_word(v, cw * detail::antisym_sign(p, g));
    } while (std::next_permutation(p.begin(), p.end()));
  }
}

template <ChainAlgebra Alg>
Chain<typename Alg::Elem> wedge(const Alg& alg, const std::vector<typename Alg::Elem>& entries,
                                const Rational& c = 1) {
  Chain<typename Alg::Elem> ch(ChainKind::Lie, false);
  add_wedge(alg, ch, entries, c);
  return ch;
}

// Graded commutator of homogeneous elements.
template <ChainAlgebra Alg>
typename Alg::Elem bracket(const Alg& alg, const typename Alg::Elem& a, const typename Alg::Elem& b) {
  const int s = sign_of(static_cast<long>(alg.degree(a)) * alg.degree(b));
  return alg.add(alg.mul(a, b), alg.scale(Rational(-s), alg.mul(b, a)));
}

// Wedge product of expanded chains, via signed shuffles.
template <ChainAlgebra Alg>
Chain<typename Alg::Elem> wedge_product(const Alg& alg, const Chain<typename Alg::Elem>& x,
                                        const Chain<typename Alg::Elem>& y) {
  using Elem = typename Alg::Elem;
  Chain<Elem> out(ChainKind::Lie, false);
  for (const auto& [u, cu] : x.words) {
    for (const auto& [v, cv] : y.words) {
      std::vector<long> pu(u.size()), pv(v.size());
      for (std::size_t i = 0; i < u.size(); ++i) pu[i] = alg.degree(u[i]);
      for (std::size_t j = 0; j < v.size(); ++j) pv[j] = alg.degree(v[j]);
      for_each_shuffle(u.size(), v.size(), [&](const std::vector<bool>& mask) {
        std::vector<Elem> w;
        w.reserve(u.size() + v.size());
        std::size_t iu = 0;
        std::size_t iv = 0;
        long s = 0;
        for (bool b : mask) {
          if (b) {
            for (std::size_t k = iu; k < u.size(); ++k) s += 1 + pv[iv] * pu[k];
            w.push_back(v[iv++]);
          } else {
            w.push_back(u[iu++]);
          }
        }
        out.add_basis_word(w, cu * cv * sign_of(s));
      });
    }
  }
  return out;
}

// Chevalley-Eilenberg part: d(x_0^...^x_k) = sum_{i<j} (-1)^{i+j} eps [x_i,x_j] ^ rest,
// with eps the Koszul sign of moving x_i, x_j to the front. The map to
// wedge degree 0 is dropped.
template <ChainAlgebra Alg>
Chain<typename Alg::Elem> ce_bracket_part(const Alg& alg, const Chain<typename Alg::Elem>& x) {
  using Elem = typename Alg::Elem;
  Chain<Elem> out(ChainKind::Lie, false);
  for (const auto& [w, c] : x.words) {
    const std::size_t m = w.size();
    if (m < 2) continue;
    auto g = detail::degrees(alg, w);
    const Rational scale = c / Rational(factorial(static_cast<Exp>(m)));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        long s = static_cast<long>(i + j);
        for (std::size_t l = 0; l < i; ++l) s += static_cast<long>(g[i]) * g[l];
        for (std::size_t l = 0; l < j; ++l)
          if (l != i) s += static_cast<long>(g[j]) * g[l];
        std::vector<Elem> v{bracket(alg, w[i], w[j])};
        for (std::size_t l = 0; l < m; ++l)
          if (l != i && l != j) v.push_back(w[l]);
        add_wedge(alg, out, v, scale * sign_of(s));
      }
    }
  }
  return out;
}

// Internal differential acting as a graded derivation on each tensor word.
template <ChainAlgebra Alg>
Chain<typename Alg::Elem> ce_internal_part(const Alg& alg, const Chain<typename Alg::Elem>& x) {
  using Elem = typename Alg::Elem;
  Chain<Elem> out(ChainKind::Lie, false);
  for (const auto& [w, c] : x.words) {
    long before = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      Elem di = alg.d(w[i]);
      if (!alg.is_zero(di)) {
        std::vector<Elem> v = w;
        v[i] = di;
        add_word(alg, out, v, c * sign_of(before));
      }
      before += alg.degree(w[i]);
    }
  }
  return out;
}

// Lie word degree: wedge count minus internal degrees (unshifted).
template <ChainAlgebra Alg>
int lie_word_degree(const Alg& alg, const std::vector<typename Alg::Elem>& w) {
  int s = static_cast<int>(w.size());
  for (const auto& e : w) s -= alg.degree(e);
  return s;
}

// Total differential on Lie chains: d_CE + (-1)^{|x|} d_int, |x| the
// unshifted total degree of the word.
template <ChainAlgebra Alg>
Chain<typename Alg::Elem> ce_boundary(const Alg& alg, const Chain<typename Alg::Elem>& x) {
  using Elem = typename Alg::Elem;
  if (x.kind != ChainKind::Lie) throw KindMismatch("ce_boundary needs a Lie chain");
  Chain<Elem> out = ce_bracket_part(alg, x);
  for (const auto& [w, c] : x.words) {
    Chain<Elem> one(ChainKind::Lie, false);
    one.words.emplace(w, c * sign_of(lie_word_degree(alg, w)));
    out = out + ce_internal_part(alg, one);
  }
  return out;
}

// x |-> sum_j (sign^j/j!) x ^ omega^j, truncated to `max_factors` wedge factors.
// With d(g ^ h) = -[g, h] the chain-map sign is -1.
template <ChainAlgebra Alg>
Chain<typename Alg::Elem> lie_mc_twist(const Alg& plain, const Chain<typename Alg::Elem>& x,
                                       const typename Alg::Elem& omega, std::size_t max_factors,
                                       int sign = -1) {
  using Elem = typename Alg::Elem;
  if (x.kind != ChainKind::Lie) throw KindMismatch("lie_mc_twist needs a Lie chain");
  if (!is_maurer_cartan(plain, omega)) throw NotMaurerCartan("omega does not satisfy d omega + omega^2 = 0");
  Chain<Elem> out = restrict_entries(x, max_factors);
  Chain<Elem> om = wedge(plain, {omega});
  Chain<Elem> power = x;
  for (std::size_t j = 1;; ++j) {
    power = restrict_entries(wedge_product(plain, power, om), max_factors);
    if (power.is_zero()) break;
    out = out + Rational(sign_of(sign < 0 ? static_cast<long>(j) : 0)) / Rational(factorial(static_cast<Exp>(j))) * power;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cochains

enum class CochainParity { Hochschild, Lie };

template <class Elem>
struct Cochain {
  std::size_t arity = 0;
  CochainParity parity = CochainParity::Hochschild;
  std::string window;  // description of the Taylor window, for reports
  std::function<Rational(const std::vector<Elem>&)> eval;
};

// Pairing with a chain. Lie chains are expanded, so each tensor word
// contributes 1/arity! of its value.
template <class Elem>
Rational evaluate(const Cochain<Elem>& phi, const Chain<Elem>& x) {
  Rational s = 0;
  for (const auto& [w, c] : x.words)
    if (w.size() == phi.arity) s += c * phi.eval(w);
  if (phi.parity == CochainParity::Lie) s /= Rational(factorial(static_cast<Exp>(phi.arity)));
  return s;
}

template <ChainAlgebra Alg>
Cochain<typename Alg::Elem> coboundary_cochain(const Alg& alg, const Cochain<typename Alg::Elem>& beta) {
  using Elem = typename Alg::Elem;
  Cochain<Elem> out;
  out.arity = beta.arity + 1;
  out.parity = beta.parity;
  out.window = beta.window;
  out.eval = [alg, beta](const std::vector<Elem>& w) -> Rational {
    if (w.size() != beta.arity + 1) return 0;
    if (beta.parity == CochainParity::Hochschild) {
      Chain<Elem> x(ChainKind::Hochschild, false);
      add_word(alg, x, w, 1);
      return evaluate(beta, hochschild_b(alg, x));
    }
    Chain<Elem> x = wedge(alg, w);
    return evaluate(beta, ce_bracket_part(alg, x));
  };
  return out;
}

// FNV-1a, used to derive deterministic pseudo-random weights from basis words.
inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

// A seeded random multilinear cochain: on basis words it takes a weight in
// [-3, 3] derived from (seed, word); `support` limits the basis elements it
// sees (zero outside, modelling a finite Taylor window). Hochschild cochains
// are normalized; Lie cochains are graded-antisymmetrized.
template <ChainAlgebra Alg>
Cochain<typename Alg::Elem> random_cochain(const Alg& alg, std::size_t arity, CochainParity parity,
                                           std::uint64_t seed,
                                           std::function<bool(const typename Alg::Elem&)> support = nullptr) {
  using Elem = typename Alg::Elem;
  auto raw = [alg, seed, support](const std::vector<Elem>& w) -> Rational {
    std::uint64_t h = fnv1a(std::to_string(seed));
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (support && !support(w[i])) return 0;
      h = fnv1a(alg.key(w[i]) + "|", h);
    }
    h ^= h >> 29;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 32;
    return Rational(static_cast<long>(h % 7) - 3);
  };
  Cochain<Elem> out;
  out.arity = arity;
  out.parity = parity;
  out.window = "random";
  out.eval = [alg, raw, parity, arity](const std::vector<Elem>& w) -> Rational {
    if (w.size() != arity) return 0;
    std::vector<std::vector<std::pair<Elem, Rational>>> parts;
    for (const auto& e : w) parts.push_back(alg.decompose(e));
    for (const auto& p : parts)
      if (p.empty()) return 0;
    Rational total = 0;
    std::vector<std::size_t> idx(parts.size(), 0);
    std::vector<Elem> b(parts.size());
    while (true) {
      Rational coef = 1;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        b[i] = parts[i][idx[i]].first;
        coef *= parts[i][idx[i]].second;
      }
      if (parity == CochainParity::Hochschild) {
        bool degenerate = false;
        for (std::size_t i = 1; i < b.size(); ++i) degenerate = degenerate || alg.is_unit(b[i]);
        if (!degenerate) total += coef * raw(b);
      } else {
        auto g = detail::degrees(alg, b);
        std::vector<std::size_t> p(b.size());
        std::iota(p.begin(), p.end(), 0);
        do {
          std::vector<Elem> v(b.size());
          for (std::size_t i = 0; i < b.size(); ++i) v[i] = b[p[i]];
          total += coef * detail::antisym_sign(p, g) * raw(v);
        } while (std::next_permutation(p.begin(), p.end()));
      }
      std::size_t i = 0;
      for (; i < parts.size(); ++i) {
        if (++idx[i] < parts[i].size()) break;
        idx[i] = 0;
      }
      if (i == parts.size()) break;
    }
    return total;
  };
  return out;
}

}  // namespace ncres
