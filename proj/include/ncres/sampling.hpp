#pragma once

// Random generators for property checks.

#include <random>

#include "ncres/forms.hpp"

namespace ncres::sampling {

using Rng = std::mt19937_64;

inline long pick(Rng& rng, long lo, long hi) {
  return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

inline Rational small_rational(Rng& rng) {
  long num = pick(rng, -4, 4);
  if (num == 0) num = 1;
  return make_rational(num, static_cast<unsigned long>(pick(rng, 1, 3)));
}

inline OperatorElement rand_op(Rng& rng, std::size_t n, Mode mode, std::size_t terms, Exp lo, Exp hi) {
  if (mode == Mode::Diff) lo = std::max<Exp>(lo, 0);
  OperatorElement::Terms t;
  for (std::size_t k = 0; k < terms; ++k) {
    Monomial m{std::vector<Exp>(n), std::vector<Exp>(n)};
    for (std::size_t v = 0; v < n; ++v) {
      m.y[v] = pick(rng, lo, hi);
      m.d[v] = pick(rng, lo, hi);
    }
    t[m] += small_rational(rng);
  }
  return OperatorElement::make(n, mode, t);
}

inline MatrixOperator rand_mat(Rng& rng, std::size_t n, Mode mode, std::optional<std::size_t> size,
                               std::size_t entries, std::size_t terms, Exp lo, Exp hi) {
  const std::size_t span = size ? *size : 3;
  MatrixOperator m(n, mode, size);
  for (std::size_t e = 0; e < entries; ++e)
    m.accumulate(rng() % span, rng() % span, rand_op(rng, n, mode, terms, lo, hi));
  return m;
}

// Homogeneous element of the n = 1 polydisc model of the given form degree.
inline FormOperator rand_form(Rng& rng, std::optional<std::size_t> size, int degree, std::size_t comps = 2) {
  FormOperator f(1, Mode::Diff, size);
  for (std::size_t c = 0; c < comps; ++c) {
    FormKey k = FormKey::one(1);
    if (degree == 1) k.mask = 1u << (rng() % 2);
    if (degree == 2) k.mask = 3u;
    k.z[0] = pick(rng, 0, 1);
    k.zbar[0] = pick(rng, 0, 1);
    f.accumulate(k, rand_mat(rng, 1, Mode::Diff, size, 1, 1, 0, 1));
  }
  return f;
}

inline int rand_degree(Rng& rng) {
  long r = pick(rng, 0, 5);
  return r < 3 ? 0 : (r < 5 ? 1 : 2);
}

template <class Alg, class Gen>
Chain<typename Alg::Elem> rand_chain(const Alg& alg, ChainKind kind, bool normalized, std::size_t entries,
                                     std::size_t words, Gen&& gen) {
  Chain<typename Alg::Elem> ch(kind, normalized);
  for (std::size_t w = 0; w < words; ++w) {
    std::vector<typename Alg::Elem> v;
    for (std::size_t i = 0; i < entries; ++i) v.push_back(gen(i));
    if (kind == ChainKind::Lie) add_wedge(alg, ch, v, 1);
    else add_word(alg, ch, v, 1);
  }
  return ch;
}

}  // namespace ncres::sampling
