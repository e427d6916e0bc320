#pragma once

// Randomized identity batteries over the chain complexes and twists. Each
// identity reports how many random instances were checked and how many failed.

#include <string>
#include <vector>

#include "ncres/sampling.hpp"

namespace ncres {

struct IdentityResult {
  std::string name;
  std::size_t checked = 0;
  std::size_t failed = 0;
  bool ok() const { return checked > 0 && failed == 0; }
};

namespace detail {

// Matrices in M_2(Q), realized as M_2 over Diff_0.
inline MatrixOperator rand_m2q(sampling::Rng& rng) {
  MatrixOperator m(0, Mode::Diff, 2);
  const std::size_t entries = 1 + rng() % 2;
  for (std::size_t e = 0; e < entries; ++e)
    m.accumulate(rng() % 2, rng() % 2,
                 OperatorElement::constant(0, Mode::Diff, Rational(sampling::pick(rng, -2, 2))));
  return m;
}

inline void tally(IdentityResult& r, bool holds) {
  ++r.checked;
  if (!holds) ++r.failed;
}

}  // namespace detail

// b^2 = 0, d_CE^2 = 0, t^k = id, N(1 - t) = 0, the L chain map, trace/b
// commutation and D^2 = 0 on the Tsygan bicomplex.
inline std::vector<IdentityResult> chain_identity_suite(std::size_t trials, std::uint64_t seed) {
  using namespace sampling;
  Rng rng(seed);
  const MatAlgebra m2(0, Mode::Diff, 2);
  const MatAlgebra gl(1, Mode::Diff, std::nullopt);
  const MatAlgebra mat2(1, Mode::Diff, 2);
  const OpAlgebra base(1, Mode::Diff);
  auto gen_m2 = [&](std::size_t) { return detail::rand_m2q(rng); };
  auto gen_gl = [&](std::size_t) { return rand_mat(rng, 1, Mode::Diff, std::nullopt, 2, 1, 0, 1); };

  IdentityResult bb{"b^2 = 0"}, dd{"d_CE^2 = 0"}, tk{"t^k = id"}, nt{"N(1 - t) = 0"}, lmap{"L chain map"},
      tr{"trace commutes with b"}, tsy{"Tsygan D^2 = 0"};
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t k = 1 + t % 5;
    auto h = rand_chain(m2, ChainKind::Hochschild, t % 2 == 0, 2 + t % 4, 2, gen_m2);
    detail::tally(bb, hochschild_boundary(m2, hochschild_boundary(m2, h)).is_zero());

    auto lie = rand_chain(gl, ChainKind::Lie, false, 3 + t % 2, 1, gen_gl);
    detail::tally(dd, ce_boundary(gl, ce_boundary(gl, lie)).is_zero());

    auto w = rand_chain(m2, ChainKind::Hochschild, false, k, 2, gen_m2);
    Chain<MatrixOperator> rot = w;
    for (std::size_t i = 0; i < k; ++i) rot = cyclic_t(m2, rot);
    detail::tally(tk, rot == w);
    detail::tally(nt, cyclic_N(m2, w - cyclic_t(m2, w)).is_zero());

    auto x = rand_chain(gl, ChainKind::Lie, false, 2 + t % 2, 1, gen_gl);
    auto lhs = L_map(gl, ce_boundary(gl, x));
    auto rhs = hochschild_boundary(base, L_map(gl, x));
    detail::tally(lmap, connes_equal(base, lhs, Rational(-1) * rhs));

    auto y = rand_chain(mat2, ChainKind::Hochschild, false, 1 + t % 4, 1,
                        [&](std::size_t) { return rand_mat(rng, 1, Mode::Diff, 2, 2, 1, 0, 1); });
    detail::tally(tr, generalized_trace(mat2, hochschild_boundary(mat2, y)) ==
                          hochschild_boundary(base, generalized_trace(mat2, y)));

    TsyganElement<MatrixOperator> z;
    for (int p = 0; p < 4; ++p)
      z.columns[p] = rand_chain(m2, p % 2 ? ChainKind::Bar : ChainKind::Hochschild, false,
                                1 + (t + static_cast<std::size_t>(p)) % 4, 1, gen_m2);
    detail::tally(tsy, tsygan_total(m2, tsygan_total(m2, z)).columns.empty());
  }
  return {bb, dd, tk, nt, lmap, tr, tsy};
}

// Maurer-Cartan twists by omega_std over the n = 1 polydisc model: both are
// chain maps up to entry count `max_entries`, and twisting by -omega undoes them.
inline std::vector<IdentityResult> twist_suite(std::size_t trials, std::uint64_t seed, std::size_t max_entries = 4) {
  using namespace sampling;
  Rng rng(seed);
  const std::size_t M = max_entries;
  const FormAlgebra hplain(1, Mode::Diff, 1), htw(1, Mode::Diff, 1, omega_std(1, 1));
  const FormAlgebra lplain(1, Mode::Diff, std::nullopt), ltw(1, Mode::Diff, std::nullopt, omega_std(1, std::nullopt, 2));
  const FormOperator homega = *htw.omega(), lomega = *ltw.omega();

  IdentityResult hmap{"Hochschild twist is a chain map"}, hinv{"Hochschild twist inverse"},
      lmap{"Lie twist is a chain map"}, linv{"Lie twist inverse"};
  for (std::size_t t = 0; t < trials; ++t) {
    auto x = rand_chain(htw, ChainKind::Hochschild, true, 1 + t % 3, 1,
                        [&](std::size_t) { return rand_form(rng, 1, rand_degree(rng), 1); });
    auto lhs = hochschild_boundary(hplain, mc_twist_hoch(hplain, x, homega, M));
    auto rhs = mc_twist_hoch(hplain, hochschild_boundary(htw, x), homega, M);
    detail::tally(hmap, restrict_entries(lhs, M - 1) == restrict_entries(rhs, M - 1));
    auto back = mc_twist_hoch(htw, mc_twist_hoch(hplain, x, homega, M), form_scale(-1, homega), M);
    detail::tally(hinv, back == restrict_entries(x, M));

    auto l = rand_chain(ltw, ChainKind::Lie, false, 1 + t % 3, 1,
                        [&](std::size_t) { return rand_form(rng, std::nullopt, rand_degree(rng), 1); });
    auto llhs = ce_boundary(lplain, lie_mc_twist(lplain, l, lomega, M));
    auto lrhs = lie_mc_twist(lplain, ce_boundary(ltw, l), lomega, M);
    detail::tally(lmap, restrict_entries(llhs, M - 1) == restrict_entries(lrhs, M - 1));
    auto lback = lie_mc_twist(ltw, lie_mc_twist(lplain, l, lomega, M), form_scale(-1, lomega), M);
    detail::tally(linv, lback == restrict_entries(l, M));
  }
  return {hmap, hinv, lmap, linv};
}

}  // namespace ncres
