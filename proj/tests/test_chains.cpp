#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace ncres;
using namespace ncres::testing;

namespace {

// M_2(Q) as M_2 over Diff_0.
MatAlgebra m2q() { return MatAlgebra(0, Mode::Diff, 2); }

MatrixOperator rand_m2q(Rng& rng) {
  MatrixOperator m(0, Mode::Diff, 2);
  const std::size_t entries = 1 + rng() % 2;
  for (std::size_t e = 0; e < entries; ++e)
    m.accumulate(rng() % 2, rng() % 2, OperatorElement::constant(0, Mode::Diff, Rational(pick(rng, -2, 2))));
  return m;
}

MatrixOperator E(std::size_t i, std::size_t j, const Rational& c = 1) {
  return unit_embed(OperatorElement::constant(0, Mode::Diff, c), i, j, 2);
}

OperatorElement y1() { return OperatorElement::y(1, Mode::Diff, 0); }
OperatorElement d1() { return OperatorElement::d(1, Mode::Diff, 0); }

template <class Elem>
Chain<Elem> single(ChainKind k, bool norm, std::vector<Elem> w, const Rational& c = 1) {
  Chain<Elem> ch(k, norm);
  ch.add_basis_word(w, c);
  return ch;
}

FormAlgebra polydisc(std::optional<std::size_t> r, bool twisted, std::size_t blocks = 1) {
  if (!twisted) return FormAlgebra(1, Mode::Diff, r);
  return FormAlgebra(1, Mode::Diff, r, omega_std(1, r, blocks));
}

}  // namespace

TEST_CASE("Hochschild boundary of a 1-chain", "[chains]") {
  auto A = m2q();
  auto x = make_chain(A, ChainKind::Hochschild, false, {{{E(0, 1), E(1, 0)}, 1}});
  Chain<MatrixOperator> want(ChainKind::Hochschild, false);
  add_word(A, want, {mat_sub(E(0, 0), E(1, 1))}, 1);
  CHECK(hochschild_boundary(A, x) == want);
}

TEST_CASE("b squares to zero on M_2(Q)", "[chains][property]") {
  auto A = m2q();
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const std::size_t len = 2 + t % 4;
    for (bool norm : {true, false}) {
      auto x = rand_chain(A, ChainKind::Hochschild, norm, len, 2, [&](std::size_t) { return rand_m2q(rng); });
      CHECK(hochschild_boundary(A, hochschild_boundary(A, x)).is_zero());
    }
  }
}

TEST_CASE("b + d squares to zero on the polydisc DG algebra", "[chains][property]") {
  Rng rng(12);
  for (bool twisted : {false, true}) {
    auto A = polydisc(1, twisted);
    for (int t = 0; t < 40; ++t) {
      const std::size_t len = 1 + t % 3;
      auto x = rand_chain(A, ChainKind::Hochschild, t % 2 == 0, len, 1,
                          [&](std::size_t) { return rand_form(rng, 1, rand_degree(rng), 1); });
      CHECK(hochschild_boundary(A, hochschild_boundary(A, x)).is_zero());
    }
  }
}

TEST_CASE("c_cycle at n = 1 and its boundary", "[chains]") {
  OpAlgebra A(1, Mode::Diff);
  auto c = c_cycle_diff(1);
  auto want = make_chain(A, ChainKind::Hochschild, true,
                         {{{A.unit(), y1(), d1()}, 1}, {{A.unit(), d1(), y1()}, -1}});
  CHECK(c == want);
  CHECK(hochschild_boundary(A, c).is_zero());
  CHECK(hochschild_boundary(OpAlgebra(2, Mode::Diff), c_cycle_diff(2)).is_zero());
}

TEST_CASE("shuffle product examples", "[chains]") {
  auto A = m2q();
  auto a0 = E(0, 1), a1 = E(1, 0), b0 = E(1, 1), b1 = E(0, 0, 2);
  auto x = make_chain(A, ChainKind::Hochschild, false, {{{a0, a1}, 1}});
  auto y0 = make_chain(A, ChainKind::Hochschild, false, {{{b0}, 1}});
  CHECK(shuffle_product(A, x, y0) == make_chain(A, ChainKind::Hochschild, false, {{{mat_mul(a0, b0), a1}, 1}}));
  auto y = make_chain(A, ChainKind::Hochschild, false, {{{b0, b1}, 1}});
  auto want = make_chain(A, ChainKind::Hochschild, false,
                         {{{mat_mul(a0, b0), a1, b1}, 1}, {{mat_mul(a0, b0), b1, a1}, -1}});
  CHECK(shuffle_product(A, x, y) == want);
  auto unit = make_chain(A, ChainKind::Hochschild, false, {{{A.unit()}, 1}});
  CHECK(shuffle_product(A, x, unit) == x);
}

TEST_CASE("Maurer-Cartan twist on Hochschild chains", "[chains][twist]") {
  const std::size_t M = 4;
  auto plain = polydisc(1, false);
  auto tw = polydisc(1, true);
  const FormOperator omega = *tw.omega();
  Rng rng(21);

  SECTION("omega = 0 is the identity") {
    auto x = rand_chain(plain, ChainKind::Hochschild, true, 2, 2, [&](std::size_t) { return rand_form(rng, 1, 0, 1); });
    CHECK(mc_twist_hoch(plain, x, plain.zero(), M) == x);
  }
  SECTION("a non-flat form is rejected") {
    FormOperator bad = form_add(omega, form_from(dz_key(1, 0), scalar_block(y1(), 1)));
    bad = form_add(bad, form_from(dz_key(1, 0, true), scalar_block(d1(), 1)));
    auto x = rand_chain(plain, ChainKind::Hochschild, true, 1, 1, [&](std::size_t) { return rand_form(rng, 1, 0, 1); });
    CHECK_THROWS_AS(mc_twist_hoch(plain, x, bad, M), NotMaurerCartan);
  }
  SECTION("chain map and inverse twist") {
    for (int t = 0; t < 20; ++t) {
      auto x = rand_chain(tw, ChainKind::Hochschild, true, 1 + t % 3, 1,
                          [&](std::size_t) { return rand_form(rng, 1, rand_degree(rng), 1); });
      auto lhs = hochschild_boundary(plain, mc_twist_hoch(plain, x, omega, M));
      auto rhs = mc_twist_hoch(plain, hochschild_boundary(tw, x), omega, M);
      CHECK(restrict_entries(lhs, M - 1) == restrict_entries(rhs, M - 1));
      auto back = mc_twist_hoch(tw, mc_twist_hoch(plain, x, omega, M), form_scale(-1, omega), M);
      CHECK(back == restrict_entries(x, M));
    }
  }
}

TEST_CASE("cyclic operator, norm and Connes projection", "[chains][cyclic]") {
  auto A = m2q();
  auto D1 = E(0, 1), D2 = E(1, 0);
  auto x = single(ChainKind::Hochschild, false, std::vector{D1, D2});
  CHECK(cyclic_t(A, x) == single(ChainKind::Hochschild, false, std::vector{D2, D1}, -1));
  CHECK(cyclic_N(A, x) == single(ChainKind::Hochschild, false, std::vector{D1, D2}) +
                              single(ChainKind::Hochschild, false, std::vector{D2, D1}, -1));

  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = 1 + t % 5;
    auto w = rand_chain(A, ChainKind::Hochschild, false, k, 2, [&](std::size_t) { return rand_m2q(rng); });
    Chain<MatrixOperator> tk = w;
    for (std::size_t i = 0; i < k; ++i) tk = cyclic_t(A, tk);
    CHECK(tk == w);
    CHECK(cyclic_N(A, w - cyclic_t(A, w)).is_zero());
    auto Nw = cyclic_N(A, w);
    CHECK((Nw - cyclic_t(A, Nw)).is_zero());
    // (1 - t)w vanishes in the Connes quotient, and projection is canonical.
    CHECK(connes_project(A, w - cyclic_t(A, w)).is_zero());
    CHECK(connes_equal(A, w, cyclic_t(A, w)));
    CHECK(connes_project(A, cyclic_t(A, w)) == connes_project(A, w));
  }
}

TEST_CASE("cyclic operator on graded words", "[chains][cyclic]") {
  auto A = polydisc(1, false);
  Rng rng(4);
  for (int t = 0; t < 30; ++t) {
    const std::size_t k = 1 + t % 4;
    auto w = rand_chain(A, ChainKind::Hochschild, false, k, 1,
                        [&](std::size_t) { return rand_form(rng, 1, rand_degree(rng), 1); });
    Chain<FormOperator> tk = w;
    for (std::size_t i = 0; i < k; ++i) tk = cyclic_t(A, tk);
    CHECK(tk == w);
    CHECK(cyclic_N(A, w - cyclic_t(A, w)).is_zero());
  }
}

TEST_CASE("Tsygan bicomplex", "[chains][cyclic]") {
  auto A = m2q();
  Rng rng(8);
  auto gen = [&](std::size_t) { return rand_m2q(rng); };
  SECTION("a single column is the Hochschild boundary") {
    TsyganElement<MatrixOperator> x;
    x.columns[0] = rand_chain(A, ChainKind::Hochschild, false, 3, 2, gen);
    auto d = tsygan_total(A, x);
    REQUIRE(d.columns.size() <= 1);
    CHECK(d.columns[0] == hochschild_boundary(A, x.columns[0]));
  }
  SECTION("total differential squares to zero") {
    for (int t = 0; t < 30; ++t) {
      TsyganElement<MatrixOperator> x;
      for (int p = 0; p < 4; ++p) {
        auto ch = rand_chain(A, p % 2 ? ChainKind::Bar : ChainKind::Hochschild, false, 1 + (t + p) % 4, 1, gen);
        x.columns[p] = ch;
      }
      auto dd = tsygan_total(A, tsygan_total(A, x));
      CHECK(dd.columns.empty());
    }
  }
  SECTION("wrong column kind is rejected") {
    TsyganElement<MatrixOperator> x;
    x.columns[1] = rand_chain(A, ChainKind::Hochschild, false, 2, 1, gen);
    CHECK_THROWS_AS(tsygan_total(A, x), ShapeError);
  }
}

TEST_CASE("Chevalley-Eilenberg boundary", "[chains][lie]") {
  MatAlgebra gl(1, Mode::Diff, std::nullopt);
  auto g0 = unit_embed(y1(), 0, 1), g1 = unit_embed(d1(), 1, 0);
  SECTION("two factors") {
    auto x = wedge(gl, {g0, g1});
    CHECK(ce_boundary(gl, x) == wedge(gl, {bracket(gl, g0, g1)}, -1));
    CHECK(ce_boundary(gl, wedge(gl, {g0, g0})).is_zero());
  }
  SECTION("d squared vanishes on random 4-chains") {
    Rng rng(9);
    for (int t = 0; t < 100; ++t) {
      const std::size_t k = 3 + t % 2;
      auto x = rand_chain(gl, ChainKind::Lie, false, k, 1,
                          [&](std::size_t) { return rand_mat(rng, 1, Mode::Diff, std::nullopt, 1, 1, 0, 1); });
      CHECK(ce_boundary(gl, ce_boundary(gl, x)).is_zero());
    }
  }
  SECTION("d squared vanishes over the DG polydisc model") {
    Rng rng(10);
    for (bool twisted : {false, true}) {
      auto A = polydisc(std::nullopt, twisted, 2);
      for (int t = 0; t < 20; ++t) {
        const std::size_t k = 1 + t % 3;
        auto x = rand_chain(A, ChainKind::Lie, false, k, 1,
                            [&](std::size_t) { return rand_form(rng, std::nullopt, rand_degree(rng), 1); });
        CHECK(ce_boundary(A, ce_boundary(A, x)).is_zero());
      }
    }
  }
}

TEST_CASE("Maurer-Cartan twist on Lie chains", "[chains][twist][lie]") {
  const std::size_t M = 4;
  auto plain = polydisc(std::nullopt, false, 2);
  auto tw = polydisc(std::nullopt, true, 2);
  const FormOperator omega = *tw.omega();
  Rng rng(31);
  auto x0 = rand_chain(plain, ChainKind::Lie, false, 2, 1, [&](std::size_t) { return rand_form(rng, std::nullopt, 0, 1); });
  CHECK(lie_mc_twist(plain, x0, plain.zero(), M) == x0);
  for (int t = 0; t < 20; ++t) {
    auto x = rand_chain(tw, ChainKind::Lie, false, 1 + t % 3, 1,
                        [&](std::size_t) { return rand_form(rng, std::nullopt, rand_degree(rng), 1); });
    auto lhs = ce_boundary(plain, lie_mc_twist(plain, x, omega, M));
    auto rhs = lie_mc_twist(plain, ce_boundary(tw, x), omega, M);
    CHECK(restrict_entries(lhs, M - 1) == restrict_entries(rhs, M - 1));
    auto back = lie_mc_twist(tw, lie_mc_twist(plain, x, omega, M), form_scale(-1, omega), M);
    CHECK(back == restrict_entries(x, M));
  }
}

TEST_CASE("generalized trace", "[chains][trace]") {
  MatAlgebra mat(1, Mode::Diff, 2);
  OpAlgebra base(1, Mode::Diff);
  SECTION("identity matrices of size 1") {
    MatAlgebra one(1, Mode::Diff, 1);
    auto x = make_chain(one, ChainKind::Hochschild, true, {{{one.unit(), unit_embed(y1(), 0, 0, 1)}, 1}});
    CHECK(generalized_trace(one, x) == make_chain(base, ChainKind::Hochschild, true, {{{base.unit(), y1()}, 1}}));
  }
  SECTION("c_r_cycle maps to r c_cycle") {
    for (std::size_t r : {1u, 2u, 3u}) {
      MatAlgebra m(1, Mode::Diff, r);
      CHECK(generalized_trace(m, c_r_cycle(1, r)) == Rational(static_cast<long>(r)) * c_cycle_diff(1));
    }
  }
  SECTION("commutes with b") {
    Rng rng(13);
    for (int t = 0; t < 100; ++t) {
      auto x = rand_chain(mat, ChainKind::Hochschild, false, 1 + t % 4, 1,
                          [&](std::size_t) { return rand_mat(rng, 1, Mode::Diff, 2, 2, 1, 0, 1); });
      CHECK(generalized_trace(mat, hochschild_boundary(mat, x)) ==
            hochschild_boundary(base, generalized_trace(mat, x)));
    }
  }
}

TEST_CASE("L map", "[chains][lie]") {
  MatAlgebra gl(1, Mode::Diff, std::nullopt);
  OpAlgebra base(1, Mode::Diff);
  SECTION("a diagonal 1-word maps to its entry") {
    auto D = op_add(op_mul(y1(), d1()), OperatorElement::constant(1, Mode::Diff, 3));
    auto out = L_map(gl, wedge(gl, {unit_embed(D, 0, 0)}));
    CHECK(connes_equal(base, out, make_chain(base, ChainKind::Connes, false, {{{D}, 1}})));
  }
  SECTION("two factors give the generalized trace") {
    auto M0 = unit_embed(y1(), 0, 1), M1 = unit_embed(d1(), 1, 0);
    auto out = L_map(gl, wedge(gl, {M0, M1}));
    Chain<MatrixOperator> h(ChainKind::Hochschild, false);
    add_word(gl, h, {M0, M1}, 1);
    auto want = generalized_trace(gl, h);
    want.kind = ChainKind::Connes;
    CHECK(connes_equal(base, out, want));
  }
  SECTION("chain map up to the shift sign") {
    Rng rng(17);
    for (int t = 0; t < 100; ++t) {
      const std::size_t k = 2 + t % 2;
      auto x = rand_chain(gl, ChainKind::Lie, false, k, 1,
                          [&](std::size_t) { return rand_mat(rng, 1, Mode::Diff, std::nullopt, 2, 1, 0, 1); });
      auto lhs = L_map(gl, ce_boundary(gl, x));
      auto rhs = hochschild_boundary(base, L_map(gl, x));
      CHECK(connes_equal(base, lhs, Rational(-1) * rhs));
    }
  }
}

TEST_CASE("coboundary cochains", "[chains][cochain]") {
  OpAlgebra A(1, Mode::Diff);
  auto beta = random_cochain(A, 2, CochainParity::Hochschild, 5);
  auto db = coboundary_cochain(A, beta);
  CHECK(db.arity == 3);
  auto ddb = coboundary_cochain(A, db);
  CHECK(ddb.arity == 4);
  CHECK(evaluate(db, c_cycle_diff(1)) == 0);
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    std::vector<OperatorElement> w;
    for (int i = 0; i < 4; ++i) w.push_back(rand_op(rng, 1, Mode::Diff, 2, 0, 2));
    CHECK(ddb.eval(w) == 0);
  }
  MatAlgebra gl(1, Mode::Diff, std::nullopt);
  auto lb = random_cochain(gl, 2, CochainParity::Lie, 6);
  auto dlb = coboundary_cochain(gl, lb);
  auto ddlb = coboundary_cochain(gl, dlb);
  for (int t = 0; t < 10; ++t) {
    std::vector<MatrixOperator> w;
    for (int i = 0; i < 4; ++i) w.push_back(rand_mat(rng, 1, Mode::Diff, std::nullopt, 1, 1, 0, 1));
    CHECK(ddlb.eval(w) == 0);
  }
}
