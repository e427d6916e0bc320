#include <catch_amalgamated.hpp>

#include "ncres/gfmap.hpp"
#include "support.hpp"

using namespace ncres;
using namespace ncres::testing;

namespace {

FormKey key(int mask, Exp z, Exp zbar) {
  FormKey k = FormKey::one(1);
  k.mask = static_cast<std::uint32_t>(mask);
  k.z[0] = z;
  k.zbar[0] = zbar;
  return k;
}

OperatorElement y1() { return OperatorElement::y(1, Mode::Diff, 0); }
OperatorElement d1() { return OperatorElement::d(1, Mode::Diff, 0); }
OperatorElement one() { return OperatorElement::constant(1, Mode::Diff, 1); }

FormOperator F(const FormKey& k, const OperatorElement& e, std::optional<std::size_t> r = 1) {
  return form_from(k, scalar_block(e, r));
}

// Random holomorphic operator z^a d_z^b sums, written with y for z.
MatrixOperator rand_holomorphic(Rng& rng, std::size_t r) {
  MatrixOperator m(1, Mode::Diff, r);
  for (int e = 0; e < 2; ++e) m.accumulate(rng() % r, rng() % r, rand_op(rng, 1, Mode::Diff, 2, 0, 3));
  return m;
}

bool same(const ScalarForm& a, const ScalarForm& b) { return (a + Rational(-1) * b).is_zero(); }

}  // namespace

TEST_CASE("de Rham differential and exterior product", "[forms]") {
  ScalarForm z(1), zzb(1);
  z.add(key(0, 1, 0), 1);
  zzb.add(key(0, 1, 1), 1);
  ScalarForm dz(1);
  dz.add(key(1, 0, 0), 1);
  CHECK(form_d(z) == dz);
  CHECK(wedge(dz, dz).is_zero());
  ScalarForm want(1);
  want.add(key(1, 0, 1), 1);
  want.add(key(2, 1, 0), 1);
  CHECK(form_d(zzb) == want);

  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    auto a = rand_form(rng, 2, rand_degree(rng));
    CHECK(form_d(form_d(a)).is_zero());
  }
}

TEST_CASE("Maurer-Cartan check", "[forms]") {
  CHECK(mc_check(omega_std(1, 1)));
  CHECK(mc_check(omega_std(2, 2)));
  CHECK(mc_check(F(key(1, 0, 0), y1())));
  CHECK(mc_check(omega_heis(1)));
  CHECK_FALSE(mc_check(form_add(F(key(2, 0, 0), d1()), F(key(1, 0, 0), op_mul(y1(), d1())))));
  CHECK_FALSE(mc_check(F(key(0, 0, 0), d1())));
}

TEST_CASE("twisted differential squares to zero", "[forms][property]") {
  Rng rng(2);
  for (const auto& omega : {omega_std(1, 2), omega_heis(2)}) {
    for (int t = 0; t < 50; ++t) {
      auto a = rand_form(rng, 2, rand_degree(rng));
      CHECK(twisted_d(twisted_d(a, omega), omega).is_zero());
    }
  }
  FormOperator zero(1, Mode::Diff, 2);
  auto a = rand_form(rng, 2, 0);
  CHECK(twisted_d(a, zero) == form_d(a));
  CHECK_THROWS_AS(twisted_d(a, F(key(0, 0, 0), d1(), 2)), NotMaurerCartan);
}

TEST_CASE("Taylor flat sections", "[forms][flat]") {
  const auto omega = omega_std(1, 1);
  SECTION("examples") {
    auto zhat = taylor_flat_section(scalar_block(y1(), 1));
    CHECK(zhat == form_add(F(key(0, 0, 0), y1()), F(key(0, 1, 0), one())));
    CHECK(twisted_d(zhat, omega).is_zero());
    CHECK(taylor_flat_section(scalar_block(d1(), 1)) == F(key(0, 0, 0), d1()));
    auto z2d = scalar_block(op_mul(op_mul(y1(), y1()), d1()), 1);
    auto hat = taylor_flat_section(z2d);
    CHECK(twisted_d(hat, omega).is_zero());
    // (y + z)^2 d = y^2 d + 2 z y d + z^2 d
    auto want = form_add(F(key(0, 0, 0), op_mul(op_mul(y1(), y1()), d1())),
                         form_add(F(key(0, 1, 0), scalar_mul(2, op_mul(y1(), d1()))), F(key(0, 2, 0), d1())));
    CHECK(hat == want);
  }
  SECTION("non-holomorphic input is rejected") {
    FormOperator D(1, Mode::Diff, 1);
    D.accumulate(key(0, 0, 1), scalar_block(d1(), 1));
    CHECK_THROWS_AS(taylor_flat_section(D), NotHolomorphic);
    FormOperator Dz(1, Mode::Diff, 1);
    Dz.accumulate(key(0, 2, 0), scalar_block(d1(), 1));
    CHECK(taylor_flat_section(Dz) == taylor_flat_section(scalar_block(op_mul(op_mul(y1(), y1()), d1()), 1)));
  }
  SECTION("flatness and multiplicativity on random operators") {
    Rng rng(3);
    for (std::size_t r : {1u, 2u}) {
      const auto om = omega_std(1, r);
      for (int t = 0; t < 50; ++t) {
        auto D1 = rand_holomorphic(rng, r), D2 = rand_holomorphic(rng, r);
        auto h1 = taylor_flat_section(D1), h2 = taylor_flat_section(D2);
        CHECK(twisted_d(h1, om).is_zero());
        CHECK(taylor_flat_section(mat_mul(D1, D2)) == form_mul(h1, h2));
      }
    }
  }
  SECTION("heisenberg model") {
    Rng rng(4);
    const auto om = omega_heis(2);
    for (int t = 0; t < 50; ++t) {
      auto D1 = rand_holomorphic(rng, 2), D2 = rand_holomorphic(rng, 2);
      auto h1 = heis_flat_section(D1);
      CHECK(twisted_d(h1, om).is_zero());
      CHECK(heis_flat_section(mat_mul(D1, D2)) == form_mul(h1, heis_flat_section(D2)));
    }
  }
}

TEST_CASE("evaluation of Hochschild cochains", "[gfmap]") {
  const std::size_t n = 1;
  MatAlgebra mat(1, Mode::Diff, 1);
  FormAlgebra plain(1, Mode::Diff, 1);
  auto beta = random_cochain(mat, 2, CochainParity::Hochschild, 3);
  auto psi = coboundary_cochain(mat, beta);

  SECTION("words of the wrong length give zero") {
    Chain<FormOperator> mu(ChainKind::Hochschild, true);
    add_word(plain, mu, {F(key(0, 1, 0), y1()), F(key(1, 0, 0), d1())}, 1);
    CHECK(eval_cochain(psi, mu, n).is_zero());
  }
  SECTION("form-free words give the scalar value") {
    auto a = scalar_block(y1(), 1), b = scalar_block(d1(), 1), c = scalar_block(op_mul(y1(), d1()), 1);
    Chain<FormOperator> mu(ChainKind::Hochschild, false);
    add_word(plain, mu, {form_from(FormKey::one(1), a), form_from(FormKey::one(1), b), form_from(FormKey::one(1), c)}, 1);
    auto v = eval_cochain(psi, mu, n);
    CHECK(v.is_constant());
    CHECK(v.constant_value() == psi.eval({a, b, c}));
  }
  SECTION("arity is checked") {
    CHECK_THROWS_AS(eval_cochain(beta, Chain<FormOperator>(), n), ArityMismatch);
  }
  SECTION("eval is a chain map") {
    Rng rng(5);
    int nonzero = 0;
    for (int t = 0; t < 150; ++t) {
      auto mu = rand_chain(plain, ChainKind::Hochschild, true, 3 + t % 2, 1,
                           [&](std::size_t) { return rand_form(rng, 1, rand_degree(rng), 1); });
      auto lhs = eval_cochain(psi, hochschild_boundary(plain, mu), n);
      CHECK(same(lhs, form_d(eval_cochain(psi, mu, n))));
      nonzero += !lhs.is_zero();
    }
    CHECK(nonzero > 5);
  }
}

TEST_CASE("f map", "[gfmap]") {
  const std::size_t n = 1;
  MatAlgebra mat(1, Mode::Diff, 1);
  auto psi = coboundary_cochain(mat, random_cochain(mat, 2, CochainParity::Hochschild, 9));
  FormAlgebra plain(1, Mode::Diff, 1);
  FormAlgebra tw(1, Mode::Diff, 1, omega_std(1, 1));
  Rng rng(6);

  SECTION("omega = 0 is the signed evaluation") {
    FormOperator zero(1, Mode::Diff, 1);
    for (int t = 0; t < 20; ++t) {
      auto mu = rand_chain(plain, ChainKind::Hochschild, true, 3, 1,
                           [&](std::size_t) { return rand_form(rng, 1, rand_degree(rng), 1); });
      CHECK(f_map(psi, mu, zero, n) == involution(eval_cochain(psi, mu, n)));
    }
  }
  SECTION("f(b mu) = (-1)^p d f(mu)") {
    int nonzero = 0;
    for (int t = 0; t < 150; ++t) {
      auto mu = rand_chain(tw, ChainKind::Hochschild, true, 2 + t % 3, 1,
                           [&](std::size_t) { return rand_form(rng, 1, rand_degree(rng), 1); });
      const int p = chain_degree(tw, mu);
      auto lhs = f_map(psi, hochschild_boundary(tw, mu), *tw.omega(), n);
      auto rhs = Rational(sign_of(p)) * form_d(f_map(psi, mu, *tw.omega(), n));
      CHECK(same(lhs, rhs));
      nonzero += !lhs.is_zero();
    }
    CHECK(nonzero > 5);
  }
  SECTION("flat lift of the c_r cycle") {
    for (std::size_t r : {1u, 2u}) {
      MatAlgebra m(1, Mode::Diff, r);
      auto ps = coboundary_cochain(m, random_cochain(m, 2, CochainParity::Hochschild, 40 + r));
      auto lift = flat_lift_cycle(1, r);
      FormAlgebra twr(1, Mode::Diff, r, omega_std(1, r));
      CHECK(hochschild_boundary(twr, lift).is_zero());
      auto v = f_map(ps, lift, omega_std(1, r), n);
      CHECK(v.is_constant());
      CHECK(v.constant_value() == evaluate(ps, c_r_cycle(1, r)));
      CHECK(v.constant_value() == 0);
      // A non-cocycle still gives a closed form here, but not a constant one in general.
      auto rough = random_cochain(m, 3, CochainParity::Hochschild, 77);
      CHECK(form_d(f_map(rough, lift, omega_std(1, r), n)).is_zero());
    }
  }
}

TEST_CASE("lambda map", "[gfmap][lie]") {
  const std::size_t n = 1;
  MatAlgebra gl(1, Mode::Diff, std::nullopt);
  auto xi = coboundary_cochain(gl, random_cochain(gl, 2, CochainParity::Lie, 3));
  FormAlgebra plain(1, Mode::Diff, std::nullopt);
  Rng rng(7);
  SECTION("omega = 0 is the signed Lie evaluation") {
    FormOperator zero(1, Mode::Diff, std::nullopt);
    for (int t = 0; t < 10; ++t) {
      auto mu = rand_chain(plain, ChainKind::Lie, false, 3, 1,
                           [&](std::size_t) { return rand_form(rng, std::nullopt, rand_degree(rng), 1); });
      CHECK(lambda_map(xi, mu, zero, n) == involution(eval_lie_cochain(xi, mu, n)));
    }
  }
  SECTION("lambda(d mu) = -d lambda(mu)") {
    for (const auto& omega : {omega_std(1, std::nullopt, 2), omega_heis(std::nullopt, 2)}) {
      FormAlgebra tw(1, Mode::Diff, std::nullopt, omega);
      int nonzero = 0;
      for (int t = 0; t < 120; ++t) {
        auto mu = rand_chain(tw, ChainKind::Lie, false, 1 + t % 3, 1,
                             [&](std::size_t) { return rand_form(rng, std::nullopt, rand_degree(rng), 1); });
        auto lhs = lambda_map(xi, ce_boundary(tw, mu), omega, n);
        CHECK(same(lhs, Rational(-1) * form_d(lambda_map(xi, mu, omega, n))));
        nonzero += !lhs.is_zero();
      }
      CHECK(nonzero > 5);
    }
  }
}
