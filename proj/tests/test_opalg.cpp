#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace ncres;
using namespace ncres::testing;

namespace {

OperatorElement mono(std::size_t n, Mode mode, std::vector<Exp> y, std::vector<Exp> d, const Rational& c = 1) {
  return OperatorElement::monomial(n, mode, Monomial{std::move(y), std::move(d)}, c);
}

// Polynomials in x_1..x_n, acted on by y_i = x_i and d_i = d/dx_i.
using Poly = std::map<std::vector<Exp>, Rational>;

Poly act(const OperatorElement& a, const Poly& p) {
  Poly out;
  for (const auto& [m, c] : a.terms()) {
    for (const auto& [e, v] : p) {
      std::vector<Exp> x = e;
      Rational coef = c * v;
      for (std::size_t i = 0; i < x.size() && coef != 0; ++i) {
        if (m.d[i] > x[i]) coef = 0;
        else {
          coef *= Rational(falling(x[i], m.d[i]));
          x[i] += m.y[i] - m.d[i];
        }
      }
      if (coef != 0) out[x] += coef;
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

Poly rand_poly(Rng& rng, std::size_t n) {
  Poly p;
  for (int k = 0; k < 3; ++k) {
    std::vector<Exp> e(n);
    for (auto& x : e) x = pick(rng, 0, 4);
    p[e] += small_rational(rng);
  }
  return p;
}

const TruncationWindow W6 = TruncationWindow::uniform(1, -6);

}  // namespace

TEST_CASE("normal ordering examples", "[opalg]") {
  const auto y = OperatorElement::y(1, Mode::Diff, 0), d = OperatorElement::d(1, Mode::Diff, 0);
  CHECK(op_mul(d, y) == op_add(op_mul(y, d), OperatorElement::constant(1, Mode::Diff, 1)));
  CHECK(to_string(op_mul(op_mul(d, d), y)) == "2 * d1 + 1 * y1*d1^2");

  const auto dinv = mono(1, Mode::PsiDiff, {0}, {-1});
  const auto yp = OperatorElement::y(1, Mode::PsiDiff, 0);
  auto p = op_mul(dinv, yp, TruncationWindow::uniform(1, -3));
  CHECK(agree(p, op_sub(mono(1, Mode::PsiDiff, {1}, {-1}), mono(1, Mode::PsiDiff, {0}, {-2}))));
  CHECK(to_string(op_mul(dinv, yp)) == "-1 * d1^-2 + 1 * y1*d1^-1");

  // d^-1 y^-1 = sum_k k! y^{-1-k} d^{-1-k}
  auto q = op_mul(dinv, mono(1, Mode::PsiDiff, {-1}, {0}), W6);
  for (Exp k = 0; k <= 4; ++k)
    CHECK(coefficient_at(q, Monomial{{-1 - k}, {-1 - k}}) == Rational(factorial(k)));
  CHECK_THROWS_AS(coefficient_at(q, Monomial{{-7}, {-7}}), PrecisionError);
  CHECK_THROWS_AS(op_mul(dinv, mono(1, Mode::PsiDiff, {-1}, {0})), PrecisionError);

  CHECK(op_mul(dinv, OperatorElement::d(1, Mode::PsiDiff, 0)) == OperatorElement::constant(1, Mode::PsiDiff, 1));
  CHECK_THROWS_AS(OperatorElement::make(1, Mode::Diff, {{Monomial{{-1}, {0}}, 1}}), ModeMismatch);
  CHECK_THROWS_AS(op_mul(y, yp), ModeMismatch);
}

TEST_CASE("residue trace", "[opalg]") {
  CHECK(residue_trace(mono(1, Mode::PsiDiff, {-1}, {-1}, Rational(3, 2))) == Rational(3, 2));
  CHECK(residue_trace(mono(2, Mode::PsiDiff, {-1, -1}, {-1, -1}, 5)) == 5);
  CHECK(residue_trace(mono(2, Mode::PsiDiff, {-1, 0}, {-1, -1}, 5)) == 0);
  CHECK(residue_trace(OperatorElement::y(1, Mode::Diff, 0)) == 0);
  Rng rng(1);
  int nonzero = 0;
  for (int t = 0; t < 100; ++t) {
    auto a = rand_op(rng, 1, Mode::PsiDiff, 3, -2, 2), b = rand_op(rng, 1, Mode::PsiDiff, 3, -2, 2);
    CHECK(residue_trace(commutator(a, b, W6)) == 0);
    nonzero += residue_trace(op_mul(a, b, W6)) != 0;
  }
  CHECK(nonzero > 10);
}

TEST_CASE("Diff products agree with the action on polynomials", "[opalg][property]") {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + t % 2;
    auto a = rand_op(rng, n, Mode::Diff, 3, 0, 3), b = rand_op(rng, n, Mode::Diff, 3, 0, 3),
         c = rand_op(rng, n, Mode::Diff, 2, 0, 2);
    auto ab = op_mul(a, b);
    CHECK(op_mul(ab, c) == op_mul(a, op_mul(b, c)));
    const Poly p = rand_poly(rng, n);
    CHECK(act(ab, p) == act(a, act(b, p)));
  }
}

TEST_CASE("PsiDiff associativity within floors", "[opalg][property]") {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    auto a = rand_op(rng, 1, Mode::PsiDiff, 3, -2, 2), b = rand_op(rng, 1, Mode::PsiDiff, 3, -2, 2),
         c = rand_op(rng, 1, Mode::PsiDiff, 3, -2, 2);
    auto lhs = op_mul(op_mul(a, b, W6), c, W6), rhs = op_mul(a, op_mul(b, c, W6), W6);
    CHECK(agree(lhs, rhs));
    // the common exact region is not empty
    CHECK(lhs.floors().y[0] <= -1);
    CHECK(rhs.floors().y[0] <= -1);
  }
}

TEST_CASE("log derivations", "[opalg]") {
  const auto y = OperatorElement::y(1, Mode::PsiDiff, 0), d = OperatorElement::d(1, Mode::PsiDiff, 0);
  CHECK(agree(ad_log_y(0, d, W6), mono(1, Mode::PsiDiff, {-1}, {0}, -1)));
  CHECK(agree(ad_log_d(0, y, W6), mono(1, Mode::PsiDiff, {0}, {-1})));
  CHECK(ad_log_y(0, y, W6).is_zero());
  CHECK(ad_log_d(0, d, W6).is_zero());
  // ad(ln d)(y^-1) = -sum_k (k-1)! y^{-1-k} d^{-k}
  auto v = ad_log_d(0, mono(1, Mode::PsiDiff, {-1}, {0}), W6);
  CHECK(coefficient_at(v, Monomial{{-2}, {-1}}) == -1);
  CHECK(coefficient_at(v, Monomial{{-3}, {-2}}) == -1);
  CHECK(coefficient_at(v, Monomial{{-4}, {-3}}) == -2);
  CHECK_THROWS_AS(ad_log_y(1, y, W6), DimensionMismatch);

  SECTION("derivation property") {
    Rng rng(4);
    for (int t = 0; t < 100; ++t) {
      const std::size_t n = 1 + t % 2;
      const auto W = TruncationWindow::uniform(n, -6), Wd = TruncationWindow::uniform(n, -9);
      auto a = rand_op(rng, n, Mode::PsiDiff, 2, -2, 2), b = rand_op(rng, n, Mode::PsiDiff, 2, -2, 2);
      for (std::size_t i = 0; i < n; ++i) {
        for (bool use_y : {true, false}) {
          auto D = [&](const OperatorElement& x, const TruncationWindow& w) {
            const auto ew = effective_window(x, w);
            return use_y ? ad_log_y(i, x, ew) : ad_log_d(i, x, ew);
          };
          auto lhs = D(op_mul(a, b, Wd), W);
          auto rhs = op_add(op_mul(D(a, Wd), b, W), op_mul(a, D(b, Wd), W));
          CHECK(agree(lhs, rhs));
        }
      }
    }
  }
  SECTION("log derivations of the same kind commute") {
    Rng rng(5);
    const auto W = TruncationWindow::uniform(2, -6);
    for (int t = 0; t < 100; ++t) {
      auto a = rand_op(rng, 2, Mode::PsiDiff, 3, -2, 2);
      CHECK(agree(ad_log_y(0, ad_log_y(1, a, W), W), ad_log_y(1, ad_log_y(0, a, W), W)));
      CHECK(agree(ad_log_d(0, ad_log_d(1, a, W), W), ad_log_d(1, ad_log_d(0, a, W), W)));
      // D(a) never reaches y^-1 d^-1
      CHECK(residue_trace(ad_log_y(0, a, W)) == 0);
    }
  }
}
