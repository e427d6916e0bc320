#include <catch_amalgamated.hpp>

#include "ncres/lifting.hpp"
#include "support.hpp"

using namespace ncres;
using namespace ncres::testing;

namespace {

MatrixOperator E(std::size_t i, std::size_t j, std::optional<std::size_t> size = std::nullopt) {
  return unit_embed(OperatorElement::constant(1, Mode::Diff, 1), i, j, size);
}

ScalarMatrix rand_scalar(Rng& rng, std::size_t N) {
  ScalarMatrix g;
  for (int k = 0; k < 3; ++k) g[{rng() % N, rng() % N}] += small_rational(rng);
  std::erase_if(g, [](const auto& kv) { return kv.second == 0; });
  return g;
}

ScalarMatrix scalar_mul(const ScalarMatrix& a, const ScalarMatrix& b) {
  ScalarMatrix out;
  for (const auto& [ij, x] : a)
    for (const auto& [kl, y] : b)
      if (ij.second == kl.first) out[{ij.first, kl.second}] += x * y;
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

}  // namespace

TEST_CASE("elementary matrices satisfy the gl relations", "[matrix]") {
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) {
          MatrixOperator want(1, Mode::Diff, std::nullopt);
          if (j == k) want = mat_add(want, E(i, l));
          if (l == i) want = mat_sub(want, E(k, j));
          CHECK(mat_commutator(E(i, j), E(k, l)) == want);
        }
  CHECK(mat_mul(identity_matrix(1, Mode::Diff, 2), E(0, 1, 2)) == E(0, 1, 2));
  CHECK_THROWS_AS(E(2, 0, 2), DimensionMismatch);
  CHECK_THROWS_AS(mat_add(E(0, 0, 2), E(0, 0, 3)), DimensionMismatch);
  CHECK(E(5, 7).effective_size() == 8);
}

TEST_CASE("operator entries", "[matrix]") {
  const auto y = OperatorElement::y(1, Mode::Diff, 0), d = OperatorElement::d(1, Mode::Diff, 0);
  auto Y = unit_embed(y, 0, 1, 2), D = unit_embed(d, 1, 0, 2);
  // Y D = E_00 y d, D Y = E_11 d y
  auto c = mat_commutator(Y, D);
  CHECK(c.at(0, 0) == op_mul(y, d));
  CHECK(c.at(1, 1) == scalar_mul(-1, op_mul(d, y)));
  CHECK(matrix_trace(c) == OperatorElement::constant(1, Mode::Diff, -1));
}

TEST_CASE("i_m, padding and block sums", "[matrix]") {
  Rng rng(1);
  for (int t = 0; t < 30; ++t) {
    const std::size_t m = 1 + t % 2;
    auto M1 = rand_mat(rng, 1, Mode::Diff, m, 2, 2, 0, 2), M2 = rand_mat(rng, 1, Mode::Diff, m, 2, 2, 0, 2);
    auto G1 = rand_scalar(rng, 3), G2 = rand_scalar(rng, 3);
    CHECK(mat_mul(i_m(M1, G1), i_m(M2, G2)) == i_m(mat_mul(M1, M2), scalar_mul(G1, G2)));

    auto A = rand_mat(rng, 1, Mode::Diff, m, 2, 2, 0, 2), B = rand_mat(rng, 1, Mode::Diff, 2, 2, 2, 0, 2);
    auto C = rand_mat(rng, 1, Mode::Diff, m, 2, 2, 0, 2), D = rand_mat(rng, 1, Mode::Diff, 2, 2, 2, 0, 2);
    CHECK(mat_mul(block_direct_sum(A, B), block_direct_sum(C, D)) ==
          block_direct_sum(mat_mul(A, C), mat_mul(B, D)));
    CHECK(mat_mul(iota_pad(A, 2), iota_pad(C, 2)) == iota_pad(mat_mul(A, C), 2));
  }
  auto M = E(0, 1, 2);
  ScalarMatrix g{{{1, 0}, 3}};
  CHECK(i_m(M, g) == mat_scalar_mul(3, E(2, 1)));
  CHECK(i_m(M, scalar_identity(1)) == E(0, 1));
  CHECK_THROWS_AS(i_m(E(0, 0), g), DimensionMismatch);
  CHECK(iota_pad(M, 1).declared_size() == 3u);
}

TEST_CASE("full trace vanishes on commutators", "[matrix][property]") {
  Rng rng(2);
  MatrixSampler s;
  const auto W = TruncationWindow::uniform(1, -6);
  int nonzero = 0;
  for (int t = 0; t < 100; ++t) {
    auto a = s(rng, 2), b = s(rng, 2);
    auto c = mat_commutator(a, b, W);
    for (const auto& [ij, e] : c.entries()) CHECK(e.floors().y[0] <= -6);
    CHECK(full_trace(c) == 0);
    nonzero += full_trace(mat_mul(a, b, W)) != 0;
  }
  CHECK(nonzero > 10);
}

TEST_CASE("exact linear solver", "[linsolve]") {
  SparseMatrix A(3, 3);
  A.add(0, 0, 2);
  A.add(0, 1, 1);
  A.add(1, 1, 3);
  A.add(2, 0, 2);
  A.add(2, 1, 4);
  auto x = solve(A, {Rational(3), Rational(3), Rational(6)});
  REQUIRE(x);
  CHECK(A.apply(*x) == Vector{3, 3, 6});
  CHECK(rank(A) == 2);
  CHECK_FALSE(solve(A, {Rational(3), Rational(3), Rational(7)}));

  LinearSolver s(3);
  s.add_equation({{0, 1}, {2, 1}}, 0);
  auto ns = s.nullspace();
  CHECK(ns.size() == 2);
  for (const auto& v : ns) CHECK(v[0] + v[2] == 0);

  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    SparseMatrix M(4, 5);
    for (int k = 0; k < 8; ++k) M.add(rng() % 4, rng() % 5, small_rational(rng));
    Vector x0(5);
    for (auto& v : x0) v = small_rational(rng);
    auto sol = solve(M, M.apply(x0));
    REQUIRE(sol);
    CHECK(M.apply(*sol) == M.apply(x0));
  }
}
