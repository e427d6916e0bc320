#pragma once

// The lifting cocycle on gl^fin(PsiDiff_n): log-derivations D_i, the
// correction elements Q_ij with [D_i, D_j] = ad(Q_ij), markings, and the
// alternated trace terms O(t).

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ncres/algebras.hpp"
#include "ncres/gfmap.hpp"
#include "ncres/linsolve.hpp"

namespace ncres {

using Marking = std::vector<int>;  // sorted marked points in [1, 2n-1]

inline std::vector<Marking> markings_enumerate(int n) {
  std::vector<Marking> out;
  const int hi = 2 * n - 1;
  std::function<void(int, Marking&)> rec = [&](int next, Marking& cur) {
    out.push_back(cur);
    for (int p = next; p <= hi; ++p) {
      cur.push_back(p);
      rec(p + 2, cur);
      cur.pop_back();
    }
  };
  Marking cur;
  rec(1, cur);
  std::sort(out.begin(), out.end(), [](const Marking& a, const Marking& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

// How marked terms are weighted in the sum over markings.
enum class MarkingWeight {
  Half,     // 2^{-|t|}: each marked pair counted once up to the D-alternation
  Literal,  // weight 1 for every marking
  EmptyOnly // drop all marked terms
};

struct LiftingOptions {
  int n = 1;
  Exp window = -6;      // product/derivation window
  Exp q_lo = -12;       // solver box for Q
  Exp q_hi = 2;
  Exp probe_radius = 3; // probes: exponents in [-r, r]^{2n}
  MarkingWeight weight = MarkingWeight::Half;
};

class LiftingContext {
 public:
  explicit LiftingContext(LiftingOptions opt);

  const LiftingOptions& options() const { return opt_; }
  int n() const { return opt_.n; }
  TruncationWindow window() const { return TruncationWindow::uniform(static_cast<std::size_t>(opt_.n), opt_.window); }

  // D_k, k in [0, 2n): ad(ln y_k) for k < n, ad(ln d_{k-n}) otherwise.
  OperatorElement derivation(std::size_t k, const OperatorElement& a) const {
    const std::size_t n = static_cast<std::size_t>(opt_.n);
    const TruncationWindow w = effective_window(a, window());
    return k < n ? ad_log_y(k, a, w) : ad_log_d(k - n, a, w);
  }
  MatrixOperator derivation(std::size_t k, const MatrixOperator& a) const {
    MatrixOperator out(a.n(), Mode::PsiDiff, a.declared_size());
    for (const auto& [ij, e] : a.entries()) out.accumulate(ij.first, ij.second, derivation(k, e));
    return out;
  }

  // Q_{ab} for 0-based indices, with Q_{ba} = -Q_{ab} and Q_{aa} = 0.
  OperatorElement q(std::size_t a, std::size_t b) const {
    if (a == b) return OperatorElement(static_cast<std::size_t>(opt_.n), Mode::PsiDiff);
    if (a > b) return scalar_mul(-1, q(b, a));
    return q_table_.at({a, b});
  }
  const std::map<std::pair<std::size_t, std::size_t>, OperatorElement>& q_table() const { return q_table_; }

 private:
  LiftingOptions opt_;
  std::map<std::pair<std::size_t, std::size_t>, OperatorElement> q_table_;
};

namespace detail {

inline void for_each_box_point(std::size_t dim, Exp lo, Exp hi, const std::function<void(const std::vector<Exp>&)>& f) {
  std::vector<Exp> p(dim, lo);
  while (true) {
    f(p);
    std::size_t i = 0;
    for (; i < dim; ++i) {
      if (++p[i] <= hi) break;
      p[i] = lo;
    }
    if (i == dim) break;
  }
}

inline Monomial monomial_of(const std::vector<Exp>& p, std::size_t n) {
  return {std::vector<Exp>(p.begin(), p.begin() + static_cast<long>(n)),
          std::vector<Exp>(p.begin() + static_cast<long>(n), p.end())};
}

}  // namespace detail

struct QSolveReport {
  OperatorElement q;
  std::size_t unknowns = 0;
  std::size_t equations = 0;
  std::size_t center_dimension = 0;  // free variables that were pinned
  std::size_t held_out_checked = 0;
};

// Target [D_a, D_b](m), exact on monomials >= `floor` componentwise.
inline OperatorElement derivation_commutator(std::size_t a, std::size_t b, const OperatorElement& m,
                                             const TruncationWindow& floor, std::size_t n) {
  auto D = [&](std::size_t k, const OperatorElement& x) {
    const TruncationWindow w = effective_window(x, floor);
    return k < n ? ad_log_y(k, x, w) : ad_log_d(k - n, x, w);
  };
  return op_sub(D(a, D(b, m)), D(b, D(a, m)));
}

// Solves ad(Q) = [D_a, D_b] on probe monomials over a box of candidate
// monomials [q_lo, q_hi]^{2n}. The box's bottom layer is invisible to the
// truncated equations, so the result carries floors q_lo + 1; the constant
// is pinned to 0.
inline QSolveReport q_solve(const LiftingOptions& opt, std::size_t a, std::size_t b) {
  if (a >= b) throw DimensionMismatch("q_solve needs a < b");
  const std::size_t n = static_cast<std::size_t>(opt.n);
  const Mode M = Mode::PsiDiff;
  std::vector<Monomial> box;
  detail::for_each_box_point(2 * n, opt.q_lo, opt.q_hi,
                             [&](const std::vector<Exp>& p) { box.push_back(detail::monomial_of(p, n)); });
  const Exp target_floor = opt.q_lo - opt.probe_radius - 1;
  LinearSolver solver(box.size());
  std::size_t equations = 0;

  auto region_of = [&](const Monomial& m) {
    TruncationWindow r{std::vector<Exp>(n), std::vector<Exp>(n)};
    for (std::size_t v = 0; v < n; ++v) {
      r.y[v] = opt.q_lo + m.y[v];
      r.d[v] = opt.q_lo + m.d[v];
    }
    return r;
  };

  detail::for_each_box_point(2 * n, -opt.probe_radius, opt.probe_radius, [&](const std::vector<Exp>& p) {
    const Monomial m = detail::monomial_of(p, n);
    const OperatorElement x = OperatorElement::monomial(n, M, m);
    const TruncationWindow region = region_of(m);
    const OperatorElement target =
        truncate(derivation_commutator(a, b, x, TruncationWindow::uniform(n, target_floor), n), region);
    std::map<Monomial, SparseRow> rows;
    for (std::size_t col = 0; col < box.size(); ++col) {
      const OperatorElement e = OperatorElement::monomial(n, M, box[col]);
      const OperatorElement c = commutator(e, x, region);
      for (const auto& [mu, v] : c.terms()) rows[mu][col] += v;
    }
    for (const auto& [mu, v] : target.terms()) rows[mu];
    for (auto& [mu, row] : rows) {
      auto it = target.terms().find(mu);
      solver.add_equation(row, it == target.terms().end() ? Rational(0) : it->second);
      ++equations;
    }
  });
  if (!solver.consistent()) throw NoSolution("no Q in the candidate box reproduces [D_i, D_j]");

  QSolveReport rep;
  rep.unknowns = box.size();
  rep.equations = equations;
  std::size_t ambiguous = 0;
  for (std::size_t f : solver.free_columns()) {
    const Monomial& m = box[f];
    bool bottom = false;
    bool center = true;
    for (std::size_t v = 0; v < n; ++v) {
      bottom = bottom || m.y[v] == opt.q_lo || m.d[v] == opt.q_lo;
      center = center && m.y[v] == 0 && m.d[v] == 0;
    }
    if (center) ++rep.center_dimension;
    else if (!bottom) ++ambiguous;
  }
  if (ambiguous) {
    throw AmbiguousSolution("Q is not determined: " + std::to_string(ambiguous) +
                            " free directions beyond the center (center dimension " +
                            std::to_string(rep.center_dimension) + ")");
  }
  const Vector x = *solver.solution();
  OperatorElement::Terms terms;
  for (std::size_t col = 0; col < box.size(); ++col)
    if (x[col] != 0) terms[box[col]] = x[col];
  TruncationWindow supp = TruncationWindow::uniform(n, opt.q_hi);
  rep.q = OperatorElement::make(n, M, terms, TruncationWindow::uniform(n, opt.q_lo + 1), supp);
  // Tighten the support bound to what the solution uses above the floors.
  TruncationWindow s = TruncationWindow::uniform(n, opt.q_lo);
  for (const auto& [m, c] : rep.q.terms()) s = vmax(s, TruncationWindow{m.y, m.d});
  rep.q = OperatorElement::make(n, M, rep.q.terms(), rep.q.floors(), s);
  return rep;
}

// Checks ad(Q) against [D_a, D_b] on the given probes; returns the number
// of probes on which they disagree.
inline std::size_t q_residual(const LiftingOptions& opt, std::size_t a, std::size_t b, const OperatorElement& q,
                              const std::vector<Monomial>& probes) {
  const std::size_t n = static_cast<std::size_t>(opt.n);
  std::size_t bad = 0;
  for (const Monomial& m : probes) {
    const OperatorElement x = OperatorElement::monomial(n, Mode::PsiDiff, m);
    const OperatorElement lhs = commutator(q, x);
    const TruncationWindow floor = lhs.floors();
    Exp lowest = 0;
    for (Exp f : floor.y) lowest = std::min(lowest, f);
    for (Exp f : floor.d) lowest = std::min(lowest, f);
    // An exact lhs (e.g. Q = 0) is compared down to the solver floor.
    lowest = std::max(lowest, opt.q_lo + std::min<Exp>(0, *std::min_element(m.y.begin(), m.y.end())) +
                                  std::min<Exp>(0, *std::min_element(m.d.begin(), m.d.end())));
    const OperatorElement rhs = derivation_commutator(a, b, x, TruncationWindow::uniform(n, lowest - 1), n);
    if (!agree(lhs, rhs)) ++bad;
  }
  return bad;
}

inline std::vector<Monomial> probe_box(std::size_t n, Exp lo, Exp hi) {
  std::vector<Monomial> out;
  detail::for_each_box_point(2 * n, lo, hi, [&](const std::vector<Exp>& p) { out.push_back(detail::monomial_of(p, n)); });
  return out;
}

// Probes in [-(r+1), r+1]^{2n} that are not in [-r, r]^{2n}.
inline std::vector<Monomial> held_out_probes(std::size_t n, Exp r) {
  std::vector<Monomial> out;
  for (const Monomial& m : probe_box(n, -(r + 1), r + 1)) {
    bool inner = true;
    for (std::size_t v = 0; v < n; ++v)
      inner = inner && std::abs(m.y[v]) <= r && std::abs(m.d[v]) <= r;
    if (!inner) out.push_back(m);
  }
  return out;
}

inline LiftingContext::LiftingContext(LiftingOptions opt) : opt_(opt) {
  if (opt_.n < 1) throw DimensionMismatch("n must be positive");
  const std::size_t dim = 2 * static_cast<std::size_t>(opt_.n);
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = a + 1; b < dim; ++b) q_table_.emplace(std::pair{a, b}, q_solve(opt_, a, b).q);
}

namespace detail {

inline int perm_sign(const std::vector<std::size_t>& p) {
  long inv = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i] > p[j]) ++inv;
  return sign_of(inv);
}

inline std::vector<std::pair<std::vector<std::size_t>, int>> signed_perms(std::size_t k) {
  std::vector<std::pair<std::vector<std::size_t>, int>> out;
  std::vector<std::size_t> p(k);
  std::iota(p.begin(), p.end(), 0);
  do {
    out.emplace_back(p, perm_sign(p));
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

inline Rational marking_weight(MarkingWeight w, std::size_t marked) {
  switch (w) {
    case MarkingWeight::Half: return Rational(1, 1u << marked);
    case MarkingWeight::Literal: return 1;
    case MarkingWeight::EmptyOnly: return marked == 0 ? 1 : 0;
  }
  return 1;
}

}  // namespace detail

namespace detail {

// Componentwise max of the support bounds of all entries, clamped at 0.
inline TruncationWindow positive_support(const MatrixOperator& a) {
  TruncationWindow s = TruncationWindow::uniform(a.n(), 0);
  for (const auto& [ij, e] : a.entries()) {
    if (e.is_zero()) continue;
    s = vmax(s, e.support_hi());
  }
  return s;
}

inline TruncationWindow window_below(std::size_t n, const std::vector<TruncationWindow>& supps) {
  TruncationWindow w = TruncationWindow::uniform(n, -1);
  for (const auto& s : supps)
    for (std::size_t v = 0; v < n; ++v) {
      w.y[v] -= s.y[v];
      w.d[v] -= s.d[v];
    }
  return w;
}

}  // namespace detail

// O(t)(A_1..A_{2n+1}): alternated over the arguments (S_{2n+1}) and the
// derivations (S_{2n}), without normalization.
//
// Inputs keep whatever floors they carry. Intermediate windows are chosen
// from the support bounds so that the final trace coefficient is exact
// whenever the inputs allow it.
inline Rational O_t_eval(const LiftingContext& ctx, const Marking& t, const std::vector<MatrixOperator>& A0) {
  const std::size_t n = static_cast<std::size_t>(ctx.n());
  const std::size_t k = 2 * n + 1;
  if (A0.size() != k) throw ArityMismatch("O(t) needs 2n+1 arguments");
  std::vector<MatrixOperator> A;
  std::vector<TruncationWindow> supp;
  for (const auto& a : A0) {
    if (a.n() != n) throw DimensionMismatch("argument has the wrong number of variables");
    if (a.entries().empty()) return 0;
    A.push_back(mat_as_psidiff(a));
    supp.push_back(detail::positive_support(a));
  }
  std::vector<bool> marked(k + 1, false);
  for (int p : t) marked.at(static_cast<std::size_t>(p)) = true;

  // Every factor is computed down to -1 minus the support of all arguments;
  // the partial product after j factors down to -1 minus what remains.
  const TruncationWindow factor_w = detail::window_below(n, supp);
  auto D = [&](std::size_t d, const OperatorElement& e) {
    const TruncationWindow w = effective_window(e, factor_w);
    return d < n ? ad_log_y(d, e, w) : ad_log_d(d - n, e, w);
  };
  std::map<std::pair<std::size_t, std::size_t>, MatrixOperator> dcache;
  auto DA = [&](std::size_t d, std::size_t a) -> const MatrixOperator& {
    auto it = dcache.find({d, a});
    if (it == dcache.end()) {
      MatrixOperator out(n, Mode::PsiDiff, A[a].declared_size());
      for (const auto& [ij, e] : A[a].entries()) out.accumulate(ij.first, ij.second, D(d, e));
      it = dcache.emplace(std::pair{d, a}, std::move(out)).first;
    }
    return it->second;
  };

  Rational total = 0;
  const auto sperms = detail::signed_perms(k);
  const auto rperms = detail::signed_perms(2 * n);
  for (const auto& [sigma, ss] : sperms) {
    std::vector<TruncationWindow> tail_w(k + 1);
    for (std::size_t j = 1; j <= k; ++j) {
      std::vector<TruncationWindow> rest;
      for (std::size_t l = j + 1; l <= k; ++l) rest.push_back(supp[sigma[l - 1]]);
      tail_w[j] = detail::window_below(n, rest);
    }
    for (const auto& [rho, rs] : rperms) {
      std::optional<MatrixOperator> prod;
      for (std::size_t j = 1; j <= k; ++j) {
        const std::size_t arg = sigma[j - 1];
        MatrixOperator P;
        if (j == k || marked[j - 1]) {
          P = A[arg];
        } else if (marked[j]) {
          P = mat_mul_diag(A[arg], ctx.q(rho[j - 1], rho[j]), factor_w);
        } else {
          P = DA(rho[j - 1], arg);
        }
        prod = prod ? mat_mul(*prod, P, tail_w[j]) : P;
        if (prod->entries().empty()) break;
      }
      total += Rational(ss * rs) * full_trace(*prod);
    }
  }
  return total;
}

inline Rational psi_lift_eval(const LiftingContext& ctx, const std::vector<MatrixOperator>& A) {
  Rational total = 0;
  for (const Marking& t : markings_enumerate(ctx.n())) {
    const Rational wt = detail::marking_weight(ctx.options().weight, t.size());
    if (wt == 0) continue;
    total += wt * O_t_eval(ctx, t, A);
  }
  return total;
}

// The cocycle as a Lie cochain of arity 2n+1.
inline Cochain<MatrixOperator> psi_cochain(const LiftingContext& ctx) {
  Cochain<MatrixOperator> c;
  c.arity = 2 * static_cast<std::size_t>(ctx.n()) + 1;
  c.parity = CochainParity::Lie;
  c.window = "floors " + std::to_string(ctx.options().window);
  c.eval = [&ctx](const std::vector<MatrixOperator>& A) { return psi_lift_eval(ctx, A); };
  return c;
}

// One argument of gl^fin(M_m(Diff_n)) of the form M (x) G.
struct KroneckerArg {
  MatrixOperator M;
  ScalarMatrix G;
};

inline Rational psi_m_eval(const LiftingContext& ctx, std::size_t m, const std::vector<KroneckerArg>& args) {
  std::vector<MatrixOperator> A;
  for (const auto& a : args) {
    if (a.M.declared_size() != m) throw DimensionMismatch("argument is not an m x m matrix");
    A.push_back(i_m(a.M, a.G));
  }
  return psi_lift_eval(ctx, A);
}

// delta(Phi)(x_0..x_k) = sum_{i<j} (-1)^{i+j} Phi([x_i, x_j], rest) for degree-0 matrices.
inline Rational lie_coboundary_eval(const Cochain<MatrixOperator>& phi, const std::vector<MatrixOperator>& xs,
                                    const std::optional<TruncationWindow>& window) {
  Rational total = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j) {
      std::vector<MatrixOperator> args{mat_commutator(xs[i], xs[j], window)};
      for (std::size_t l = 0; l < xs.size(); ++l)
        if (l != i && l != j) args.push_back(xs[l]);
      total += Rational(sign_of(static_cast<long>(i + j))) * phi.eval(args);
    }
  return total;
}

// Random finite matrices over PsiDiff_n: `entries` nonzero entries, each with
// `terms` monomials with exponents in [-radius, radius], coefficients in [-3, 3].
struct MatrixSampler {
  std::size_t n = 1;
  Mode mode = Mode::PsiDiff;
  std::size_t max_size = 2;
  std::size_t entries = 3;
  std::size_t terms = 3;
  Exp radius = 2;
  Exp lowest = -2;  // lowest allowed exponent (0 for Diff)

  MatrixOperator operator()(std::mt19937_64& rng, std::optional<std::size_t> declared = std::nullopt) const {
    const std::size_t size = declared ? *declared : 1 + rng() % max_size;
    MatrixOperator m(n, mode, declared);
    for (std::size_t e = 0; e < entries; ++e) {
      OperatorElement::Terms t;
      for (std::size_t k = 0; k < terms; ++k) {
        Monomial mono{std::vector<Exp>(n), std::vector<Exp>(n)};
        for (std::size_t v = 0; v < n; ++v) {
          mono.y[v] = lowest + static_cast<Exp>(rng() % static_cast<std::uint64_t>(radius - lowest + 1));
          mono.d[v] = lowest + static_cast<Exp>(rng() % static_cast<std::uint64_t>(radius - lowest + 1));
        }
        t[mono] += Rational(static_cast<long>(rng() % 7) - 3);
      }
      m.accumulate(rng() % size, rng() % size, OperatorElement::make(n, mode, t));
    }
    return m;
  }
};

struct CocycleReport {
  Rational defect_max = 0;
  std::size_t trials = 0;
  std::size_t nonzero_values = 0;  // trials where Phi itself was nonzero on a sub-tuple
  double seconds = 0;
};

inline CocycleReport lie_cocycle_check(const Cochain<MatrixOperator>& phi, std::size_t trials, std::uint64_t seed,
                                       const MatrixSampler& sampler, const std::optional<TruncationWindow>& window) {
  CocycleReport rep;
  std::mt19937_64 rng(seed);
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<MatrixOperator> xs;
    for (std::size_t i = 0; i < phi.arity + 1; ++i) xs.push_back(sampler(rng));
    const Rational d = abs(lie_coboundary_eval(phi, xs, window));
    if (d > rep.defect_max) rep.defect_max = d;
    std::vector<MatrixOperator> head(xs.begin(), xs.begin() + static_cast<long>(phi.arity));
    if (phi.eval(head) != 0) ++rep.nonzero_values;
    ++rep.trials;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

// One instance of block-padding stability: with args (A_i (+) B_i) (x) id_N
// for i < 2n and i(M) (x) E_11 last, Psi^{m+p} must equal Psi^m evaluated on
// A_i (x) id_N and M (x) E_11.
struct PaddingInstance {
  Rational padded;
  Rational plain;
  Rational plain_bigger_n;  // same with N + 1 blocks
};

inline PaddingInstance padding_instance(const LiftingContext& ctx, std::size_t m, std::size_t p, std::size_t N,
                                      std::mt19937_64& rng, const MatrixSampler& sampler) {
  const std::size_t k = 2 * static_cast<std::size_t>(ctx.n()) + 1;
  ScalarMatrix e11;
  e11[{0, 0}] = 1;
  std::vector<KroneckerArg> padded, plain, bigger;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    MatrixOperator a = sampler(rng, m);
    MatrixOperator b = sampler(rng, p);
    padded.push_back({block_direct_sum(a, b), scalar_identity(N)});
    plain.push_back({a, scalar_identity(N)});
    bigger.push_back({a, scalar_identity(N + 1)});
  }
  MatrixOperator M = sampler(rng, m);
  padded.push_back({iota_pad(M, p), e11});
  plain.push_back({M, e11});
  bigger.push_back({M, e11});
  return {psi_m_eval(ctx, m + p, padded), psi_m_eval(ctx, m, plain), psi_m_eval(ctx, m, bigger)};
}

enum class FlatModel { Standard, Heisenberg };

// Local residue density at n = 1: lambda(Psi, E_11(D^)) with D^ the flat
// section of an r x r operator D in the chosen model. With the standard form
// every omega^2 term carries dz ^ dz, so the density vanishes identically.
inline ScalarForm residue_density(const LiftingContext& ctx, const MatrixOperator& D, FlatModel model) {
  if (ctx.n() != 1 || D.n() != 1) throw DimensionMismatch("residue density is implemented for n = 1");
  if (!D.declared_size()) throw DimensionMismatch("D must be an r x r matrix");
  const std::size_t r = *D.declared_size();
  MatrixOperator Dinf(1, Mode::Diff, std::nullopt);
  for (const auto& [ij, e] : D.entries()) Dinf.accumulate(ij.first, ij.second, e);
  const FormOperator omega = model == FlatModel::Heisenberg ? omega_heis(std::nullopt, r) : omega_std(1, std::nullopt, r);
  const FormOperator Dhat = model == FlatModel::Heisenberg ? heis_flat_section(Dinf) : taylor_flat_section(Dinf);
  FormAlgebra A(1, Mode::Diff, std::nullopt, omega);
  return lambda_map(psi_cochain(ctx), wedge(A, {Dhat}), omega, 1);
}

}  // namespace ncres
