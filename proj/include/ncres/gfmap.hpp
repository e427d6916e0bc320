#pragma once

// Evaluation of Hochschild and Lie cochains against chains of forms, and the
// twisted evaluation maps f and lambda.

#include <optional>

#include "ncres/forms.hpp"

namespace ncres {

// Splits every entry of a word into (form, matrix). `koszul` is the sign of
// pulling the forms to the left through the suspended entries.
struct SplitWord {
  std::vector<MatrixOperator> mats;
  ScalarForm form;
};

inline SplitWord split_word(std::size_t n, const std::vector<FormOperator>& w, bool suspended) {
  SplitWord out{{}, ScalarForm::constant(n, 1)};
  long s = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto [k, m] = split_basis(w[i]);
    out.mats.push_back(m);
    ScalarForm f(n);
    f.add(k, 1);
    out.form = wedge(out.form, f);
    if (suspended) s += static_cast<long>(i) * k.degree();
  }
  if (sign_of(s) < 0) out.form = Rational(-1) * out.form;
  return out;
}

// (w_0 a_0, ..., w_p a_p) |-> psi(a_0, ..., a_p) w_0 ^ ... ^ w_p, with the
// Koszul sign of the suspensions. Words of other lengths give 0.
inline ScalarForm eval_cochain(const Cochain<MatrixOperator>& psi, const Chain<FormOperator>& c, std::size_t n) {
  if (psi.parity != CochainParity::Hochschild) throw ArityMismatch("eval_cochain needs a Hochschild cochain");
  if (psi.arity != 2 * n + 1) throw ArityMismatch("eval_cochain needs a cochain of arity 2n+1");
  ScalarForm out(n);
  for (const auto& [w, coef] : c.words) {
    if (w.size() != psi.arity) continue;
    SplitWord sw = split_word(n, w, true);
    Rational v = psi.eval(sw.mats);
    if (v != 0) out = out + (coef * v) * sw.form;
  }
  return out;
}

// Lie analogue on expanded chains: (1/arity!) sum c_w Xi(a_w) w_0 ^ ... ^ w_p.
inline ScalarForm eval_lie_cochain(const Cochain<MatrixOperator>& xi, const Chain<FormOperator>& c, std::size_t n) {
  if (xi.parity != CochainParity::Lie) throw ArityMismatch("Lie evaluation needs a Lie cochain");
  if (xi.arity != 2 * n + 1) throw ArityMismatch("Lie evaluation needs a cochain of arity 2n+1");
  ScalarForm out(n);
  for (const auto& [w, coef] : c.words) {
    if (w.size() != xi.arity) continue;
    SplitWord sw = split_word(n, w, false);
    Rational v = xi.eval(sw.mats);
    if (v != 0) out = out + (coef * v) * sw.form;
  }
  return Rational(1) / Rational(factorial(static_cast<Exp>(xi.arity))) * out;
}

// f(psi, mu) = involution(eval(psi, twist_omega(mu))).
inline ScalarForm f_map(const Cochain<MatrixOperator>& psi, const Chain<FormOperator>& mu, const FormOperator& omega,
                        std::size_t n) {
  FormAlgebra plain(n, omega.mode(), omega.size());
  Chain<FormOperator> tw = mc_twist_hoch(plain, mu, omega, 2 * n + 1);
  return involution(eval_cochain(psi, tw, n));
}

// lambda(Xi, mu) = involution(Lie-eval(Xi, sum_k (1/k!) mu ^ omega^k)).
inline ScalarForm lambda_map(const Cochain<MatrixOperator>& xi, const Chain<FormOperator>& mu,
                             const FormOperator& omega, std::size_t n) {
  FormAlgebra plain(n, omega.mode(), omega.size());
  Chain<FormOperator> tw = lie_mc_twist(plain, mu, omega, 2 * n + 1);
  return involution(eval_lie_cochain(xi, tw, n));
}

// The lift of c^r_{2n} to the twisted polydisc algebra: the same alternating
// word with entries replaced by flat sections (1, z_1^, d_1^, ...).
inline Chain<FormOperator> flat_lift_cycle(std::size_t n, std::size_t r) {
  FormAlgebra alg(n, Mode::Diff, r, omega_std(n, r));
  std::vector<FormOperator> coords;
  for (std::size_t i = 0; i < n; ++i) {
    coords.push_back(taylor_flat_section(scalar_block(OperatorElement::y(n, Mode::Diff, i), r)));
    coords.push_back(taylor_flat_section(scalar_block(OperatorElement::d(n, Mode::Diff, i), r)));
  }
  return c_cycle(alg, coords);
}

}  // namespace ncres
