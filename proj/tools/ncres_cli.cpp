// Command-line front end. Results go to stdout (or --out), errors to stderr
// as {"error": kind, "message": ...}. Exit codes: 0 all checks passed, 1 a
// check failed, 2 usage, input or precision error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "ncres/double_complex.hpp"
#include "ncres/io.hpp"
#include "ncres/lifting.hpp"
#include "ncres/suite.hpp"

using namespace ncres;

namespace {

struct RunConfig {
  std::size_t n = 1;
  std::string mode = "diff";
  Exp floor_y = -6;
  Exp floor_d = -6;
  std::uint64_t seed = 1;
  std::size_t trials = 0;  // 0: per-command default
  std::string out;
  bool json = false;
};

class CliError : public Error {
 public:
  using Error::Error;
};

int fail(const std::string& kind, const std::string& message) {
  std::cerr << Json{{"error", kind}, {"message", message}}.dump() << "\n";
  return 2;
}

class Runner {
 public:
  explicit Runner(const RunConfig& cfg) : cfg_(cfg) {}

  EvalConfig eval_config() const {
    EvalConfig e;
    e.n = cfg_.n;
    if (cfg_.mode == "diff") e.mode = Mode::Diff;
    else if (cfg_.mode == "psidiff") e.mode = Mode::PsiDiff;
    else throw CliError("UsageError", "--mode must be diff or psidiff");
    e.window = TruncationWindow{std::vector<Exp>(cfg_.n, cfg_.floor_y), std::vector<Exp>(cfg_.n, cfg_.floor_d)};
    return e;
  }

  std::size_t trials(std::size_t fallback) const { return cfg_.trials ? cfg_.trials : fallback; }
  std::uint64_t seed() const { return cfg_.seed; }
  std::size_t n() const { return cfg_.n; }

  void require_trace_floors() const {
    if (cfg_.floor_y > -1 || cfg_.floor_d > -1)
      throw CliError("ConfigError", "trace-dependent commands need --floor-y and --floor-d <= -1");
  }

  LiftingContext lifting(MarkingWeight weight = MarkingWeight::Half, bool allow_large_n = false) const {
    require_trace_floors();
    if (cfg_.n != 1 && !allow_large_n)
      throw CliError("UsageError", "the lifting cocycle is solved for n = 1; pass --allow-large-n to try n > 1");
    LiftingOptions o;
    o.n = static_cast<int>(cfg_.n);
    o.window = std::max(cfg_.floor_y, cfg_.floor_d);
    o.weight = weight;
    return LiftingContext(o);
  }

  MatrixOperator matrix_file(const std::string& path, const EvalConfig& e) const {
    std::ifstream in(path);
    if (!in) throw CliError("IOError", "cannot read " + path);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::parse_error& ex) {
      throw CliError("SyntaxError", path + ": " + ex.what());
    }
    return matrix_from_json(j, e);
  }

  // A scalar expression as a 1 x 1 matrix, or a matrix file.
  MatrixOperator operand(const std::string& expr, const std::string& file, const EvalConfig& e) const {
    if (!file.empty()) return matrix_file(file, e);
    if (expr.empty()) throw CliError("UsageError", "give an expression or --matrix FILE");
    return unit_embed(parse_operator(expr, e), 0, 0, 1);
  }

  void emit(const std::string& text) const {
    if (cfg_.out.empty()) {
      std::cout << text << "\n";
      return;
    }
    std::ofstream f(cfg_.out);
    if (!f) throw CliError("IOError", "cannot write " + cfg_.out);
    f << text << "\n";
  }
  void emit_value(const std::string& text) const { emit(cfg_.json ? Json{{"result", text}}.dump() : text); }
  void emit_json(const Json& j) const { emit(j.dump()); }

 private:
  const RunConfig& cfg_;
};

OperatorElement product(const std::vector<OperatorElement>& xs, const EvalConfig& e) {
  OperatorElement out = xs.at(0);
  for (std::size_t i = 1; i < xs.size(); ++i) out = detail::eval_mul(out, xs[i], e);
  return out;
}

FormOperator bad_omega() {
  FormOperator w = omega_std(1, 1);
  w = form_add(w, form_from(dz_key(1, 0), scalar_block(OperatorElement::y(1, Mode::Diff, 0), 1)));
  return form_add(w, form_from(dz_key(1, 0, true), scalar_block(OperatorElement::d(1, Mode::Diff, 0), 1)));
}

Json identities_json(const std::vector<IdentityResult>& rs, bool& all_ok) {
  Json arr = Json::array();
  for (const auto& r : rs) {
    all_ok = all_ok && r.ok();
    arr.push_back(Json{{"name", r.name}, {"checked", r.checked}, {"failed", r.failed}});
  }
  return arr;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact operator algebra, chain complexes and lifting cocycles"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "plain key=value file mirroring the flags; flags win");

  RunConfig cfg;
  app.add_option("--n", cfg.n, "number of variables")->check(CLI::Range(1, 6));
  app.add_option("--mode", cfg.mode, "diff or psidiff")->check(CLI::IsMember({"diff", "psidiff"}));
  app.add_option("--floor-y", cfg.floor_y, "truncation floor in y");
  app.add_option("--floor-d", cfg.floor_d, "truncation floor in d");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--trials", cfg.trials, "number of random trials");
  app.add_option("--out", cfg.out, "write the result to this file");
  app.add_flag("--json", cfg.json, "wrap scalar results in JSON");

  Runner run(cfg);
  int status = 0;

  std::string expr, matrix_path, omega = "std", weight = "half", cochain = "psi";
  std::vector<std::string> exprs, files;
  std::size_t size = 1;
  bool allow_large_n = false;

  auto* normalize = app.add_subcommand("normalize", "print the canonical form of an expression");
  normalize->add_option("expr", expr)->required();
  normalize->callback([&] { run.emit_value(to_string(parse_operator(expr, run.eval_config()))); });

  auto* mul = app.add_subcommand("mul", "multiply expressions left to right");
  mul->add_option("exprs", exprs)->required()->expected(2, -1);
  mul->callback([&] {
    const auto e = run.eval_config();
    std::vector<OperatorElement> xs;
    for (const auto& s : exprs) xs.push_back(parse_operator(s, e));
    run.emit_value(to_string(product(xs, e)));
  });

  auto* comm = app.add_subcommand("commutator", "[a, b] = ab - ba");
  comm->add_option("exprs", exprs)->required()->expected(2);
  comm->callback([&] {
    const auto e = run.eval_config();
    const auto a = parse_operator(exprs[0], e), b = parse_operator(exprs[1], e);
    run.emit_value(to_string(op_sub(product({a, b}, e), product({b, a}, e))));
  });

  auto* trace = app.add_subcommand("trace", "residue trace of an expression or a matrix file");
  trace->add_option("expr", expr);
  trace->add_option("--matrix", matrix_path, "matrix JSON file");
  trace->callback([&] {
    run.require_trace_floors();
    const auto e = run.eval_config();
    run.emit_value(to_string(full_trace(run.operand(expr, matrix_path, e))));
  });

  auto* lift = app.add_subcommand("lift-eval", "evaluate the lifting cocycle on 2n+1 matrix files");
  lift->add_option("files", files)->required();
  lift->add_flag("--allow-large-n", allow_large_n, "allow n > 1 (slow)");
  lift->callback([&] {
    auto e = run.eval_config();
    e.mode = Mode::PsiDiff;
    const auto ctx = run.lifting(MarkingWeight::Half, allow_large_n);
    if (files.size() != 2 * run.n() + 1)
      throw ArityMismatch("lift-eval takes 2n+1 = " + std::to_string(2 * run.n() + 1) + " matrices");
    std::vector<MatrixOperator> A;
    for (const auto& f : files) A.push_back(run.matrix_file(f, e));
    run.emit_value(to_string(psi_lift_eval(ctx, A)));
  });

  auto* cocycle = app.add_subcommand("cocycle-check", "check that the lifting cochain is a Lie cocycle");
  cocycle->add_option("--weight", weight, "marking weight: half, literal or empty")
      ->check(CLI::IsMember({"half", "literal", "empty"}));
  cocycle->add_flag("--allow-large-n", allow_large_n, "allow n > 1 (slow)");
  cocycle->callback([&] {
    const MarkingWeight w = weight == "half" ? MarkingWeight::Half
                            : weight == "literal" ? MarkingWeight::Literal
                                                  : MarkingWeight::EmptyOnly;
    const auto ctx = run.lifting(w, allow_large_n);
    MatrixSampler s;
    s.n = run.n();
    const auto rep = lie_cocycle_check(psi_cochain(ctx), run.trials(50), run.seed(), s, ctx.window());
    run.emit_json(Json{{"cocycle_defect_max", to_string(rep.defect_max)},
                       {"trials", rep.trials},
                       {"seed", run.seed()},
                       {"window", window_json(ctx.window())},
                       {"normalization", "unnormalized-alt"}});
    if (rep.defect_max != 0) status = 1;
  });

  auto* padding = app.add_subcommand("prop16-check", "block padding stability of the matrix extension");
  padding->callback([&] {
    const auto ctx = run.lifting();
    MatrixSampler s;
    s.entries = 2;
    std::mt19937_64 rng(run.seed());
    const std::size_t trials = run.trials(20);
    std::size_t failures = 0, nonzero = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t m = 1 + t % 2, p = 1 + (t / 2) % 2, N = 1 + (t / 4) % 2;
      const auto inst = padding_instance(ctx, m, p, N, rng, s);
      if (inst.padded != inst.plain || inst.plain != inst.plain_bigger_n) ++failures;
      if (inst.plain != 0) ++nonzero;
    }
    run.emit_json(Json{{"instances", trials}, {"failures", failures}, {"nonzero", nonzero}, {"seed", run.seed()}});
    if (failures) status = 1;
  });

  auto* mc = app.add_subcommand("mc-check", "check the Maurer-Cartan equation for a built-in form");
  mc->add_option("--omega", omega, "std, heis or bad")->check(CLI::IsMember({"std", "heis", "bad"}));
  mc->add_option("--size", size, "matrix size r")->check(CLI::PositiveNumber);
  mc->callback([&] {
    FormOperator w = omega == "std" ? omega_std(run.n(), size) : omega == "heis" ? omega_heis(size) : bad_omega();
    const bool ok = mc_check(w);
    run.emit_value(ok ? "pass" : "fail");
    if (!ok) status = 1;
  });

  auto* flat = app.add_subcommand("flat-section", "flat section of a holomorphic operator");
  flat->add_option("expr", expr);
  flat->add_option("--matrix", matrix_path, "matrix JSON file");
  flat->add_option("--omega", omega, "std or heis")->check(CLI::IsMember({"std", "heis"}));
  flat->callback([&] {
    const auto e = run.eval_config();
    const MatrixOperator D = run.operand(expr, matrix_path, e);
    const bool heis = omega == "heis";
    const FormOperator s = heis ? heis_flat_section(D) : taylor_flat_section(D);
    const FormOperator w = heis ? omega_heis(D.declared_size()) : omega_std(D.n(), D.declared_size());
    const bool flat_ok = twisted_d(s, w).is_zero();
    run.emit_json(form_operator_json(s));
    if (!flat_ok) status = 1;
  });

  auto* feval = app.add_subcommand("f-eval", "f map of the flat lift of the c^r cycle");
  feval->add_option("--size", size, "matrix size r")->check(CLI::PositiveNumber);
  feval->add_option("--cochain", cochain, "coboundary or random")->check(CLI::IsMember({"coboundary", "random"}));
  feval->callback([&] {
    const std::size_t n = run.n();
    MatAlgebra m(n, Mode::Diff, size);
    const auto psi = cochain == "random"
                         ? random_cochain(m, 2 * n + 1, CochainParity::Hochschild, run.seed())
                         : coboundary_cochain(m, random_cochain(m, 2 * n, CochainParity::Hochschild, run.seed()));
    const ScalarForm v = f_map(psi, flat_lift_cycle(n, size), omega_std(n, size), n);
    bool ok = form_d(v).is_zero();
    if (cochain != "random") {
      ScalarForm want(n);
      const Rational c = evaluate(psi, c_r_cycle(n, size));
      if (c != 0) want.add(FormKey::one(n), c);
      ok = ok && v == want;
    }
    run.emit(render_form(v));
    if (!ok) status = 1;
  });

  auto* lam = app.add_subcommand("lambda-eval", "lambda map of E_11 of a flat section");
  lam->add_option("expr", expr);
  lam->add_option("--matrix", matrix_path, "matrix JSON file");
  lam->add_option("--omega", omega, "std or heis")->check(CLI::IsMember({"std", "heis"}));
  lam->add_option("--cochain", cochain, "psi or coboundary")->check(CLI::IsMember({"psi", "coboundary"}));
  lam->callback([&] {
    const auto e = run.eval_config();
    const MatrixOperator D = run.operand(expr, matrix_path, e);
    if (D.n() != 1) throw DimensionMismatch("lambda-eval is implemented for n = 1");
    if (!D.declared_size()) throw DimensionMismatch("D must be an r x r matrix");
    const std::size_t r = *D.declared_size();
    MatrixOperator Dinf(1, Mode::Diff, std::nullopt);
    for (const auto& [ij, x] : D.entries()) Dinf.accumulate(ij.first, ij.second, x);
    const bool heis = omega == "heis";
    const FormOperator w = heis ? omega_heis(std::nullopt, r) : omega_std(1, std::nullopt, r);
    const FormOperator Dhat = heis ? heis_flat_section(Dinf) : taylor_flat_section(Dinf);
    FormAlgebra A(1, Mode::Diff, std::nullopt, w);
    ScalarForm v(1);
    if (cochain == "psi") {
      const auto ctx = run.lifting();
      v = lambda_map(psi_cochain(ctx), wedge(A, {Dhat}), w, 1);
    } else {
      MatAlgebra gl(1, Mode::Diff, std::nullopt);
      v = lambda_map(coboundary_cochain(gl, random_cochain(gl, 2, CochainParity::Lie, run.seed())), wedge(A, {Dhat}),
                     w, 1);
    }
    run.emit(render_form(v));
  });

  auto* density = app.add_subcommand("residue-density", "local residue integrand of an r x r operator at n = 1");
  density->add_option("expr", expr);
  density->add_option("--matrix", matrix_path, "matrix JSON file");
  density->add_option("--omega", omega, "std or heis")->check(CLI::IsMember({"std", "heis"}));
  density->callback([&] {
    const auto e = run.eval_config();
    const MatrixOperator D = run.operand(expr, matrix_path, e);
    const auto ctx = run.lifting();
    run.emit(render_form(residue_density(ctx, D, omega == "heis" ? FlatModel::Heisenberg : FlatModel::Standard)));
  });

  std::size_t twist_trials = 20;
  auto* suite = app.add_subcommand("chain-suite", "randomized chain complex and twist identities");
  suite->add_option("--twist-trials", twist_trials, "random chains for the twist identities");
  suite->callback([&] {
    bool ok = true;
    Json j{{"seed", run.seed()},
           {"identities", identities_json(chain_identity_suite(run.trials(100), run.seed()), ok)},
           {"twists", identities_json(twist_suite(twist_trials, run.seed()), ok)}};
    j["ok"] = ok;
    run.emit_json(j);
    if (!ok) status = 1;
  });

  auto* stair = app.add_subcommand("staircase-demo", "split a cycle on a two-open graph cover");
  stair->callback([&] {
    auto demo = staircase_demo_complex();
    const auto& dc = demo.cover.dc;
    const TotalElement z = lift_global_cycle(demo.cover, demo.cycle);
    const auto res = staircase(dc, z);
    const auto cert = certify_staircase(dc, z, res);
    Json local = Json::array();
    for (std::size_t u = 0; u < res.local.size(); ++u) {
      Vector mine;
      for (std::size_t i = 0; i < res.local[u].size(); ++i)
        if (dc.owner(res.degree, i) == static_cast<int>(u)) mine.push_back(res.local[u][i]);
      local.push_back(Json{{"open", u}, {"edges", demo.cover.open_edges[u]}, {"coefficients", vector_json(mine)}});
    }
    run.emit_json(Json{{"steps", res.steps},
                       {"degree", res.degree},
                       {"local", local},
                       {"certificate",
                        {{"local_cycles", cert.local_cycles},
                         {"single_support", cert.single_support},
                         {"correction_ok", cert.correction_ok},
                         {"solver_ok", cert.solver_ok}}}});
    if (!cert.ok()) status = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what());
  } catch (const Error& e) {
    return fail(e.kind(), e.what());
  } catch (const Json::exception& e) {
    return fail("ShapeError", e.what());
  } catch (const std::exception& e) {
    return fail("InternalError", e.what());
  }
  return status;
}
