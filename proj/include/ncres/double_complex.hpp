#pragma once

// Finite double complexes of rational vector spaces and the staircase that
// moves a total cycle of a Cech-type complex into column 0.
//
// Cell (p, q) has d_h: (p, q) -> (p-1, q) and d_v: (p, q) -> (p, q-1). The
// squares commute; the total differential is D = d_h + (-1)^p d_v.

#include <algorithm>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "ncres/linsolve.hpp"

namespace ncres {

using Cell = std::pair<int, int>;  // (p, q)

// An element of the total complex: one coefficient vector per cell.
using TotalElement = std::map<Cell, Vector>;

class DoubleComplex {
 public:
  void set_dim(Cell c, std::size_t dim) { dims_[c] = dim; }
  std::size_t dim(Cell c) const {
    auto it = dims_.find(c);
    return it == dims_.end() ? 0 : it->second;
  }
  const std::map<Cell, std::size_t>& dims() const { return dims_; }

  // Matrices are stored by source cell.
  void set_dh(Cell src, SparseMatrix m) { dh_[src] = std::move(m); }
  void set_dv(Cell src, SparseMatrix m) { dv_[src] = std::move(m); }

  // Which cover element each column-0 basis vector lives on.
  void set_owner(int q, std::vector<int> owner) { owner_[q] = std::move(owner); }
  int owner(int q, std::size_t i) const { return owner_.at(q).at(i); }
  int cover_size() const {
    int m = 0;
    for (const auto& [q, o] : owner_)
      for (int x : o) m = std::max(m, x + 1);
    return m;
  }

  Vector apply_dh(Cell src, const Vector& x) const { return apply(dh_, src, {src.first - 1, src.second}, x); }
  Vector apply_dv(Cell src, const Vector& x) const { return apply(dv_, src, {src.first, src.second - 1}, x); }
  const SparseMatrix* dv_matrix(Cell src) const {
    auto it = dv_.find(src);
    return it == dv_.end() ? nullptr : &it->second;
  }

  // d_h^2 = 0, d_v^2 = 0 and d_h d_v = d_v d_h on every basis vector.
  void validate() const {
    for (const auto& [c, n] : dims_) {
      for (std::size_t i = 0; i < n; ++i) {
        Vector e(n, Rational(0));
        e[i] = 1;
        const Cell h{c.first - 1, c.second}, v{c.first, c.second - 1};
        if (!is_zero(apply_dh(h, apply_dh(c, e))) || !is_zero(apply_dv(v, apply_dv(c, e))))
          throw ShapeError("a differential does not square to zero");
        if (apply_dv(h, apply_dh(c, e)) != apply_dh(v, apply_dv(c, e)))
          throw ShapeError("horizontal and vertical differentials do not commute");
      }
    }
  }

  static bool is_zero(const Vector& x) {
    return std::all_of(x.begin(), x.end(), [](const Rational& r) { return r == 0; });
  }

 private:
  Vector apply(const std::map<Cell, SparseMatrix>& ms, Cell src, Cell dst, const Vector& x) const {
    auto it = ms.find(src);
    if (it == ms.end()) return Vector(dim(dst), Rational(0));
    if (it->second.cols() != x.size()) throw DimensionMismatch("vector does not fit the cell");
    return it->second.apply(x);
  }

  std::map<Cell, std::size_t> dims_;
  std::map<Cell, SparseMatrix> dh_, dv_;
  std::map<int, std::vector<int>> owner_;
};

inline void prune(TotalElement& x) {
  std::erase_if(x, [](const auto& kv) { return DoubleComplex::is_zero(kv.second); });
}

inline void axpy(TotalElement& acc, const Rational& s, Cell c, const Vector& v, std::size_t dim) {
  auto [it, fresh] = acc.emplace(c, Vector(dim, Rational(0)));
  for (std::size_t i = 0; i < v.size(); ++i) it->second[i] += s * v[i];
}

inline TotalElement total_add(TotalElement a, const TotalElement& b, const Rational& s = 1) {
  for (const auto& [c, v] : b) axpy(a, s, c, v, v.size());
  prune(a);
  return a;
}

inline TotalElement total_d(const DoubleComplex& dc, const TotalElement& x) {
  TotalElement out;
  for (const auto& [c, v] : x) {
    const Cell h{c.first - 1, c.second}, w{c.first, c.second - 1};
    if (dc.dim(h)) axpy(out, 1, h, dc.apply_dh(c, v), dc.dim(h));
    if (dc.dim(w)) axpy(out, c.first % 2 == 0 ? 1 : -1, w, dc.apply_dv(c, v), dc.dim(w));
  }
  prune(out);
  return out;
}

// Total degree of a homogeneous element; 0 for the zero element.
inline int total_degree(const TotalElement& x) {
  std::set<int> degs;
  for (const auto& [c, v] : x)
    if (!DoubleComplex::is_zero(v)) degs.insert(c.first + c.second);
  if (degs.size() > 1) throw ShapeError("element is not homogeneous");
  return degs.empty() ? 0 : *degs.begin();
}

struct StaircaseResult {
  std::vector<Vector> local;  // one column-0 cycle per cover element, at row `degree`
  int degree = 0;
  TotalElement correction;    // B with z - sum(local) = D(B)
  std::size_t steps = 0;
};

// Pushes z into column 0 by repeatedly writing the top component as a
// vertical boundary, then splits column 0 by cover element.
inline StaircaseResult staircase(const DoubleComplex& dc, TotalElement z) {
  prune(z);
  StaircaseResult res;
  res.degree = total_degree(z);
  if (!total_d(dc, z).empty()) throw NotACycle("input is not a total cycle");
  const int k = res.degree;
  while (true) {
    int N = 0;
    for (const auto& [c, v] : z) N = std::max(N, c.first);
    if (N == 0) break;
    // (-1)^N d_v beta = z_N for beta in cell (N, k - N + 1)
    const Cell top{N, k - N}, src{N, k - N + 1};
    const SparseMatrix* dv = dc.dv_matrix(src);
    Vector rhs = z.at(top);
    if (N % 2) for (auto& r : rhs) r = -r;
    std::optional<Vector> beta;
    if (dv) beta = solve(*dv, rhs);
    if (!beta) throw RowNotExact("no preimage for the column " + std::to_string(N) + " component");
    TotalElement b{{src, *beta}};
    z = total_add(z, total_d(dc, b), -1);
    res.correction = total_add(res.correction, b);
    ++res.steps;
  }
  const int m = dc.cover_size();
  const Cell c0{0, k};
  res.local.assign(static_cast<std::size_t>(m), Vector(dc.dim(c0), Rational(0)));
  if (auto it = z.find(c0); it != z.end())
    for (std::size_t i = 0; i < it->second.size(); ++i) res.local[static_cast<std::size_t>(dc.owner(k, i))][i] = it->second[i];
  return res;
}

struct StaircaseCertificate {
  bool local_cycles = true;       // every output is a vertical cycle
  bool single_support = true;     // every output lives on one cover element
  bool correction_ok = true;      // z - sum(local) == D(correction)
  bool solver_ok = true;          // the solver independently finds a preimage
  bool ok() const { return local_cycles && single_support && correction_ok && solver_ok; }
};

inline StaircaseCertificate certify_staircase(const DoubleComplex& dc, const TotalElement& z, const StaircaseResult& r) {
  StaircaseCertificate cert;
  const Cell c0{0, r.degree};
  TotalElement diff = z;
  for (std::size_t u = 0; u < r.local.size(); ++u) {
    const Vector& v = r.local[u];
    if (!DoubleComplex::is_zero(dc.apply_dv(c0, v))) cert.local_cycles = false;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0 && dc.owner(r.degree, i) != static_cast<int>(u)) cert.single_support = false;
    diff = total_add(diff, TotalElement{{c0, v}}, -1);
  }
  cert.correction_ok = total_add(total_d(dc, r.correction), diff, -1).empty();

  // Solve D x = diff over all cells of total degree + 1.
  std::vector<Cell> src, dst;
  for (const auto& [c, n] : dc.dims()) {
    if (c.first + c.second == r.degree + 1 && n) src.push_back(c);
    if (c.first + c.second == r.degree && n) dst.push_back(c);
  }
  std::map<Cell, std::size_t> soff, doff;
  std::size_t ns = 0, nd = 0;
  for (Cell c : src) soff[c] = std::exchange(ns, ns + dc.dim(c));
  for (Cell c : dst) doff[c] = std::exchange(nd, nd + dc.dim(c));
  SparseMatrix D(nd, ns);
  for (Cell c : src)
    for (std::size_t i = 0; i < dc.dim(c); ++i) {
      Vector e(dc.dim(c), Rational(0));
      e[i] = 1;
      for (const auto& [t, v] : total_d(dc, TotalElement{{c, e}}))
        for (std::size_t j = 0; j < v.size(); ++j) D.add(doff.at(t) + j, soff[c] + i, v[j]);
    }
  Vector rhs(nd, Rational(0));
  for (const auto& [c, v] : diff) {
    auto it = doff.find(c);
    if (it == doff.end()) {
      cert.solver_ok = false;
      continue;
    }
    for (std::size_t j = 0; j < v.size(); ++j) rhs[it->second + j] = v[j];
  }
  if (cert.solver_ok) cert.solver_ok = solve(D, rhs).has_value();
  return cert;
}

// Mayer-Vietoris complex of a graph covered by two vertex sets. Edges sit in
// row 0 and vertices in row -1, so 1-cycles have total degree 0. Column 0 is
// C(U_1) + C(U_2), column 1 is C(U_1 n U_2), d_h x = (x, -x).
struct TwoOpenCover {
  DoubleComplex dc;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::vector<std::size_t>> open_edges;      // [u] -> global edge ids
  std::vector<std::vector<std::size_t>> open_vertices;   // [u] -> global vertex ids
  std::vector<std::size_t> meet_edges, meet_vertices;
};

inline TwoOpenCover two_open_cover(std::size_t num_vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                   const std::set<std::size_t>& u1, const std::set<std::size_t>& u2) {
  TwoOpenCover cov;
  cov.edges = edges;
  const std::set<std::size_t>* opens[2] = {&u1, &u2};
  cov.open_edges.resize(2);
  cov.open_vertices.resize(2);
  for (std::size_t v = 0; v < num_vertices; ++v) {
    if (!u1.count(v) && !u2.count(v)) throw ShapeError("vertex outside the cover");
    for (int u = 0; u < 2; ++u)
      if (opens[u]->count(v)) cov.open_vertices[u].push_back(v);
    if (u1.count(v) && u2.count(v)) cov.meet_vertices.push_back(v);
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    auto [a, b] = edges[e];
    bool any = false;
    for (int u = 0; u < 2; ++u)
      if (opens[u]->count(a) && opens[u]->count(b)) {
        cov.open_edges[u].push_back(e);
        any = true;
      }
    if (!any) throw ShapeError("edge outside the cover");
    if (u1.count(a) && u1.count(b) && u2.count(a) && u2.count(b)) cov.meet_edges.push_back(e);
  }
  auto index_of = [](const std::vector<std::size_t>& v, std::size_t x) {
    return static_cast<std::size_t>(std::find(v.begin(), v.end(), x) - v.begin());
  };
  const std::size_t E0 = cov.open_edges[0].size(), V0 = cov.open_vertices[0].size();
  DoubleComplex& dc = cov.dc;
  dc.set_dim({0, 0}, E0 + cov.open_edges[1].size());
  dc.set_dim({0, -1}, V0 + cov.open_vertices[1].size());
  dc.set_dim({1, 0}, cov.meet_edges.size());
  dc.set_dim({1, -1}, cov.meet_vertices.size());

  auto boundary = [&](const std::vector<std::size_t>& es, const std::vector<std::size_t>& vs) {
    SparseMatrix m(vs.size(), es.size());
    for (std::size_t i = 0; i < es.size(); ++i) {
      auto [a, b] = edges[es[i]];
      m.add(index_of(vs, b), i, 1);
      m.add(index_of(vs, a), i, -1);
    }
    return m;
  };
  SparseMatrix dv0(dc.dim({0, -1}), dc.dim({0, 0}));
  for (int u = 0; u < 2; ++u) {
    SparseMatrix part = boundary(cov.open_edges[u], cov.open_vertices[u]);
    const std::size_t ro = u ? V0 : 0, co = u ? E0 : 0;
    for (std::size_t r = 0; r < part.rows(); ++r)
      for (const auto& [c, v] : part.row(r)) dv0.add(ro + r, co + c, v);
  }
  dc.set_dv({0, 0}, dv0);
  dc.set_dv({1, 0}, boundary(cov.meet_edges, cov.meet_vertices));

  auto restriction = [&](const std::vector<std::size_t>& meet, const std::vector<std::vector<std::size_t>>& per_open) {
    SparseMatrix m(per_open[0].size() + per_open[1].size(), meet.size());
    for (std::size_t i = 0; i < meet.size(); ++i) {
      m.add(index_of(per_open[0], meet[i]), i, 1);
      m.add(per_open[0].size() + index_of(per_open[1], meet[i]), i, -1);
    }
    return m;
  };
  dc.set_dh({1, 0}, restriction(cov.meet_edges, cov.open_edges));
  dc.set_dh({1, -1}, restriction(cov.meet_vertices, cov.open_vertices));

  std::vector<int> eo, vo;
  for (int u = 0; u < 2; ++u) {
    eo.insert(eo.end(), cov.open_edges[u].size(), u);
    vo.insert(vo.end(), cov.open_vertices[u].size(), u);
  }
  dc.set_owner(0, eo);
  dc.set_owner(-1, vo);
  dc.validate();
  return cov;
}

// Lifts a 1-cycle of the whole graph (coefficients per global edge) to a
// total 0-cycle: each edge goes to the first open containing it and the
// column 1 part is solved from D z = 0.
inline TotalElement lift_global_cycle(const TwoOpenCover& cov, const Vector& c) {
  if (c.size() != cov.edges.size()) throw DimensionMismatch("one coefficient per edge expected");
  const DoubleComplex& dc = cov.dc;
  Vector z0(dc.dim({0, 0}), Rational(0));
  const std::size_t E0 = cov.open_edges[0].size();
  for (std::size_t e = 0; e < c.size(); ++e) {
    auto it = std::find(cov.open_edges[0].begin(), cov.open_edges[0].end(), e);
    if (it != cov.open_edges[0].end()) {
      z0[static_cast<std::size_t>(it - cov.open_edges[0].begin())] += c[e];
    } else {
      auto jt = std::find(cov.open_edges[1].begin(), cov.open_edges[1].end(), e);
      z0[E0 + static_cast<std::size_t>(jt - cov.open_edges[1].begin())] += c[e];
    }
  }
  Vector rhs = dc.apply_dv({0, 0}, z0);
  for (auto& r : rhs) r = -r;
  SparseMatrix dh(dc.dim({0, -1}), dc.dim({1, -1}));
  for (std::size_t i = 0; i < dc.dim({1, -1}); ++i) {
    Vector e(dc.dim({1, -1}), Rational(0));
    e[i] = 1;
    Vector col = dc.apply_dh({1, -1}, e);
    for (std::size_t r = 0; r < col.size(); ++r) dh.add(r, i, col[r]);
  }
  auto z1 = solve(dh, rhs);
  if (!z1) throw NotACycle("the chain is not a cycle of the graph");
  TotalElement z{{{0, 0}, z0}, {{1, -1}, *z1}};
  prune(z);
  return z;
}

// Two loops joined through the overlap, and a cycle that crosses it.
struct StaircaseDemo {
  TwoOpenCover cover;
  Vector cycle;  // per global edge
};

inline StaircaseDemo staircase_demo_complex() {
  // overlap path 0-1-2; U_1 adds 0-3-4-2, U_2 adds 2-5-6-0
  std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}, {1, 2}, {0, 3}, {3, 4}, {4, 2}, {2, 5}, {5, 6}, {6, 0}};
  StaircaseDemo d{two_open_cover(7, edges, {0, 1, 2, 3, 4}, {0, 1, 2, 5, 6}), {}};
  d.cycle = {0, 0, 1, 1, 1, 1, 1, 1};
  return d;
}

}  // namespace ncres
