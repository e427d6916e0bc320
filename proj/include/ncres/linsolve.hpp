#pragma once

// Exact sparse Gaussian elimination over the rationals.
//
// Equations are added one at a time and reduced against the current pivot
// rows, so a row echelon form is maintained incrementally. Solutions set
// free variables to zero.

#include <map>
#include <optional>
#include <vector>

#include "ncres/core.hpp"

namespace ncres {

using SparseRow = std::map<std::size_t, Rational>;
using Vector = std::vector<Rational>;

class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void add(std::size_t r, std::size_t c, const Rational& v) {
    if (v == 0) return;
    auto& row = data_.at(r);
    auto [it, fresh] = row.emplace(c, v);
    if (!fresh) {
      it->second += v;
      if (it->second == 0) row.erase(it);
    }
  }
  Rational at(std::size_t r, std::size_t c) const {
    auto it = data_.at(r).find(c);
    return it == data_.at(r).end() ? Rational(0) : it->second;
  }
  const SparseRow& row(std::size_t r) const { return data_.at(r); }

  Vector apply(const Vector& x) const {
    Vector y(rows_, Rational(0));
    for (std::size_t r = 0; r < rows_; ++r)
      for (const auto& [c, v] : data_[r]) y[r] += v * x.at(c);
    return y;
  }

  SparseMatrix operator*(const SparseMatrix& o) const {
    SparseMatrix out(rows_, o.cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (const auto& [k, v] : data_[r])
        for (const auto& [c, w] : o.data_.at(k)) out.add(r, c, v * w);
    return out;
  }

  bool is_zero() const {
    for (const auto& r : data_)
      if (!r.empty()) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<SparseRow> data_;
};

class LinearSolver {
 public:
  explicit LinearSolver(std::size_t ncols) : ncols_(ncols) {}

  // Adds the equation sum_c row[c] x_c = rhs. Returns false once the system
  // is known to be inconsistent.
  bool add_equation(SparseRow row, Rational rhs) {
    reduce(row, rhs);
    if (row.empty()) {
      if (rhs != 0) consistent_ = false;
      return consistent_;
    }
    const std::size_t lead = row.begin()->first;
    const Rational inv = 1 / row.begin()->second;
    for (auto& [c, v] : row) v *= inv;
    rhs *= inv;
    pivots_.emplace(lead, Pivot{std::move(row), rhs});
    return consistent_;
  }

  bool consistent() const { return consistent_; }
  std::size_t rank() const { return pivots_.size(); }
  std::size_t cols() const { return ncols_; }

  std::vector<std::size_t> free_columns() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < ncols_; ++c)
      if (!pivots_.count(c)) out.push_back(c);
    return out;
  }

  std::optional<Vector> solution() const {
    if (!consistent_) return std::nullopt;
    return back_substitute(std::nullopt);
  }

  // Basis of the solution space of the homogeneous system.
  std::vector<Vector> nullspace() const {
    std::vector<Vector> out;
    for (std::size_t f : free_columns()) out.push_back(back_substitute(f));
    return out;
  }

 private:
  struct Pivot {
    SparseRow row;
    Rational rhs;
  };

  void reduce(SparseRow& row, Rational& rhs) const {
    for (auto it = row.begin(); it != row.end();) {
      if (it->second == 0) {
        it = row.erase(it);
        continue;
      }
      auto p = pivots_.find(it->first);
      if (p == pivots_.end()) {
        ++it;
        continue;
      }
      const std::size_t col = it->first;
      const Rational f = it->second;
      for (const auto& [c, v] : p->second.row) {
        auto [jt, fresh] = row.emplace(c, -f * v);
        if (!fresh) jt->second -= f * v;
      }
      rhs -= f * p->second.rhs;
      // The pivot column is now zero; restart just past it.
      row.erase(col);
      it = row.upper_bound(col);
    }
  }

  // With `unit_free` set, solves the homogeneous system with that free
  // variable equal to 1; otherwise the inhomogeneous one with free variables 0.
  Vector back_substitute(std::optional<std::size_t> unit_free) const {
    Vector x(ncols_, Rational(0));
    if (unit_free) x[*unit_free] = 1;
    for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
      Rational v = unit_free ? Rational(0) : it->second.rhs;
      for (const auto& [c, a] : it->second.row) {
        if (c != it->first) v -= a * x[c];
      }
      x[it->first] = v;
    }
    return x;
  }

  std::size_t ncols_;
  bool consistent_ = true;
  std::map<std::size_t, Pivot> pivots_;
};

// Solves A x = b; nullopt when inconsistent.
inline std::optional<Vector> solve(const SparseMatrix& a, const Vector& b) {
  LinearSolver s(a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    if (!s.add_equation(a.row(r), b.at(r))) return std::nullopt;
  }
  return s.solution();
}

inline std::size_t rank(const SparseMatrix& a) {
  LinearSolver s(a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) s.add_equation(a.row(r), 0);
  return s.rank();
}

}  // namespace ncres
