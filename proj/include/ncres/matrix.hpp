#pragma once

// Sparse matrices with operator entries: M_r(A) with a declared size, or
// finite matrices of unbounded size (gl^fin).

#include <map>
#include <optional>
#include <utility>

#include "ncres/opalg.hpp"

namespace ncres {

using Index2 = std::pair<std::size_t, std::size_t>;

// Scalar matrices (used for the block factor of i_m and for Kronecker data).
using ScalarMatrix = std::map<Index2, Rational>;

class MatrixOperator {
 public:
  using Entries = std::map<Index2, OperatorElement>;

  MatrixOperator() = default;
  // `size` empty means unbounded.
  MatrixOperator(std::size_t n, Mode mode, std::optional<std::size_t> size = std::nullopt)
      : n_(n), mode_(mode), size_(size) {}

  std::size_t n() const { return n_; }
  Mode mode() const { return mode_; }
  std::optional<std::size_t> declared_size() const { return size_; }
  bool unbounded() const { return !size_.has_value(); }
  const Entries& entries() const { return entries_; }

  // 1 + the largest index in use (0 for the empty matrix), or the declared size.
  std::size_t effective_size() const {
    if (size_) return *size_;
    std::size_t s = 0;
    for (const auto& [ij, e] : entries_) s = std::max({s, ij.first + 1, ij.second + 1});
    return s;
  }

  const OperatorElement* find(std::size_t i, std::size_t j) const {
    auto it = entries_.find({i, j});
    return it == entries_.end() ? nullptr : &it->second;
  }

  OperatorElement at(std::size_t i, std::size_t j) const {
    const OperatorElement* e = find(i, j);
    return e ? *e : OperatorElement(n_, mode_);
  }

  // Adds `e` to entry (i, j). Exact zeros are never stored; truncated zeros
  // are kept because their floors still carry information.
  void accumulate(std::size_t i, std::size_t j, const OperatorElement& e) {
    if (e.n() != n_) throw DimensionMismatch("entry has the wrong number of variables");
    if (e.mode() != mode_) throw ModeMismatch("entry has the wrong mode");
    if (size_ && (i >= *size_ || j >= *size_)) throw DimensionMismatch("entry index beyond declared size");
    auto it = entries_.find({i, j});
    if (it == entries_.end()) {
      if (!e.is_exact_zero()) entries_.emplace(Index2{i, j}, e);
      return;
    }
    it->second = op_add(it->second, e);
    if (it->second.is_exact_zero()) entries_.erase(it);
  }

  bool is_zero() const {
    for (const auto& [ij, e] : entries_)
      if (!e.is_zero()) return false;
    return true;
  }

  bool operator==(const MatrixOperator& o) const {
    return n_ == o.n_ && mode_ == o.mode_ && size_ == o.size_ && entries_ == o.entries_;
  }
  bool operator<(const MatrixOperator& o) const {
    if (n_ != o.n_) return n_ < o.n_;
    if (mode_ != o.mode_) return mode_ < o.mode_;
    if (size_ != o.size_) return size_ < o.size_;
    return std::lexicographical_compare(entries_.begin(), entries_.end(), o.entries_.begin(), o.entries_.end(),
                                        [](const auto& a, const auto& b) {
                                          if (a.first != b.first) return a.first < b.first;
                                          return a.second < b.second;
                                        });
  }

 private:
  std::size_t n_ = 0;
  Mode mode_ = Mode::Diff;
  std::optional<std::size_t> size_;
  Entries entries_;
};

namespace detail {

inline void check_compatible(const MatrixOperator& a, const MatrixOperator& b) {
  if (a.n() != b.n()) throw DimensionMismatch("matrices have different numbers of variables");
  if (a.mode() != b.mode()) throw ModeMismatch("matrices have different modes");
}

inline std::optional<std::size_t> common_size(const MatrixOperator& a, const MatrixOperator& b) {
  if (a.declared_size() && b.declared_size() && *a.declared_size() != *b.declared_size()) {
    throw DimensionMismatch("matrix sizes differ");
  }
  return a.declared_size() ? a.declared_size() : b.declared_size();
}

}  // namespace detail

inline MatrixOperator unit_embed(const OperatorElement& a, std::size_t i, std::size_t j,
                                 std::optional<std::size_t> size = std::nullopt) {
  MatrixOperator m(a.n(), a.mode(), size);
  m.accumulate(i, j, a);
  return m;
}

inline MatrixOperator identity_matrix(std::size_t n, Mode mode, std::size_t r) {
  MatrixOperator m(n, mode, r);
  for (std::size_t i = 0; i < r; ++i) m.accumulate(i, i, OperatorElement::constant(n, mode, 1));
  return m;
}

inline MatrixOperator mat_add(const MatrixOperator& a, const MatrixOperator& b) {
  detail::check_compatible(a, b);
  MatrixOperator out(a.n(), a.mode(), detail::common_size(a, b));
  for (const auto& [ij, e] : a.entries()) out.accumulate(ij.first, ij.second, e);
  for (const auto& [ij, e] : b.entries()) out.accumulate(ij.first, ij.second, e);
  return out;
}

inline MatrixOperator mat_scalar_mul(const Rational& c, const MatrixOperator& a) {
  MatrixOperator out(a.n(), a.mode(), a.declared_size());
  if (c == 0) return out;
  for (const auto& [ij, e] : a.entries()) out.accumulate(ij.first, ij.second, scalar_mul(c, e));
  return out;
}

inline MatrixOperator mat_sub(const MatrixOperator& a, const MatrixOperator& b) {
  return mat_add(a, mat_scalar_mul(-1, b));
}

inline MatrixOperator mat_mul(const MatrixOperator& a, const MatrixOperator& b,
                              const std::optional<TruncationWindow>& window = std::nullopt) {
  detail::check_compatible(a, b);
  MatrixOperator out(a.n(), a.mode(), detail::common_size(a, b));
  std::map<std::size_t, std::vector<std::pair<std::size_t, const OperatorElement*>>> brows;
  for (const auto& [ij, e] : b.entries()) brows[ij.first].emplace_back(ij.second, &e);
  for (const auto& [ij, e] : a.entries()) {
    auto it = brows.find(ij.second);
    if (it == brows.end()) continue;
    for (const auto& [k, f] : it->second) out.accumulate(ij.first, k, op_mul(e, *f, window));
  }
  return out;
}

inline MatrixOperator mat_commutator(const MatrixOperator& a, const MatrixOperator& b,
                                     const std::optional<TruncationWindow>& window = std::nullopt) {
  return mat_sub(mat_mul(a, b, window), mat_mul(b, a, window));
}

// Applies an entrywise map (used for derivations x (x) 1 acting on matrices).
template <class F>
MatrixOperator mat_apply(const MatrixOperator& a, F&& f) {
  MatrixOperator out;
  bool init = false;
  for (const auto& [ij, e] : a.entries()) {
    OperatorElement v = f(e);
    if (!init) {
      out = MatrixOperator(v.n(), v.mode(), a.declared_size());
      init = true;
    }
    out.accumulate(ij.first, ij.second, v);
  }
  if (!init) out = MatrixOperator(a.n(), Mode::PsiDiff, a.declared_size());
  return out;
}

inline MatrixOperator mat_as_psidiff(const MatrixOperator& a) {
  MatrixOperator out(a.n(), Mode::PsiDiff, a.declared_size());
  for (const auto& [ij, e] : a.entries()) out.accumulate(ij.first, ij.second, as_psidiff(e));
  return out;
}

// Multiplies every entry by the scalar-diagonal element q (x) 1 on the right.
inline MatrixOperator mat_mul_diag(const MatrixOperator& a, const OperatorElement& q,
                                   const std::optional<TruncationWindow>& window = std::nullopt) {
  MatrixOperator out(a.n(), a.mode(), a.declared_size());
  for (const auto& [ij, e] : a.entries()) out.accumulate(ij.first, ij.second, op_mul(e, q, window));
  return out;
}

inline OperatorElement matrix_trace(const MatrixOperator& m) {
  OperatorElement s(m.n(), m.mode());
  for (const auto& [ij, e] : m.entries())
    if (ij.first == ij.second) s = op_add(s, e);
  return s;
}

inline Rational full_trace(const MatrixOperator& m) { return residue_trace(matrix_trace(m)); }

// Kronecker re-indexing (block b, inner k) -> b*m + k.
inline MatrixOperator i_m(const MatrixOperator& M, const ScalarMatrix& G) {
  if (!M.declared_size()) throw DimensionMismatch("i_m needs a matrix of declared size m");
  const std::size_t m = *M.declared_size();
  MatrixOperator out(M.n(), M.mode(), std::nullopt);
  for (const auto& [bb, g] : G) {
    if (g == 0) continue;
    for (const auto& [kk, e] : M.entries()) {
      out.accumulate(bb.first * m + kk.first, bb.second * m + kk.second, scalar_mul(g, e));
    }
  }
  return out;
}

inline ScalarMatrix scalar_identity(std::size_t count) {
  ScalarMatrix g;
  for (std::size_t i = 0; i < count; ++i) g[{i, i}] = 1;
  return g;
}

inline MatrixOperator iota_pad(const MatrixOperator& M, std::size_t p) {
  if (!M.declared_size()) throw DimensionMismatch("iota_pad needs a matrix of declared size");
  MatrixOperator out(M.n(), M.mode(), *M.declared_size() + p);
  for (const auto& [ij, e] : M.entries()) out.accumulate(ij.first, ij.second, e);
  return out;
}

inline MatrixOperator block_direct_sum(const MatrixOperator& A, const MatrixOperator& B) {
  detail::check_compatible(A, B);
  if (!A.declared_size() || !B.declared_size()) throw DimensionMismatch("block sum needs declared sizes");
  const std::size_t m = *A.declared_size();
  MatrixOperator out(A.n(), A.mode(), m + *B.declared_size());
  for (const auto& [ij, e] : A.entries()) out.accumulate(ij.first, ij.second, e);
  for (const auto& [ij, e] : B.entries()) out.accumulate(ij.first + m, ij.second + m, e);
  return out;
}

// Entrywise agreement on the common exactness regions.
inline bool agree(const MatrixOperator& a, const MatrixOperator& b) {
  detail::check_compatible(a, b);
  for (const auto& [ij, e] : a.entries())
    if (!agree(e, b.at(ij.first, ij.second))) return false;
  for (const auto& [ij, e] : b.entries())
    if (!agree(a.at(ij.first, ij.second), e)) return false;
  return true;
}

}  // namespace ncres
