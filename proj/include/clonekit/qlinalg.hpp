#pragma once

// Dense complex vectors and matrices sized for desk-scale state-vector work.
// Everything here is a pure function of its arguments.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clonekit/core.hpp"

namespace clonekit {

class CVector {
 public:
  CVector() = default;

  explicit CVector(std::size_t dim) : entries_(dim, complex{0.0, 0.0}) {
    if (dim == 0) throw ValidationError("CVector: dimension must be >= 1");
  }

  explicit CVector(std::vector<complex> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw ValidationError("CVector: dimension must be >= 1");
    for (const auto& z : entries_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw ValidationError("CVector: non-finite entry");
    }
  }

  CVector(std::initializer_list<complex> entries)
      : CVector(std::vector<complex>(entries)) {}

  /// Canonical basis vector e_index of the given dimension.
  static CVector basis(std::size_t dim, std::size_t index) {
    if (index >= dim) throw ValidationError("CVector::basis: index out of range");
    CVector v(dim);
    v.entries_[index] = 1.0;
    return v;
  }

  std::size_t dim() const noexcept { return entries_.size(); }
  complex& operator[](std::size_t i) { return entries_[i]; }
  const complex& operator[](std::size_t i) const { return entries_[i]; }
  std::span<const complex> entries() const noexcept { return entries_; }
  std::span<complex> entries() noexcept { return entries_; }

  real norm() const {
    real s = 0.0;
    for (const auto& z : entries_) s += std::norm(z);
    return std::sqrt(s);
  }

  CVector& operator+=(const CVector& other) {
    require_same_dim(other, "operator+=");
    for (std::size_t i = 0; i < dim(); ++i) entries_[i] += other.entries_[i];
    return *this;
  }

  CVector& operator-=(const CVector& other) {
    require_same_dim(other, "operator-=");
    for (std::size_t i = 0; i < dim(); ++i) entries_[i] -= other.entries_[i];
    return *this;
  }

  CVector& operator*=(complex s) {
    for (auto& z : entries_) z *= s;
    return *this;
  }

  friend CVector operator+(CVector a, const CVector& b) { return a += b; }
  friend CVector operator-(CVector a, const CVector& b) { return a -= b; }
  friend CVector operator*(complex s, CVector v) { return v *= s; }

 private:
  void require_same_dim(const CVector& other, const char* what) const {
    if (other.dim() != dim())
      throw ValidationError(std::string("CVector::") + what + ": dimension mismatch");
  }

  std::vector<complex> entries_;
};

/// Row-major dense complex matrix.
class CMatrix {
 public:
  CMatrix() = default;

  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, complex{0.0, 0.0}) {
    if (rows == 0 || cols == 0) throw ValidationError("CMatrix: empty shape");
  }

  CMatrix(std::size_t rows, std::size_t cols, std::vector<complex> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows == 0 || cols == 0) throw ValidationError("CMatrix: empty shape");
    if (entries_.size() != rows * cols)
      throw ValidationError("CMatrix: entry count does not match shape");
  }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const complex& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }
  std::span<const complex> entries() const noexcept { return entries_; }

  CMatrix adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    return out;
  }

  CVector column(std::size_t c) const {
    CVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols_ != b.rows_) throw ValidationError("CMatrix product: shape mismatch");
    CMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const complex aik = a(i, k);
        if (aik == complex{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend CVector operator*(const CMatrix& a, const CVector& v) {
    if (a.cols_ != v.dim()) throw ValidationError("CMatrix-vector product: shape mismatch");
    CVector out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      complex s{};
      for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * v[j];
      out[i] = s;
    }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<complex> entries_;
};

/// <a|b>, conjugate-linear in the first argument.
inline complex inner(const CVector& a, const CVector& b) {
  if (a.dim() != b.dim()) throw ValidationError("inner: dimension mismatch");
  complex s{};
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

/// Kronecker product; index of (i, j) is i * dim(b) + j.
inline CVector tensor(const CVector& a, const CVector& b) {
  CVector out(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a[i] * b[j];
  return out;
}

/// Gram matrix G(i, j) = <v_i|v_j>.
inline CMatrix gram(std::span<const CVector> vs) {
  if (vs.empty()) throw ValidationError("gram: empty vector list");
  CMatrix g(vs.size(), vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = 0; j < vs.size(); ++j) g(i, j) = inner(vs[i], vs[j]);
  return g;
}

/// Largest absolute entry of A - B.
inline real max_abs_diff(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("max_abs_diff: shape mismatch");
  real worst = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    worst = std::max(worst, std::abs(a.entries()[i] - b.entries()[i]));
  return worst;
}

inline real max_abs_diff(const CVector& a, const CVector& b) {
  if (a.dim() != b.dim()) throw ValidationError("max_abs_diff: dimension mismatch");
  real worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

/// max |(U^dagger U - I)_{ij}|
inline real unitarity_defect(const CMatrix& u) {
  if (u.rows() != u.cols()) throw ValidationError("unitarity_defect: matrix not square");
  const std::size_t n = u.rows();
  real worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      complex s{};
      for (std::size_t r = 0; r < n; ++r) s += std::conj(u(r, i)) * u(r, j);
      if (i == j) s -= 1.0;
      worst = std::max(worst, std::abs(s));
    }
  return worst;
}

struct Psd2Verdict {
  real det = 0.0;
  bool psd = false;
};

inline void require_hermitian2(const CMatrix& h, real tol, const char* who) {
  if (h.rows() != 2 || h.cols() != 2)
    throw ValidationError(std::string(who) + ": expected a 2x2 matrix");
  if (std::abs(h(0, 0).imag()) > tol || std::abs(h(1, 1).imag()) > tol ||
      std::abs(h(0, 1) - std::conj(h(1, 0))) > tol)
    throw ValidationError(std::string(who) + ": matrix is not Hermitian");
}

/// A 2x2 Hermitian matrix is PSD iff both diagonal entries and the
/// determinant are nonnegative.
inline Psd2Verdict psd2_check(const CMatrix& h, real tol = default_tolerance) {
  require_hermitian2(h, tol, "psd2_check");
  const real a = h(0, 0).real();
  const real d = h(1, 1).real();
  const real det = a * d - std::norm(h(0, 1));
  return {det, a >= -tol && d >= -tol && det >= -tol};
}

/// Lower-triangular L with L L^dagger = H for a PSD 2x2 H. A (numerically)
/// rank-deficient H yields a zero second column; H = 0 yields L = 0.
inline CMatrix cholesky_psd2(const CMatrix& h, real tol = default_tolerance) {
  if (!psd2_check(h, tol).psd)
    throw InfeasibleError("cholesky_psd2: matrix is not positive semidefinite");
  const real a = std::max(h(0, 0).real(), 0.0);
  const real d = std::max(h(1, 1).real(), 0.0);
  CMatrix l(2, 2);
  if (a > tol) {
    const real l00 = std::sqrt(a);
    const complex l10 = h(1, 0) / l00;
    const real rest = d - std::norm(l10);
    l(0, 0) = l00;
    l(1, 0) = l10;
    l(1, 1) = std::sqrt(std::max(rest, 0.0));
  } else {
    // First row/column vanish; whatever weight remains sits in column 0.
    l(1, 0) = std::sqrt(d);
  }
  return l;
}

namespace detail {

// Orthogonalize v against an orthonormal set twice (CGS2) and return the
// residual norm before normalization.
inline real orthonormalize_against(CVector& v, std::span<const CVector> basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) {
      const complex c = inner(q, v);
      for (std::size_t i = 0; i < v.dim(); ++i) v[i] -= c * q[i];
    }
  const real n = v.norm();
  if (n > 0.0) v *= complex{1.0 / n, 0.0};
  return n;
}

// Append canonical basis vectors, in ascending index order, until `basis`
// spans the whole space. Candidates that are (numerically) already in the
// span are skipped.
inline void complete_basis(std::vector<CVector>& basis, std::size_t dim) {
  for (std::size_t idx = 0; idx < dim && basis.size() < dim; ++idx) {
    CVector v = CVector::basis(dim, idx);
    const real n = orthonormalize_against(v, basis);
    if (n > 1e-6) basis.push_back(std::move(v));
  }
  if (basis.size() != dim) throw NumericalError("complete_basis: could not span the space");
}

}  // namespace detail

/// Unitary U with U inputs[j] = outputs[j]. Requires Gram(inputs) =
/// Gram(outputs) and linearly independent inputs. The completion is
/// deterministic: inputs are orthonormalized in order, the same linear
/// combinations are applied to the outputs, both sides are completed with
/// canonical basis vectors in ascending index order, and leftover directions
/// are paired in the order they were produced.
inline CMatrix extend_to_unitary(std::span<const CVector> inputs,
                                 std::span<const CVector> outputs,
                                 real tol = default_tolerance) {
  if (inputs.size() != outputs.size() || inputs.empty())
    throw ValidationError("extend_to_unitary: input/output counts differ or are empty");
  const std::size_t dim = inputs.front().dim();
  for (const auto& v : inputs)
    if (v.dim() != dim) throw ValidationError("extend_to_unitary: ragged inputs");
  for (const auto& v : outputs)
    if (v.dim() != dim) throw ValidationError("extend_to_unitary: output dimension differs");
  if (max_abs_diff(gram(inputs), gram(outputs)) > tol)
    throw InfeasibleError("extend_to_unitary: Gram matrices differ beyond tolerance");

  const std::size_t n = inputs.size();
  // coeffs[j] expresses the j-th orthonormal input direction in terms of the
  // original inputs (Gram-Schmidt on the inputs, tracked symbolically).
  std::vector<CVector> q_in;
  std::vector<std::vector<complex>> coeffs;
  for (std::size_t j = 0; j < n; ++j) {
    CVector v = inputs[j];
    std::vector<complex> c(n, complex{});
    c[j] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t a = 0; a < q_in.size(); ++a) {
        const complex proj = inner(q_in[a], v);
        for (std::size_t i = 0; i < dim; ++i) v[i] -= proj * q_in[a][i];
        for (std::size_t b = 0; b < n; ++b) c[b] -= proj * coeffs[a][b];
      }
    const real nv = v.norm();
    if (nv <= tol) throw ValidationError("extend_to_unitary: inputs are linearly dependent");
    v *= complex{1.0 / nv, 0.0};
    for (auto& x : c) x /= nv;
    q_in.push_back(std::move(v));
    coeffs.push_back(std::move(c));
  }

  std::vector<CVector> q_out;
  for (std::size_t a = 0; a < n; ++a) {
    CVector w(dim);
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t i = 0; i < dim; ++i) w[i] += coeffs[a][b] * outputs[b][i];
    // w is orthonormal up to the Gram mismatch; clean it up.
    const real nw = detail::orthonormalize_against(w, q_out);
    if (nw <= tol) throw NumericalError("extend_to_unitary: output image degenerated");
    q_out.push_back(std::move(w));
  }

  detail::complete_basis(q_in, dim);
  detail::complete_basis(q_out, dim);

  // U = sum_a |q_out_a><q_in_a|
  CMatrix u(dim, dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const CVector& o = q_out[a];
    const CVector& in = q_in[a];
    for (std::size_t r = 0; r < dim; ++r) {
      const complex orow = o[r];
      if (orow == complex{}) continue;
      for (std::size_t c = 0; c < dim; ++c) u(r, c) += orow * std::conj(in[c]);
    }
  }
  return u;
}

inline CMatrix extend_to_unitary(const std::vector<CVector>& inputs,
                                 const std::vector<CVector>& outputs,
                                 real tol = default_tolerance) {
  return extend_to_unitary(std::span<const CVector>(inputs),
                           std::span<const CVector>(outputs), tol);
}

}  // namespace clonekit
