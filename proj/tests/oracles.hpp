#pragma once

// Test-side reference computations. Nothing here calls into the library:
// states are built as plain amplitude vectors, Gram matrices are taken entry
// by entry from those vectors, and PSD is decided by the smallest eigenvalue
// rather than the determinant.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Vec = std::vector<cplx>;
using Mat2 = std::array<std::array<cplx, 2>, 2>;

inline cplx dot(const Vec& a, const Vec& b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline Vec kron(const Vec& a, const Vec& b) {
  Vec out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(x * y);
  return out;
}

inline Vec power(const Vec& s, int n) {
  Vec out{1.0};
  for (int i = 0; i < n; ++i) out = kron(out, s);
  return out;
}

/// The pair |0>, a|0> + sqrt(1-|a|^2)|1>, whose overlap is a.
inline std::array<Vec, 2> pair_with_overlap(cplx a) {
  return {Vec{1.0, 0.0}, Vec{a, std::sqrt(std::max(0.0, 1.0 - std::norm(a)))}};
}

enum class Kind { joint, ncm, supp };

/// Residual Gram matrix built from explicit vectors: input overlaps minus the
/// success-branch overlaps sum_k sqrt(r r) <copies_1|copies_2> p_k.
inline Mat2 residual(Kind kind, cplx alpha, cplx beta, const std::vector<double>& r1,
                     const std::vector<double>& r2, const std::vector<cplx>& p) {
  const auto psi = pair_with_overlap(alpha);
  const auto phi = pair_with_overlap(beta);
  std::array<Vec, 2> in;
  for (std::size_t i = 0; i < 2; ++i) {
    switch (kind) {
      case Kind::joint: in[i] = kron(psi[i], phi[i]); break;
      case Kind::ncm: in[i] = psi[i]; break;
      case Kind::supp: in[i] = phi[i]; break;
    }
  }
  Mat2 g{};
  double s1 = 0.0, s2 = 0.0;
  for (double x : r1) s1 += x;
  for (double x : r2) s2 += x;
  g[0][0] = 1.0 - s1;
  g[1][1] = 1.0 - s2;
  cplx off = dot(in[0], in[1]);
  for (std::size_t k = 0; k < r1.size(); ++k) {
    const int copies = kind == Kind::supp ? static_cast<int>(k) + 1 : static_cast<int>(k) + 2;
    off -= std::sqrt(r1[k] * r2[k]) * dot(power(psi[0], copies), power(psi[1], copies)) * p[k];
  }
  g[0][1] = off;
  g[1][0] = std::conj(off);
  return g;
}

/// Smallest eigenvalue of a 2x2 Hermitian matrix.
inline double min_eigenvalue(const Mat2& h) {
  const double a = h[0][0].real(), d = h[1][1].real();
  return 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + std::norm(h[0][1]));
}

/// |z - sum c_k p_k| minimized over |p_k| <= 1 equals max(0, |z| - sum |c_k|).
/// Here the minimum is found by brute force over a polar grid for m = 1.
inline double min_offdiag_bruteforce(cplx z, cplx c, int n_radius = 200, int n_phase = 720) {
  double best = std::abs(z);
  const double pi = std::acos(-1.0);
  for (int i = 0; i <= n_radius; ++i)
    for (int j = 0; j < n_phase; ++j) {
      const cplx p = std::polar(static_cast<double>(i) / n_radius, 2.0 * pi * j / n_phase);
      best = std::min(best, std::abs(z - c * p));
    }
  return best;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  cplx in_disk(double max_modulus = 1.0) {
    const double rad = max_modulus * std::sqrt(uniform());
    return std::polar(rad, uniform(0.0, 2.0 * std::acos(-1.0)));
  }
  Vec unit_vector(std::size_t dim) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec v(dim);
    double s = 0.0;
    for (auto& x : v) {
      x = {n(gen_), n(gen_)};
      s += std::norm(x);
    }
    for (auto& x : v) x /= std::sqrt(s);
    return v;
  }
  /// m nonnegative numbers summing to `total`.
  std::vector<double> simplex(int m, double total) {
    std::vector<double> w(static_cast<std::size_t>(m));
    double s = 0.0;
    for (auto& x : w) {
      x = -std::log(1.0 - uniform());
      s += x;
    }
    for (auto& x : w) x *= total / s;
    return w;
  }

 private:
  std::mt19937_64 gen_;
};

/// Largest r in [0, 1] with pred(r) true, given pred monotone (true below a
/// threshold) and pred(0) true.
template <class Pred>
double boundary_by_bisection(Pred pred) {
  if (pred(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Reduced density matrix of the first qubit of a state on 2 x rest.
inline Mat2 reduce_first_qubit(const Vec& psi) {
  const std::size_t rest = psi.size() / 2;
  Mat2 rho{};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t b = 0; b < rest; ++b)
        rho[i][j] += psi[i * rest + b] * std::conj(psi[j * rest + b]);
  return rho;
}

}  // namespace oracle
