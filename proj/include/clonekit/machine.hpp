#pragma once

// Machine descriptions and their existence theory.
//
// A machine on two inputs exists iff its 2x2 residual Gram matrix (input
// overlaps minus the success-branch overlaps) is positive semidefinite. The
// residual has diagonal 1 - sum_k r_k^(i) and off-diagonal z - sum_k c_k p_k,
// where, with a = <psi_1|psi_2>, b = <phi_1|phi_2> and s_k = sqrt(r_k^(1) r_k^(2)):
//
//   joint          z = a b   c_k = s_k a^(k+1)
//   ncm            z = a     c_k = s_k a^(k+1)
//   supplementary  z = b     c_k = s_k a^k

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "clonekit/core.hpp"
#include "clonekit/qlinalg.hpp"
#include "clonekit/states.hpp"

namespace clonekit {

struct MachineSpec {
  MachineKind kind = MachineKind::joint;
  complex alpha{0.0, 0.0};
  /// Ignored for MachineKind::ncm.
  complex beta{1.0, 0.0};
  int m = 1;
  /// r[i][k-1] is the success probability of slot k on input i.
  std::array<std::vector<real>, 2> r{std::vector<real>(1, 0.0), std::vector<real>(1, 0.0)};
  /// Probe overlaps p_k; absent means "use the optimal ones".
  std::optional<std::vector<complex>> p;

  /// Same per-slot probabilities on both inputs.
  static MachineSpec symmetric(MachineKind kind, complex alpha, complex beta,
                               std::vector<real> r_slots) {
    MachineSpec s;
    s.kind = kind;
    s.alpha = alpha;
    s.beta = beta;
    s.m = static_cast<int>(r_slots.size());
    s.r = {r_slots, r_slots};
    return s;
  }

  real total(int i) const {
    real s = 0.0;
    for (real x : r[static_cast<std::size_t>(i)]) s += x;
    return s;
  }
};

namespace detail {

inline void clamp_unit_modulus(complex& z, const char* what) {
  const real a = std::abs(z);
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw ValidationError(std::string(what) + " is not finite");
  if (a > 1.0 + 1e-12) throw ValidationError(std::string("|") + what + "| exceeds 1");
  if (a > 1.0) z /= a;
}

}  // namespace detail

/// Checks the spec invariants and returns a copy with overlaps that exceed 1
/// by rounding (at most 1e-12) clamped onto the unit circle and probabilities
/// within `tol` of [0,1] clamped into it.
inline MachineSpec validated(MachineSpec spec, real tol = default_tolerance) {
  if (spec.m < 1) throw ValidationError("m must be >= 1");
  detail::clamp_unit_modulus(spec.alpha, "alpha");
  if (spec.kind == MachineKind::ncm) {
    spec.beta = 1.0;
  } else {
    detail::clamp_unit_modulus(spec.beta, "beta");
  }
  for (int i = 0; i < 2; ++i) {
    auto& row = spec.r[static_cast<std::size_t>(i)];
    if (row.size() != static_cast<std::size_t>(spec.m))
      throw ValidationError("r row " + std::to_string(i + 1) + " must have m entries");
    for (real& x : row) {
      if (!std::isfinite(x) || x < -tol || x > 1.0 + tol)
        throw ValidationError("success probabilities must lie in [0, 1]");
      x = std::clamp(x, 0.0, 1.0);
    }
    if (spec.total(i) > 1.0 + tol)
      throw ValidationError("success probabilities of input " + std::to_string(i + 1) +
                            " sum above 1");
  }
  if (spec.p) {
    if (spec.p->size() != static_cast<std::size_t>(spec.m))
      throw ValidationError("p must have m entries");
    for (auto& pk : *spec.p) detail::clamp_unit_modulus(pk, "p_k");
  }
  return spec;
}

/// The constant z of the residual off-diagonal.
inline complex residual_target(const MachineSpec& spec) {
  switch (spec.kind) {
    case MachineKind::joint: return spec.alpha * spec.beta;
    case MachineKind::ncm: return spec.alpha;
    case MachineKind::supplementary: return spec.beta;
  }
  return {};
}

/// Per-slot coefficients c_k multiplying p_k in the residual off-diagonal.
inline std::vector<complex> residual_coefficients(const MachineSpec& spec) {
  std::vector<complex> c(static_cast<std::size_t>(spec.m));
  const int shift = spec.kind == MachineKind::supplementary ? 0 : 1;
  for (int k = 1; k <= spec.m; ++k) {
    const auto idx = static_cast<std::size_t>(k - 1);
    const real s = std::sqrt(spec.r[0][idx] * spec.r[1][idx]);
    c[idx] = s * std::pow(spec.alpha, k + shift);
  }
  return c;
}

/// |z| of the premise: |beta| for joint/supplementary, 1 for ncm.
inline real dominance_bound(const MachineSpec& spec) {
  return spec.kind == MachineKind::ncm ? 1.0 : std::abs(spec.beta);
}

/// sum_k sqrt(r_k^(1) r_k^(2)) |alpha|^k
inline real dominance_sum(const MachineSpec& spec) {
  real d = 0.0;
  const real a = std::abs(spec.alpha);
  for (int k = 1; k <= spec.m; ++k) {
    const auto idx = static_cast<std::size_t>(k - 1);
    d += std::sqrt(spec.r[0][idx] * spec.r[1][idx]) * std::pow(a, k);
  }
  return d;
}

/// Probe overlaps minimizing |z - sum_k c_k p_k| over |p_k| <= 1: every c_k p_k
/// is phase-aligned with z, at unit modulus when sum_k |c_k| <= |z| and scaled
/// down uniformly to cancel z exactly otherwise. Slots with c_k = 0 get 1.
inline std::vector<complex> optimal_probe_overlaps(const MachineSpec& spec) {
  const complex z = residual_target(spec);
  const auto c = residual_coefficients(spec);
  real total = 0.0;
  for (const auto& ck : c) total += std::abs(ck);
  const real za = std::abs(z);
  const real scale = total <= za ? 1.0 : za / total;
  const real zphase = za > 0.0 ? std::arg(z) : 0.0;
  std::vector<complex> p(c.size(), complex{1.0, 0.0});
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (std::abs(c[k]) == 0.0) continue;
    p[k] = std::polar(scale, zphase - std::arg(c[k]));
  }
  return p;
}

/// Z - sum_k sqrt(Gamma_k) G_k sqrt(Gamma_k)^dagger for the spec's kind.
/// Uses spec.p, which must be present.
inline CMatrix residual_gram(const MachineSpec& spec) {
  if (!spec.p) throw ValidationError("residual_gram: probe overlaps p are missing");
  if (spec.p->size() != static_cast<std::size_t>(spec.m))
    throw ValidationError("residual_gram: p must have m entries");
  const auto c = residual_coefficients(spec);
  complex off = residual_target(spec);
  for (std::size_t k = 0; k < c.size(); ++k) off -= c[k] * (*spec.p)[k];
  CMatrix h(2, 2);
  h(0, 0) = 1.0 - spec.total(0);
  h(1, 1) = 1.0 - spec.total(1);
  h(0, 1) = off;
  h(1, 0) = std::conj(off);
  return h;
}

struct ReducedInequality {
  real lhs = 0.0;
  real rhs = 0.0;
  bool holds = false;
};

/// Whether the dominance premise |z| > sum_k sqrt(r r) |alpha|^k holds, under
/// which the determinant condition with optimal p reduces to lhs >= rhs.
inline bool reduced_applicable(const MachineSpec& spec) {
  return dominance_bound(spec) > dominance_sum(spec);
}

/// lhs = sqrt((1 - sum r^(1))(1 - sum r^(2))), rhs = |z| - sum_k |c_k|.
/// Throws if the dominance premise fails.
inline ReducedInequality reduced_inequality(const MachineSpec& raw,
                                            real tol = default_tolerance) {
  const MachineSpec spec = validated(raw, tol);
  if (!reduced_applicable(spec))
    throw ValidationError("reduced_inequality: dominance premise does not hold");
  ReducedInequality out;
  out.lhs = std::sqrt(std::max(0.0, 1.0 - spec.total(0)) * std::max(0.0, 1.0 - spec.total(1)));
  real rhs = std::abs(residual_target(spec));
  for (const auto& ck : residual_coefficients(spec)) rhs -= std::abs(ck);
  out.rhs = rhs;
  out.holds = out.lhs >= out.rhs - tol;
  return out;
}

struct FeasibilityReport {
  CMatrix residual;
  real det = 0.0;
  /// sqrt(H00 H11) - |H01| of the residual; nonnegative iff feasible. Equals
  /// lhs - rhs of the reduced inequality when that applies and p is optimal.
  real slack = 0.0;
  bool feasible = false;
  bool reduced_applicable = false;
  bool p_optimal = false;
  std::vector<complex> p_used;
};

/// Determinant test of the residual Gram matrix. Missing p is replaced by
/// optimal_probe_overlaps.
inline FeasibilityReport feasible(const MachineSpec& raw, real tol = default_tolerance) {
  MachineSpec spec = validated(raw, tol);
  FeasibilityReport rep;
  rep.p_optimal = !spec.p.has_value();
  if (!spec.p) spec.p = optimal_probe_overlaps(spec);
  rep.p_used = *spec.p;
  rep.residual = residual_gram(spec);
  const auto verdict = psd2_check(rep.residual, tol);
  rep.det = verdict.det;
  rep.feasible = verdict.psd;
  rep.slack = std::sqrt(std::max(0.0, rep.residual(0, 0).real()) *
                        std::max(0.0, rep.residual(1, 1).real())) -
              std::abs(rep.residual(0, 1));
  rep.reduced_applicable = reduced_applicable(spec);
  return rep;
}

}  // namespace clonekit
