#pragma once

// Two-step protocols: a supplementary machine run on phi followed, on
// failure, by an ncm machine run on psi. decompose_two_step turns a joint
// machine into such a pair with at least the same success; compose goes the
// other way.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "clonekit/core.hpp"
#include "clonekit/machine.hpp"

namespace clonekit {

enum class CaseTag { case1, case2_I, case2_II };

inline const char* to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::case1: return "case1";
    case CaseTag::case2_I: return "case2_I";
    case CaseTag::case2_II: return "case2_II";
  }
  return "?";
}

struct TwoStepPlan {
  MachineSpec supp;
  MachineSpec ncm;
  std::array<real, 2> composed_success{0.0, 0.0};
  CaseTag case_tag = CaseTag::case1;
  /// Scale factor of the supplementary probabilities along the ray t * r;
  /// 1 outside case2_II.
  real root_t = 1.0;
};

/// sqrt((1 - sum x)(1 - sum y)) / (|beta| - sum_k sqrt(x_k y_k) |alpha|^k)
inline real f_value(std::span<const real> x, std::span<const real> y, real alpha_abs,
                    real beta_abs) {
  if (x.size() != y.size() || x.empty())
    throw ValidationError("f_value: x and y must have the same nonzero length");
  real sx = 0.0, sy = 0.0, denom = beta_abs;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] < 0.0 || x[k] > 1.0 || y[k] < 0.0 || y[k] > 1.0)
      throw ValidationError("f_value: arguments must lie in [0, 1]");
    sx += x[k];
    sy += y[k];
    denom -= std::sqrt(x[k] * y[k]) * std::pow(alpha_abs, static_cast<int>(k) + 1);
  }
  if (sx > 1.0 + default_tolerance || sy > 1.0 + default_tolerance)
    throw ValidationError("f_value: arguments sum above 1");
  if (denom <= 0.0) throw NumericalError("f_value: nonpositive denominator");
  return std::sqrt(std::max(0.0, 1.0 - sx) * std::max(0.0, 1.0 - sy)) / denom;
}

/// F restricted to the ray x = t r^(1), y = t r^(2) through a joint spec.
/// coupling[k] = r_k^(2) / r_k^(1) (0 when r_k^(1) = 0) records the fixed
/// ratio between the two rows along the ray.
struct HFunction {
  MachineSpec base;
  std::vector<real> coupling;

  explicit HFunction(MachineSpec joint) : base(std::move(joint)) {
    if (base.kind != MachineKind::joint) throw ValidationError("HFunction: joint spec required");
    coupling.resize(static_cast<std::size_t>(base.m));
    for (std::size_t k = 0; k < coupling.size(); ++k)
      coupling[k] = base.r[0][k] > 0.0 ? base.r[1][k] / base.r[0][k] : 0.0;
  }
};

inline real h_value(const HFunction& h, real t) {
  if (t < 0.0 || t > 1.0) throw ValidationError("h_value: t must lie in [0, 1]");
  std::vector<real> x(h.base.r[0].size()), y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = t * h.base.r[0][k];
    y[k] = t * h.base.r[1][k];
  }
  return f_value(x, y, std::abs(h.base.alpha), std::abs(h.base.beta));
}

namespace detail {

inline std::array<real, 2> composed(const MachineSpec& supp, const MachineSpec& ncm) {
  std::array<real, 2> out{};
  for (int i = 0; i < 2; ++i) {
    const real sb = supp.total(i);
    out[static_cast<std::size_t>(i)] = sb + (1.0 - sb) * ncm.total(i);
  }
  return out;
}

inline MachineSpec member_spec(MachineKind kind, const MachineSpec& joint) {
  MachineSpec s;
  s.kind = kind;
  s.alpha = joint.alpha;
  s.beta = kind == MachineKind::ncm ? complex{1.0, 0.0} : joint.beta;
  s.m = joint.m;
  s.r = {std::vector<real>(static_cast<std::size_t>(joint.m), 0.0),
         std::vector<real>(static_cast<std::size_t>(joint.m), 0.0)};
  return s;
}

}  // namespace detail

/// Constructive decomposition of a feasible joint machine into a
/// supplementary machine and an ncm machine whose two-step composition
/// succeeds at least as often on each input.
///
///   case1     |beta| <= sum_k sqrt(r r)|alpha|^k: the supplementary machine
///             alone succeeds with certainty (deficit added to slot 1).
///   case2_I   F(r) >= 1: the supplementary machine reproduces r on its own.
///   case2_II  bisect t in [0,1] for F(t r) = 1, give t r to the supplementary
///             machine and the remainder, renormalized, to the ncm machine.
inline TwoStepPlan decompose_two_step(const MachineSpec& raw, real tol = default_tolerance) {
  const MachineSpec joint = validated(raw, tol);
  if (joint.kind != MachineKind::joint)
    throw ValidationError("decompose_two_step: joint spec required");
  if (!feasible(joint, tol).feasible)
    throw InfeasibleError("decompose_two_step: joint machine is infeasible");

  TwoStepPlan plan;
  plan.supp = detail::member_spec(MachineKind::supplementary, joint);
  plan.ncm = detail::member_spec(MachineKind::ncm, joint);
  const std::size_t m = static_cast<std::size_t>(joint.m);

  if (std::abs(joint.beta) <= dominance_sum(joint) + tol) {
    plan.case_tag = CaseTag::case1;
    for (std::size_t i = 0; i < 2; ++i) {
      plan.supp.r[i] = joint.r[i];
      // Any r_B >= r with unit sum works; slot 1 can always absorb the deficit.
      plan.supp.r[i][0] += std::max(0.0, 1.0 - joint.total(static_cast<int>(i)));
      plan.supp.r[i][0] = std::min(plan.supp.r[i][0], 1.0);
    }
  } else {
    const HFunction h(joint);
    const real h_end = h_value(h, 1.0);
    if (h_end >= 1.0) {
      plan.case_tag = CaseTag::case2_I;
      plan.supp.r = joint.r;
    } else {
      plan.case_tag = CaseTag::case2_II;
      // Invariant: h(lo) >= 1 > h(hi). h(0) = 1/|beta| >= 1.
      real lo = 0.0, hi = 1.0;
      if (h_value(h, lo) < 1.0)
        throw NumericalError("decompose_two_step: no sign change for H - 1 on [0, 1]");
      for (int it = 0; it < 200; ++it) {
        const real mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (h_value(h, mid) >= 1.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      if (hi - lo > tol) throw NumericalError("decompose_two_step: bisection did not converge");
      plan.root_t = lo;
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < m; ++k) plan.supp.r[i][k] = lo * joint.r[i][k];
        const real rest = 1.0 - plan.supp.total(static_cast<int>(i));
        for (std::size_t k = 0; k < m; ++k)
          plan.ncm.r[i][k] = rest > 0.0 ? (joint.r[i][k] - plan.supp.r[i][k]) / rest : 0.0;
      }
    }
  }

  plan.composed_success = detail::composed(plan.supp, plan.ncm);
  if (!feasible(plan.supp, tol).feasible || !feasible(plan.ncm, tol).feasible)
    throw NumericalError("decompose_two_step: constructed member machine is infeasible");
  return plan;
}

/// Joint machine that runs `supp` and, on failure, `ncm`:
/// r_k^(i) = r_{k,B}^(i) + (1 - sum_l r_{l,B}^(i)) r_{k,A}^(i), with optimal p.
/// The result is checked for feasibility.
inline MachineSpec compose(const MachineSpec& supp_raw, const MachineSpec& ncm_raw,
                           real tol = default_tolerance) {
  const MachineSpec supp = validated(supp_raw, tol);
  const MachineSpec ncm = validated(ncm_raw, tol);
  if (supp.kind != MachineKind::supplementary || ncm.kind != MachineKind::ncm)
    throw ValidationError("compose: expected a supplementary and an ncm spec");
  if (supp.m != ncm.m) throw ValidationError("compose: copy depths differ");
  if (std::abs(supp.alpha - ncm.alpha) > tol) throw ValidationError("compose: alpha differs");
  if (!feasible(supp, tol).feasible)
    throw InfeasibleError("compose: supplementary machine is infeasible");
  if (!feasible(ncm, tol).feasible) throw InfeasibleError("compose: ncm machine is infeasible");

  MachineSpec joint = detail::member_spec(MachineKind::joint, supp);
  for (std::size_t i = 0; i < 2; ++i) {
    const real sb = supp.total(static_cast<int>(i));
    for (std::size_t k = 0; k < joint.r[i].size(); ++k)
      joint.r[i][k] = supp.r[i][k] + (1.0 - sb) * ncm.r[i][k];
  }
  joint.p = optimal_probe_overlaps(joint);
  if (!feasible(joint, tol).feasible)
    throw NumericalError("compose: composed joint machine failed the feasibility check");
  return joint;
}

enum class Strategy { b_to_a, a_to_b, two_way };

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::b_to_a: return "b_to_a";
    case Strategy::a_to_b: return "a_to_b";
    case Strategy::two_way: return "two_way";
  }
  return "?";
}

/// Success of the two-step protocol per input, given the total success of the
/// ncm machine (A) and of the supplementary machine (B).
inline std::array<real, 2> strategy_success(std::array<real, 2> sum_ra,
                                            std::array<real, 2> sum_rb, Strategy strategy) {
  for (int i = 0; i < 2; ++i) {
    const auto a = sum_ra[static_cast<std::size_t>(i)];
    const auto b = sum_rb[static_cast<std::size_t>(i)];
    if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0))
      throw ValidationError("strategy_success: sums must lie in [0, 1]");
  }
  std::array<real, 2> out{};
  for (std::size_t i = 0; i < 2; ++i) {
    const real a = sum_ra[i], b = sum_rb[i];
    switch (strategy) {
      case Strategy::b_to_a: out[i] = b + (1.0 - b) * a; break;
      case Strategy::a_to_b: out[i] = a + (1.0 - a) * b; break;
      case Strategy::two_way: out[i] = 1.0 - (1.0 - a) * (1.0 - b); break;
    }
  }
  return out;
}

}  // namespace clonekit
