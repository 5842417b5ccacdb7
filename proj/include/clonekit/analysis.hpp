#pragma once

// Closed-form bounds, success-probability optimization over the feasible
// region, a brute-force grid oracle for the optimizer, and the universal
// copying machine distance checkpoint.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "clonekit/core.hpp"
#include "clonekit/machine.hpp"
#include "clonekit/qlinalg.hpp"

namespace clonekit {

inline real duan_guo_bound(real alpha_abs) {
  if (!(alpha_abs >= 0.0) || alpha_abs >= 1.0)
    throw ValidationError("duan_guo_bound: |alpha| must lie in [0, 1)");
  return 1.0 / (1.0 + alpha_abs);
}

/// (1 - |alpha beta|) / (1 - |alpha|^m |p_m|), the bound on the average
/// success of a single-slot machine at depth m; p_m = 0 gives 1 - |alpha beta|.
inline real discrimination_bound(real alpha_abs, real beta_abs, int m, real p_m_abs,
                                 real tol = default_tolerance) {
  if (alpha_abs < 0.0 || alpha_abs > 1.0 || beta_abs < 0.0 || beta_abs > 1.0 ||
      p_m_abs < 0.0 || p_m_abs > 1.0)
    throw ValidationError("discrimination_bound: moduli must lie in [0, 1]");
  if (m < 1) throw ValidationError("discrimination_bound: m must be >= 1");
  const real denom = 1.0 - std::pow(alpha_abs, m) * p_m_abs;
  if (denom <= tol) throw NumericalError("discrimination_bound: degenerate denominator");
  return (1.0 - alpha_abs * beta_abs) / denom;
}

struct OptimizationProblem {
  MachineKind kind = MachineKind::joint;
  complex alpha{0.0, 0.0};
  complex beta{1.0, 0.0};
  int m = 1;
  std::array<real, 2> priors{0.5, 0.5};
  /// Constrain r^(1) = r^(2).
  bool symmetric = true;
  /// Restrict all success weight to this slot (1-based).
  std::optional<int> single_slot;
  /// Use these probe overlaps instead of the optimal ones.
  std::optional<std::vector<complex>> fixed_p;
};

struct OptimizationResult {
  std::array<std::vector<real>, 2> r_star;
  std::vector<complex> p_star;
  real value = 0.0;
  std::optional<real> oracle_value;
  std::vector<std::string> method_trace;
};

namespace detail {

inline void validate_problem(const OptimizationProblem& prob, real tol) {
  if (prob.m < 1) throw ValidationError("optimize: m must be >= 1");
  if (prob.priors[0] < 0.0 || prob.priors[1] < 0.0 ||
      std::abs(prob.priors[0] + prob.priors[1] - 1.0) > tol)
    throw ValidationError("optimize: priors must be nonnegative and sum to 1");
  if (prob.single_slot && (*prob.single_slot < 1 || *prob.single_slot > prob.m))
    throw ValidationError("optimize: single_slot out of range");
  if (prob.fixed_p && prob.fixed_p->size() != static_cast<std::size_t>(prob.m))
    throw ValidationError("optimize: fixed_p must have m entries");
}

// Maps the free variables of a problem to a full 2 x m probability table.
// Symmetric problems have one variable per active slot, asymmetric ones two.
class SearchSpace {
 public:
  explicit SearchSpace(const OptimizationProblem& prob) : prob_(prob) {
    if (prob.single_slot) {
      slots_.push_back(*prob.single_slot - 1);
    } else {
      for (int k = 0; k < prob.m; ++k) slots_.push_back(k);
    }
  }

  std::size_t size() const { return prob_.symmetric ? slots_.size() : 2 * slots_.size(); }

  MachineSpec spec_at(const std::vector<real>& x) const {
    MachineSpec s;
    s.kind = prob_.kind;
    s.alpha = prob_.alpha;
    s.beta = prob_.beta;
    s.m = prob_.m;
    s.r = {std::vector<real>(static_cast<std::size_t>(prob_.m), 0.0),
           std::vector<real>(static_cast<std::size_t>(prob_.m), 0.0)};
    for (std::size_t j = 0; j < slots_.size(); ++j) {
      const auto k = static_cast<std::size_t>(slots_[j]);
      if (prob_.symmetric) {
        s.r[0][k] = s.r[1][k] = x[j];
      } else {
        s.r[0][k] = x[j];
        s.r[1][k] = x[slots_.size() + j];
      }
    }
    s.p = prob_.fixed_p;
    return s;
  }

  // Row the variable belongs to (both rows for symmetric problems).
  bool in_row(std::size_t var, int row) const {
    if (prob_.symmetric) return true;
    return (var < slots_.size()) == (row == 0);
  }

  real row_sum(const std::vector<real>& x, int row) const {
    real s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (in_row(j, row)) s += x[j];
    return s;
  }

  // Largest value variable j may take given the others, from the row sums.
  real cap(const std::vector<real>& x, std::size_t j) const {
    real c = 1.0;
    for (int row = 0; row < 2; ++row)
      if (in_row(j, row)) c = std::min(c, 1.0 - (row_sum(x, row) - x[j]));
    return std::max(0.0, c);
  }

  bool admissible(const std::vector<real>& x) const {
    for (int row = 0; row < 2; ++row)
      if (row_sum(x, row) > 1.0) return false;
    MachineSpec s = spec_at(x);
    s.r[0] = clamp_row(s.r[0]);
    s.r[1] = clamp_row(s.r[1]);
    // Zero tolerance keeps the search on the inside of the boundary; the
    // result is then re-checked at the caller's tolerance.
    return feasible(s, 0.0).feasible;
  }

  real value(const std::vector<real>& x) const {
    const MachineSpec s = spec_at(x);
    return prob_.priors[0] * s.total(0) + prob_.priors[1] * s.total(1);
  }

 private:
  static std::vector<real> clamp_row(std::vector<real> row) {
    for (real& v : row) v = std::clamp(v, 0.0, 1.0);
    return row;
  }

  const OptimizationProblem& prob_;
  std::vector<int> slots_;
};

// Raises variable j to the feasibility boundary (others fixed). Feasibility
// is monotone along each coordinate, so bisection applies.
inline void raise_to_boundary(const SearchSpace& space, std::vector<real>& x, std::size_t j) {
  real lo = x[j];
  real hi = space.cap(x, j);
  if (hi <= lo) return;
  std::vector<real> y = x;
  y[j] = hi;
  if (space.admissible(y)) {
    x[j] = hi;
    return;
  }
  for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
    y[j] = 0.5 * (lo + hi);
    if (space.admissible(y)) {
      lo = y[j];
    } else {
      hi = y[j];
    }
  }
  x[j] = lo;
}

inline void coordinate_sweep(const SearchSpace& space, std::vector<real>& x,
                             const std::vector<std::size_t>& order) {
  for (std::size_t j : order) raise_to_boundary(space, x, j);
}

// Coordinate ascent followed by pairwise trade moves (lower one variable by
// delta, push another to the boundary), with delta halved when no trade
// improves the objective.
inline std::vector<real> ascend(const SearchSpace& space, std::vector<real> x,
                                const std::vector<std::size_t>& order) {
  coordinate_sweep(space, x, order);
  real best = space.value(x);
  int rounds = 0;
  for (real delta = 0.25; delta > 1e-12 && rounds < 10000; ++rounds) {
    bool improved = false;
    for (std::size_t a : order)
      for (std::size_t b : order) {
        if (a == b || x[b] <= 0.0) continue;
        std::vector<real> y = x;
        y[b] = std::max(0.0, y[b] - delta);
        raise_to_boundary(space, y, a);
        coordinate_sweep(space, y, order);
        const real v = space.value(y);
        if (v > best + 1e-15) {
          x = std::move(y);
          best = v;
          improved = true;
        }
      }
    if (!improved) delta *= 0.5;
  }
  return x;
}

}  // namespace detail

/// Maximizes sum_i prior_i sum_k r_k^(i) over feasible machines.
///
/// Symmetric problems: with optimal probe overlaps the constraint reads
/// 1 - s >= max(0, |z| - sum_k r_k g_k) with g_k nonincreasing in k, so moving
/// weight to the lowest active slot never hurts; each slot is solved as a
/// scalar boundary equation by bisection and the best is kept, then refined
/// by a pattern search (which matters only with fixed probe overlaps).
/// Asymmetric problems: coordinate ascent with boundary bisection plus
/// pairwise trades, from three fixed starts.
inline OptimizationResult optimize(const OptimizationProblem& prob,
                                   real tol = default_tolerance) {
  detail::validate_problem(prob, tol);
  const detail::SearchSpace space(prob);
  const std::size_t n = space.size();
  OptimizationResult res;

  std::vector<std::size_t> natural(n), reversed(n);
  for (std::size_t j = 0; j < n; ++j) natural[j] = reversed[n - 1 - j] = j;

  std::vector<real> best(n, 0.0);
  real best_value = 0.0;
  auto consider = [&](const std::vector<real>& x, const std::string& label) {
    const real v = space.value(x);
    res.method_trace.push_back(label + ": " + std::to_string(v));
    if (v > best_value + 1e-15) {
      best = x;
      best_value = v;
    }
  };

  if (prob.symmetric) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<real> x(n, 0.0);
      detail::raise_to_boundary(space, x, j);
      consider(x, "scalar boundary, variable " + std::to_string(j));
    }
    if (n > 1) consider(detail::ascend(space, best, natural), "pattern refinement");
  } else {
    OptimizationProblem sym = prob;
    sym.symmetric = true;
    const auto sym_result = optimize(sym, tol);
    std::vector<real> from_sym(n, 0.0);
    // Lift the symmetric optimum into the asymmetric variables.
    for (std::size_t j = 0; j < n / 2; ++j) {
      const int k = prob.single_slot ? *prob.single_slot - 1 : static_cast<int>(j);
      from_sym[j] = sym_result.r_star[0][static_cast<std::size_t>(k)];
      from_sym[n / 2 + j] = sym_result.r_star[1][static_cast<std::size_t>(k)];
    }
    consider(detail::ascend(space, std::vector<real>(n, 0.0), natural), "seed 1 (zero, natural)");
    consider(detail::ascend(space, std::vector<real>(n, 0.0), reversed),
             "seed 2 (zero, reversed)");
    consider(detail::ascend(space, from_sym, natural), "seed 3 (symmetric optimum)");
  }

  const MachineSpec spec = space.spec_at(best);
  const auto report = feasible(spec, tol);
  if (!report.feasible) throw NumericalError("optimize: optimum failed the feasibility check");
  res.r_star = spec.r;
  res.p_star = report.p_used;
  res.value = best_value;
  return res;
}

/// Exhaustive grid search (step `resolution`) over the problem's free
/// variables; returns the best feasible objective found.
inline real grid_oracle(const OptimizationProblem& prob, real resolution,
                        real tol = default_tolerance) {
  detail::validate_problem(prob, tol);
  if (!(resolution > 0.0) || resolution > 1.0)
    throw ValidationError("grid_oracle: resolution must lie in (0, 1]");
  const detail::SearchSpace space(prob);
  const std::size_t n = space.size();
  const auto steps = static_cast<std::size_t>(std::floor(1.0 / resolution + 1e-9)) + 1;
  const real budget = std::pow(static_cast<real>(steps), static_cast<real>(n));
  if (budget > 1e7) throw ValidationError("grid_oracle: grid exceeds 1e7 points");

  std::vector<std::size_t> idx(n, 0);
  std::vector<real> x(n, 0.0);
  real best = 0.0;
  while (true) {
    for (std::size_t j = 0; j < n; ++j)
      x[j] = std::min(1.0, static_cast<real>(idx[j]) * resolution);
    if (space.row_sum(x, 0) <= 1.0 + tol && space.row_sum(x, 1) <= 1.0 + tol) {
      const real v = space.value(x);
      if (v > best && space.admissible(x)) best = v;
    }
    std::size_t j = 0;
    while (j < n && ++idx[j] == steps) idx[j++] = 0;
    if (j == n) break;
  }
  return best;
}

struct Advantage {
  real joint_opt = 0.0;
  real ncm_opt = 0.0;
  real delta = 0.0;
};

/// Optimal joint success minus optimal ncm success for the same originals.
/// Equal priors use the symmetric problem (the feasible region is convex and
/// invariant under swapping the inputs).
inline Advantage ncmsi_advantage(complex alpha, complex beta, int m, std::array<real, 2> priors,
                                 real tol = default_tolerance) {
  OptimizationProblem joint;
  joint.kind = MachineKind::joint;
  joint.alpha = alpha;
  joint.beta = beta;
  joint.m = m;
  joint.priors = priors;
  joint.symmetric = std::abs(priors[0] - priors[1]) <= tol;
  OptimizationProblem ncm = joint;
  ncm.kind = MachineKind::ncm;
  ncm.beta = 1.0;
  Advantage out;
  out.joint_opt = optimize(joint, tol).value;
  out.ncm_opt = optimize(ncm, tol).value;
  out.delta = out.joint_opt - out.ncm_opt;
  return out;
}

struct ConvergencePoint {
  int m = 1;
  /// Best symmetric success of a slot-m machine whose success probe states
  /// are orthogonal (p_m = 0), i.e. an unambiguous discriminator.
  real optimum = 0.0;
  /// Same slot-m machine with optimal probe overlaps.
  real cloning_optimum = 0.0;
};

inline std::vector<ConvergencePoint> discrimination_convergence(real alpha_abs, real beta_abs,
                                                                int m_max,
                                                                real tol = default_tolerance) {
  if (!(alpha_abs > 0.0 && alpha_abs < 1.0) || !(beta_abs > 0.0 && beta_abs <= 1.0))
    throw ValidationError("discrimination_convergence: need 0 < |alpha| < 1, 0 < |beta| <= 1");
  if (m_max < 1) throw ValidationError("discrimination_convergence: m_max must be >= 1");
  std::vector<ConvergencePoint> out;
  for (int m = 1; m <= m_max; ++m) {
    OptimizationProblem prob;
    prob.kind = MachineKind::joint;
    prob.alpha = alpha_abs;
    prob.beta = beta_abs;
    prob.m = m;
    prob.single_slot = m;
    ConvergencePoint pt;
    pt.m = m;
    pt.cloning_optimum = optimize(prob, tol).value;
    prob.fixed_p = std::vector<complex>(static_cast<std::size_t>(m), complex{0.0, 0.0});
    pt.optimum = optimize(prob, tol).value;
    out.push_back(pt);
  }
  return out;
}

/// Tr[(rho_a^out - |s><s|)^2] for the universal copying machine acting on
/// |s> = a|0> + b|1>. Systems are ordered a, b, x with x in {up, down}.
inline real uqcm_distance(complex a, complex b, real tol = default_tolerance) {
  if (std::abs(std::norm(a) + std::norm(b) - 1.0) > tol)
    throw ValidationError("uqcm_distance: input state is not normalized");
  const CVector up{1.0, 0.0}, down{0.0, 1.0};
  const CVector k0{1.0, 0.0}, k1{0.0, 1.0};
  const real w2 = std::sqrt(2.0 / 3.0), w1 = std::sqrt(1.0 / 3.0), h = std::sqrt(0.5);
  const CVector plus = h * (tensor(k1, k0) + tensor(k0, k1));
  const CVector out0 = w2 * tensor(tensor(k0, k0), up) + w1 * tensor(plus, down);
  const CVector out1 = w2 * tensor(tensor(k1, k1), down) + w1 * tensor(plus, up);
  const CVector psi = a * out0 + b * out1;

  // rho_a(i, j) = sum_{b, x} psi[i, b, x] conj(psi[j, b, x])
  const std::array<complex, 2> s{a, b};
  real d = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      complex rho{};
      for (std::size_t rest = 0; rest < 4; ++rest) rho += psi[i * 4 + rest] * std::conj(psi[j * 4 + rest]);
      d += std::norm(rho - s[i] * std::conj(s[j]));
    }
  return d;
}

}  // namespace clonekit
