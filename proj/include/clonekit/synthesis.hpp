#pragma once

// Explicit unitaries for feasible machines, plus their measurement statistics.
//
// For input i the output is
//   sum_k sqrt(r_k^(i)) |slot_k AB state>|P_k^(i)> + sum_l a_il |0..0>|F_l>
// where F_1, F_2 are the two failure probe directions and a = conj(L) for the
// Cholesky factor L of the residual Gram matrix. The success part reproduces
// the success Gram matrix, the failure part the residual, so the outputs have
// the same Gram matrix as the inputs and the map extends to a unitary.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "clonekit/core.hpp"
#include "clonekit/machine.hpp"
#include "clonekit/qlinalg.hpp"
#include "clonekit/states.hpp"

namespace clonekit {

inline constexpr int default_max_copy_depth = 6;

struct UnitaryRealization {
  SpaceLayout layout{1};
  CMatrix matrix;
  std::array<CVector, 2> inputs;
  std::array<CVector, 2> outputs;
  /// Spec with the probe overlaps actually used filled in.
  MachineSpec spec;
  /// Cholesky factor L of the residual Gram matrix; the failure amplitudes of
  /// input i are conj(L(i, 0)), conj(L(i, 1)).
  CMatrix failure_amplitudes;
  /// States whose copies the machine produces.
  std::array<PureState, 2> psi{PureState::zero(), PureState::zero()};
};

struct SlotOutcome {
  real probability = 0.0;
  /// Fidelity of the post-selected AB state with the ideal copies; NaN when
  /// the outcome has (numerically) zero probability.
  real copy_fidelity = 0.0;
};

struct OutcomeDistribution {
  /// slots[i][k-1]
  std::array<std::vector<SlotOutcome>, 2> slots;
  std::array<real, 2> failure{0.0, 0.0};
};

/// Builds U for `spec` acting on the concrete states. For MachineKind::ncm the
/// phi pair is not used; for MachineKind::supplementary psi names the states
/// being copied and phi the inputs.
inline UnitaryRealization realize(const MachineSpec& raw, const std::array<PureState, 2>& psi,
                                  const std::array<PureState, 2>& phi,
                                  real tol = default_tolerance,
                                  int max_copy_depth = default_max_copy_depth) {
  MachineSpec spec = validated(raw, tol);
  if (spec.m > max_copy_depth)
    throw ValidationError("realize: m exceeds the configured copy-depth cap of " +
                          std::to_string(max_copy_depth));
  if (std::abs(overlap(psi[0], psi[1]) - spec.alpha) > tol)
    throw ValidationError("realize: <psi_1|psi_2> does not match alpha");
  if (spec.kind != MachineKind::ncm && std::abs(overlap(phi[0], phi[1]) - spec.beta) > tol)
    throw ValidationError("realize: <phi_1|phi_2> does not match beta");
  if (!spec.p) spec.p = optimal_probe_overlaps(spec);
  const auto report = feasible(spec, tol);
  if (!report.feasible) throw InfeasibleError("realize: machine is infeasible");

  UnitaryRealization rz;
  rz.layout = SpaceLayout(spec.m);
  rz.psi = psi;
  rz.failure_amplitudes = cholesky_psd2(report.residual, tol);
  const auto& layout = rz.layout;
  const auto [f1, f2] = layout.failure_indices();
  const CVector blank_ab = CVector::basis(layout.ab_dim(), 0);

  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    rz.inputs[ii] = embed_input(spec.kind, psi[ii], phi[ii], layout);
    CVector out(layout.total_dim());
    for (int k = 1; k <= spec.m; ++k) {
      const real rk = spec.r[ii][static_cast<std::size_t>(k - 1)];
      if (rk == 0.0) continue;
      const CVector probe = slot_probe(layout, k, i, (*spec.p)[static_cast<std::size_t>(k - 1)]);
      out += complex{std::sqrt(rk), 0.0} *
             target_output(spec.kind, psi[ii], i, k, layout, probe, tol);
    }
    const std::array<std::size_t, 2> fidx{f1, f2};
    for (std::size_t l = 0; l < 2; ++l) {
      const complex a = std::conj(rz.failure_amplitudes(ii, l));
      if (a == complex{}) continue;
      out += a * tensor(blank_ab, CVector::basis(layout.probe_dim(), fidx[l]));
    }
    rz.outputs[ii] = std::move(out);
  }

  // Identical inputs (up to phase) leave one independent direction to map.
  const bool dependent = std::abs(std::abs(inner(rz.inputs[0], rz.inputs[1])) - 1.0) <= tol;
  if (dependent) {
    const std::vector<CVector> in{rz.inputs[0]}, out{rz.outputs[0]};
    rz.matrix = extend_to_unitary(in, out, tol);
  } else {
    const std::vector<CVector> in{rz.inputs[0], rz.inputs[1]};
    const std::vector<CVector> out{rz.outputs[0], rz.outputs[1]};
    rz.matrix = extend_to_unitary(in, out, tol);
  }
  rz.spec = std::move(spec);
  return rz;
}

/// Applies the unitary to each input and measures the probe with projectors
/// onto the slot subspaces and onto their complement (failure). Outcomes with
/// probability at most tol^2 get a NaN fidelity.
inline OutcomeDistribution exact_statistics(const UnitaryRealization& rz,
                                            real tol = default_tolerance) {
  const auto& layout = rz.layout;
  const std::size_t pd = layout.probe_dim();
  const std::size_t ad = layout.ab_dim();
  OutcomeDistribution dist;
  for (std::size_t i = 0; i < 2; ++i) {
    const CVector v = rz.matrix * rz.inputs[i];
    real total_slots = 0.0;
    real total = 0.0;
    for (std::size_t x = 0; x < v.dim(); ++x) total += std::norm(v[x]);
    for (int k = 1; k <= layout.m; ++k) {
      const auto [first, second] = layout.slot_indices(k);
      const CVector ideal = slot_ab_state(rz.spec.kind, rz.psi[i], k, layout);
      real prob = 0.0;
      real captured = 0.0;
      for (std::size_t j : {first, second}) {
        complex amp{};
        for (std::size_t a = 0; a < ad; ++a) {
          const complex c = v[a * pd + j];
          prob += std::norm(c);
          amp += std::conj(ideal[a]) * c;
        }
        captured += std::norm(amp);
      }
      SlotOutcome o;
      o.probability = prob;
      o.copy_fidelity = prob > tol * tol ? captured / prob : std::numeric_limits<real>::quiet_NaN();
      dist.slots[i].push_back(o);
      total_slots += prob;
    }
    dist.failure[i] = std::max(0.0, total - total_slots);
  }
  return dist;
}

/// Seeded multinomial draw of n_shots outcomes for one input. counts[k-1] is
/// slot k, counts[m] is failure.
inline std::vector<std::uint64_t> sample(const UnitaryRealization& rz, int input_index,
                                         std::uint64_t n_shots, std::uint64_t seed) {
  if (input_index != 0 && input_index != 1)
    throw ValidationError("sample: input index must be 0 or 1");
  if (n_shots < 1) throw ValidationError("sample: n_shots must be >= 1");
  const auto dist = exact_statistics(rz);
  const auto ii = static_cast<std::size_t>(input_index);
  std::vector<real> weights;
  for (const auto& o : dist.slots[ii]) weights.push_back(o.probability);
  weights.push_back(dist.failure[ii]);

  // Sequential conditional binomials on raw mt19937_64 output; the draw does
  // not depend on the standard library's distribution implementations.
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> counts(weights.size(), 0);
  std::uint64_t remaining = n_shots;
  real mass_left = 0.0;
  for (real w : weights) mass_left += w;
  for (std::size_t b = 0; b + 1 < weights.size() && remaining > 0; ++b) {
    const real q = mass_left > 0.0 ? std::clamp(weights[b] / mass_left, 0.0, 1.0) : 0.0;
    std::uint64_t hits = 0;
    if (q >= 1.0) {
      hits = remaining;
    } else if (q > 0.0) {
      for (std::uint64_t s = 0; s < remaining; ++s) {
        const real u = static_cast<real>(rng() >> 11) * 0x1.0p-53;
        if (u < q) ++hits;
      }
    }
    counts[b] = hits;
    remaining -= hits;
    mass_left -= weights[b];
  }
  counts.back() += remaining;
  return counts;
}

/// sum_i prior_i * (total slot probability of input i)
inline real global_success(const OutcomeDistribution& dist, std::array<real, 2> priors,
                           real tol = default_tolerance) {
  if (priors[0] < 0.0 || priors[1] < 0.0 || std::abs(priors[0] + priors[1] - 1.0) > tol)
    throw ValidationError("global_success: priors must be nonnegative and sum to 1");
  real ps = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    real s = 0.0;
    for (const auto& o : dist.slots[i]) s += o.probability;
    ps += priors[i] * s;
  }
  return ps;
}

}  // namespace clonekit
