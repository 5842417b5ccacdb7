#pragma once

// Pure states and the fixed tensor-product layout shared by all machines.
//
// The full space is AB (m+1 qubits) tensor P (probe, dimension 2m+3); the AB
// factor is the major index. Probe basis index 0 is the ready state |P_0>,
// slot k (1..m) owns indices 2k-1 and 2k, failure owns 2m+1 and 2m+2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "clonekit/core.hpp"
#include "clonekit/qlinalg.hpp"

namespace clonekit {

enum class MachineKind { joint, ncm, supplementary };

inline const char* to_string(MachineKind kind) {
  switch (kind) {
    case MachineKind::joint: return "joint";
    case MachineKind::ncm: return "ncm";
    case MachineKind::supplementary: return "supplementary";
  }
  return "?";
}

inline MachineKind machine_kind_from_string(const std::string& s) {
  if (s == "joint") return MachineKind::joint;
  if (s == "ncm") return MachineKind::ncm;
  if (s == "supplementary" || s == "supp") return MachineKind::supplementary;
  throw ValidationError("unknown machine kind '" + s + "'");
}

class PureState {
 public:
  explicit PureState(CVector amplitudes, real tol = default_tolerance)
      : amplitudes_(std::move(amplitudes)) {
    if (std::abs(amplitudes_.norm() - 1.0) > tol)
      throw ValidationError("PureState: amplitudes are not normalized");
  }

  PureState(std::initializer_list<complex> amplitudes)
      : PureState(CVector(amplitudes)) {}

  /// Normalizes `v` first; throws on the zero vector.
  static PureState normalized(CVector v) {
    const real n = v.norm();
    if (n == 0.0) throw ValidationError("PureState: zero vector");
    v *= complex{1.0 / n, 0.0};
    return PureState(std::move(v));
  }

  /// cos(theta)|0> + e^{i phase} sin(theta)|1>
  static PureState qubit(real theta, real phase = 0.0) {
    return PureState({std::cos(theta), std::polar(std::sin(theta), phase)});
  }

  static PureState zero() { return PureState({1.0, 0.0}); }

  std::size_t dim() const noexcept { return amplitudes_.dim(); }
  const CVector& amplitudes() const noexcept { return amplitudes_; }

 private:
  CVector amplitudes_;
};

inline complex overlap(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) throw ValidationError("overlap: dimension mismatch");
  return inner(a.amplitudes(), b.amplitudes());
}

inline PureState tensor_power(const PureState& s, int n) {
  if (n < 1) throw ValidationError("tensor_power: exponent must be >= 1");
  CVector out = s.amplitudes();
  for (int i = 1; i < n; ++i) out = tensor(out, s.amplitudes());
  return PureState(std::move(out), 1e-12 * n + default_tolerance);
}

struct SpaceLayout {
  int m = 1;

  explicit SpaceLayout(int copy_depth) : m(copy_depth) {
    if (m < 1) throw ValidationError("SpaceLayout: copy depth m must be >= 1");
    if (m > 24) throw ValidationError("SpaceLayout: copy depth too large");
  }

  std::size_t ab_dim() const { return std::size_t{1} << (m + 1); }
  std::size_t probe_dim() const { return static_cast<std::size_t>(2 * m + 3); }
  std::size_t total_dim() const { return ab_dim() * probe_dim(); }

  /// Probe index of |P_0>.
  static constexpr std::size_t ready_index() { return 0; }

  /// First and second probe indices of slot k (1-based).
  std::pair<std::size_t, std::size_t> slot_indices(int k) const {
    require_slot(k);
    return {static_cast<std::size_t>(2 * k - 1), static_cast<std::size_t>(2 * k)};
  }

  std::pair<std::size_t, std::size_t> failure_indices() const {
    return {static_cast<std::size_t>(2 * m + 1), static_cast<std::size_t>(2 * m + 2)};
  }

  void require_slot(int k) const {
    if (k < 1 || k > m)
      throw ValidationError("slot " + std::to_string(k) + " out of range 1.." +
                            std::to_string(m));
  }
};

/// Probe state for slot k of input i (0 or 1). Input 0 gets the first slot
/// basis vector; input 1 gets p|first> + sqrt(1-|p|^2)|second>, so that
/// <P_k^(1)|P_k^(2)> = p.
inline CVector slot_probe(const SpaceLayout& layout, int k, int input_index, complex p) {
  const auto [first, second] = layout.slot_indices(k);
  if (std::abs(p) > 1.0 + 1e-12) throw ValidationError("slot_probe: |p| > 1");
  CVector v(layout.probe_dim());
  if (input_index == 0) {
    v[first] = 1.0;
  } else if (input_index == 1) {
    v[first] = p;
    v[second] = std::sqrt(std::max(0.0, 1.0 - std::norm(p)));
  } else {
    throw ValidationError("slot_probe: input index must be 0 or 1");
  }
  return v;
}

namespace detail {

inline CVector blank_qubits(const CVector& head, int blanks) {
  CVector out = head;
  const CVector zero = PureState::zero().amplitudes();
  for (int i = 0; i < blanks; ++i) out = tensor(out, zero);
  return out;
}

inline void require_qubit(const PureState& s, const char* who) {
  if (s.dim() != 2) throw ValidationError(std::string(who) + ": expected a qubit state");
}

}  // namespace detail

/// Input vector of the machine: psi phi |0>^(m-1) |P_0> (joint),
/// psi |0>^m |P_0> (ncm) or phi |0>^m |P_0> (supplementary).
inline CVector embed_input(MachineKind kind, const PureState& psi, const PureState& phi,
                           const SpaceLayout& layout) {
  detail::require_qubit(psi, "embed_input");
  detail::require_qubit(phi, "embed_input");
  CVector ab;
  switch (kind) {
    case MachineKind::joint:
      ab = detail::blank_qubits(tensor(psi.amplitudes(), phi.amplitudes()), layout.m - 1);
      break;
    case MachineKind::ncm:
      ab = detail::blank_qubits(psi.amplitudes(), layout.m);
      break;
    case MachineKind::supplementary:
      ab = detail::blank_qubits(phi.amplitudes(), layout.m);
      break;
  }
  return tensor(ab, CVector::basis(layout.probe_dim(), SpaceLayout::ready_index()));
}

/// Number of copies of psi produced in slot k.
inline int copies_in_slot(MachineKind kind, int k) {
  return kind == MachineKind::supplementary ? k : k + 1;
}

/// AB part of the success branch of slot k: psi^(copies) |0>^(m+1-copies).
inline CVector slot_ab_state(MachineKind kind, const PureState& psi, int k,
                             const SpaceLayout& layout) {
  detail::require_qubit(psi, "slot_ab_state");
  layout.require_slot(k);
  const int copies = copies_in_slot(kind, k);
  return detail::blank_qubits(tensor_power(psi, copies).amplitudes(), layout.m + 1 - copies);
}

/// Normalized success-branch vector of slot k for input `input_index`.
/// `probe` must be a unit vector supported on slot k's probe indices.
inline CVector target_output(MachineKind kind, const PureState& psi, int input_index, int k,
                             const SpaceLayout& layout, const CVector& probe,
                             real tol = default_tolerance) {
  if (input_index != 0 && input_index != 1)
    throw ValidationError("target_output: input index must be 0 or 1");
  layout.require_slot(k);
  if (probe.dim() != layout.probe_dim())
    throw ValidationError("target_output: probe dimension mismatch");
  const auto [first, second] = layout.slot_indices(k);
  for (std::size_t j = 0; j < probe.dim(); ++j)
    if (j != first && j != second && std::abs(probe[j]) > tol)
      throw ValidationError("target_output: probe vector leaves slot " + std::to_string(k));
  if (std::abs(probe.norm() - 1.0) > tol)
    throw ValidationError("target_output: probe vector is not normalized");
  return tensor(slot_ab_state(kind, psi, k, layout), probe);
}

}  // namespace clonekit
