#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "clonekit/synthesis.hpp"
#include "oracles.hpp"

using namespace clonekit;

namespace {

PureState from_oracle(const oracle::Vec& v) { return PureState(CVector(std::vector<complex>(v))); }

std::array<PureState, 2> pair_with_overlap(complex a) {
  const auto v = oracle::pair_with_overlap(a);
  return {from_oracle(v[0]), from_oracle(v[1])};
}

UnitaryRealization realize_canonical(const MachineSpec& s) {
  return realize(s, pair_with_overlap(s.alpha),
                 pair_with_overlap(s.kind == MachineKind::ncm ? complex(1.0) : s.beta));
}

const MachineSpec worked = MachineSpec::symmetric(MachineKind::joint, 0.5, 0.9, {0.5});

}  // namespace

TEST(Realize, OrthogonalStatesCloneExactly) {
  const auto s = MachineSpec::symmetric(MachineKind::joint, 0.0, 0.0, {1.0});
  const std::array<PureState, 2> basis{PureState({1.0, 0.0}), PureState({0.0, 1.0})};
  const auto rz = realize(s, basis, basis);
  EXPECT_LT(unitarity_defect(rz.matrix), 1e-12);
  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const CVector two = tensor(basis[ii].amplitudes(), basis[ii].amplitudes());
    const CVector expected = tensor(two, CVector::basis(rz.layout.probe_dim(), 1));
    EXPECT_LT(max_abs_diff(rz.matrix * rz.inputs[ii], expected), 1e-12);
  }
}

TEST(Realize, WorkedInstance) {
  const auto rz = realize_canonical(worked);
  EXPECT_LT(unitarity_defect(rz.matrix), 1e-10);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_LT(max_abs_diff(rz.matrix * rz.inputs[i], rz.outputs[i]), 1e-10);
    const real f = std::norm(rz.failure_amplitudes(i, 0)) + std::norm(rz.failure_amplitudes(i, 1));
    EXPECT_NEAR(f, 0.5, 1e-12);
  }
}

TEST(Realize, NcmAtDuanGuoBoundary) {
  const real a = 0.5;
  const auto s = MachineSpec::symmetric(MachineKind::ncm, a, 1.0, {1.0 / (1.0 + a)});
  const auto rep = feasible(s);
  EXPECT_NEAR(rep.det, 0.0, 1e-12);
  const auto rz = realize_canonical(s);
  EXPECT_NEAR(std::abs(rz.failure_amplitudes(1, 1)), 0.0, 1e-7);
  EXPECT_LT(unitarity_defect(rz.matrix), 1e-10);
}

TEST(Realize, Errors) {
  const auto psi = pair_with_overlap(0.5), phi = pair_with_overlap(0.9);
  EXPECT_THROW(realize(worked, psi, pair_with_overlap(0.8)), ValidationError);
  EXPECT_THROW(realize(worked, pair_with_overlap(0.4), phi), ValidationError);
  EXPECT_THROW(realize(MachineSpec::symmetric(MachineKind::joint, 0.5, 0.9, {0.9}), psi, phi),
               InfeasibleError);
  EXPECT_THROW(realize(worked, psi, phi, default_tolerance, 0), ValidationError);
}

TEST(ExactStatistics, WorkedInstance) {
  const auto dist = exact_statistics(realize_canonical(worked));
  for (std::size_t i = 0; i < 2; ++i) {
    ASSERT_EQ(dist.slots[i].size(), 1u);
    EXPECT_NEAR(dist.slots[i][0].probability, 0.5, 1e-12);
    EXPECT_NEAR(dist.slots[i][0].copy_fidelity, 1.0, 1e-12);
    EXPECT_NEAR(dist.failure[i], 0.5, 1e-12);
  }
  EXPECT_NEAR(global_success(dist, {0.5, 0.5}), 0.5, 1e-12);
}

TEST(ExactStatistics, ZeroSuccess) {
  const auto dist =
      exact_statistics(realize_canonical(MachineSpec::symmetric(MachineKind::joint, 0.5, 0.9, {0.0})));
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(dist.failure[i], 1.0, 1e-12);
    EXPECT_TRUE(std::isnan(dist.slots[i][0].copy_fidelity));
  }
}

TEST(ExactStatistics, TwoSlots) {
  const auto dist = exact_statistics(
      realize_canonical(MachineSpec::symmetric(MachineKind::joint, 0.5, 0.9, {0.2, 0.3})));
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(dist.slots[i][0].probability, 0.2, 1e-12);
    EXPECT_NEAR(dist.slots[i][1].probability, 0.3, 1e-12);
    EXPECT_NEAR(dist.failure[i], 0.5, 1e-12);
  }
}

TEST(GlobalSuccess, Priors) {
  MachineSpec s = MachineSpec::symmetric(MachineKind::joint, 0.5, 0.9, {0.2, 0.1});
  s.r[1] = {0.1, 0.1};
  const auto dist = exact_statistics(realize_canonical(s));
  EXPECT_NEAR(global_success(dist, {1.0, 0.0}), 0.3, 1e-12);
  EXPECT_NEAR(global_success(dist, {0.0, 1.0}), 0.2, 1e-12);
  EXPECT_THROW(global_success(dist, {0.5, 0.6}), ValidationError);
}

TEST(Sample, WithinThreeSigma) {
  const auto rz = realize_canonical(worked);
  const std::uint64_t n = 10000;
  const auto counts = sample(rz, 0, n, 12345);
  ASSERT_EQ(counts.size(), 2u);
  EXPECT_EQ(counts[0] + counts[1], n);
  const real sigma = std::sqrt(n * 0.25);
  EXPECT_LT(std::abs(static_cast<real>(counts[0]) - 0.5 * n), 3.0 * sigma);
}

TEST(Sample, CertainOutcome) {
  const auto rz =
      realize_canonical(MachineSpec::symmetric(MachineKind::joint, 0.5, 0.9, {0.0}));
  const auto counts = sample(rz, 1, 1000, 1);
  EXPECT_EQ(counts[0], 0u);
  EXPECT_EQ(counts[1], 1000u);
}

TEST(Sample, DeterministicPerSeed) {
  const auto rz = realize_canonical(MachineSpec::symmetric(MachineKind::joint, 0.5, 0.9, {0.2, 0.3}));
  EXPECT_EQ(sample(rz, 0, 5000, 99), sample(rz, 0, 5000, 99));
  EXPECT_NE(sample(rz, 0, 5000, 99), sample(rz, 0, 5000, 100));
  EXPECT_THROW(sample(rz, 2, 10, 1), ValidationError);
  EXPECT_THROW(sample(rz, 0, 0, 1), ValidationError);
}

TEST(Synthesis, RandomFeasibleSpecs) {
  oracle::Rng rng(41);
  int done = 0;
  while (done < 200) {
    MachineSpec s;
    s.kind = static_cast<MachineKind>(rng.integer(0, 2));
    s.m = rng.integer(1, 3);
    const auto a1 = rng.unit_vector(2), a2 = rng.unit_vector(2);
    const auto b1 = rng.unit_vector(2), b2 = rng.unit_vector(2);
    s.alpha = oracle::dot(a1, a2);
    s.beta = s.kind == MachineKind::ncm ? complex(1.0) : oracle::dot(b1, b2);
    s.r = {rng.simplex(s.m, rng.uniform(0.0, 1.0)), rng.simplex(s.m, rng.uniform(0.0, 1.0))};
    while (!feasible(s).feasible)
      for (auto& row : s.r)
        for (auto& x : row) x *= 0.5;
    ++done;
    const std::array<PureState, 2> psi{from_oracle(a1), from_oracle(a2)};
    const std::array<PureState, 2> phi{from_oracle(b1), from_oracle(b2)};
    const auto rz = realize(s, psi, phi);
    EXPECT_LT(unitarity_defect(rz.matrix), 1e-10);
    const auto dist = exact_statistics(rz);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_LT(max_abs_diff(rz.matrix * rz.inputs[i], rz.outputs[i]), 1e-10);
      real total = 0.0;
      for (std::size_t k = 0; k < s.r[i].size(); ++k) {
        EXPECT_NEAR(dist.slots[i][k].probability, s.r[i][k], 1e-9);
        if (dist.slots[i][k].probability > 1e-6) {
          EXPECT_GT(dist.slots[i][k].copy_fidelity, 1.0 - 1e-9);
        }
        total += s.r[i][k];
      }
      EXPECT_NEAR(dist.failure[i], 1.0 - total, 1e-9);
      const real f = std::norm(rz.failure_amplitudes(i, 0)) + std::norm(rz.failure_amplitudes(i, 1));
      EXPECT_NEAR(f, 1.0 - total, 1e-9);
    }
  }
}

TEST(Synthesis, PhaseCovariance) {
  oracle::Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = MachineSpec::symmetric(MachineKind::joint, 0.5, 0.9, {0.2, 0.3});
    const auto psi = pair_with_overlap(0.5), phi = pair_with_overlap(0.9);
    const complex phase = std::polar(1.0, rng.uniform(0.0, 6.0));
    const PureState rotated(phase * psi[1].amplitudes());
    MachineSpec t = s;
    t.alpha = s.alpha * phase;
    const auto base = exact_statistics(realize(s, psi, phi));
    const auto rz = realize(t, {psi[0], rotated}, phi);
    const auto moved = exact_statistics(rz);
    EXPECT_GT(std::abs((*rz.spec.p)[0] - 1.0), 0.0);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t k = 0; k < 2; ++k)
        EXPECT_NEAR(moved.slots[i][k].probability, base.slots[i][k].probability, 1e-12);
      EXPECT_NEAR(moved.failure[i], base.failure[i], 1e-12);
    }
  }
}
