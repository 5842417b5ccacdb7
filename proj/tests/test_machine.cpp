#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "clonekit/machine.hpp"
#include "oracles.hpp"

using namespace clonekit;

namespace {

const real pi = std::acos(-1.0);

oracle::Kind to_oracle(MachineKind k) {
  switch (k) {
    case MachineKind::joint: return oracle::Kind::joint;
    case MachineKind::ncm: return oracle::Kind::ncm;
    case MachineKind::supplementary: return oracle::Kind::supp;
  }
  return oracle::Kind::joint;
}

MachineSpec random_spec(oracle::Rng& rng, int max_m = 4) {
  MachineSpec s;
  s.kind = static_cast<MachineKind>(rng.integer(0, 2));
  s.alpha = rng.in_disk(1.0);
  s.beta = s.kind == MachineKind::ncm ? complex(1.0) : rng.in_disk(1.0);
  s.m = rng.integer(1, max_m);
  s.r = {rng.simplex(s.m, rng.uniform(0.0, 1.0)), rng.simplex(s.m, rng.uniform(0.0, 1.0))};
  return s;
}

oracle::Mat2 oracle_residual(const MachineSpec& s, const std::vector<complex>& p) {
  return oracle::residual(to_oracle(s.kind), s.alpha, s.beta, s.r[0], s.r[1], p);
}

}  // namespace

TEST(ResidualGram, ZeroSuccess) {
  MachineSpec s = MachineSpec::symmetric(MachineKind::joint, 0.5, complex(0.3, 0.4), {0.0});
  s.p = std::vector<complex>{1.0};
  const CMatrix h = residual_gram(s);
  EXPECT_EQ(h(0, 0), complex(1.0));
  EXPECT_EQ(h(1, 1), complex(1.0));
  EXPECT_NEAR(std::abs(h(0, 1) - 0.5 * complex(0.3, 0.4)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(h(1, 0) - std::conj(h(0, 1))), 0.0, 1e-15);
}

TEST(ResidualGram, WorkedValues) {
  MachineSpec j = MachineSpec::symmetric(MachineKind::joint, 0.5, 1.0, {0.5});
  j.p = std::vector<complex>{1.0};
  const CMatrix h = residual_gram(j);
  EXPECT_NEAR(h(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(h(0, 1).real(), 0.375, 1e-15);

  MachineSpec n = MachineSpec::symmetric(MachineKind::ncm, 0.5, 1.0, {2.0 / 3.0});
  n.p = std::vector<complex>{1.0};
  const CMatrix g = residual_gram(n);
  EXPECT_NEAR(g(0, 1).real(), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(psd2_check(g).det, 0.0, 1e-15);
}

TEST(ResidualGram, MissingProbeOverlapsThrow) {
  EXPECT_THROW(residual_gram(MachineSpec::symmetric(MachineKind::joint, 0.5, 1.0, {0.5})),
               ValidationError);
}

TEST(ResidualGram, MatchesExplicitVectorOracle) {
  oracle::Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    MachineSpec s = random_spec(rng);
    std::vector<complex> p;
    for (int k = 0; k < s.m; ++k) p.push_back(rng.in_disk(1.0));
    s.p = p;
    const CMatrix h = residual_gram(s);
    const auto o = oracle_residual(s, p);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(h(i, j) - o[i][j]), 0.0, 1e-12);
  }
}

TEST(Validated, RejectsBadSpecs) {
  auto s = MachineSpec::symmetric(MachineKind::joint, 1.2, 0.5, {0.1});
  EXPECT_THROW(validated(s), ValidationError);
  s = MachineSpec::symmetric(MachineKind::joint, 0.5, complex(0.0, 1.1), {0.1});
  EXPECT_THROW(validated(s), ValidationError);
  s = MachineSpec::symmetric(MachineKind::joint, 0.5, 0.5, {-0.1});
  EXPECT_THROW(validated(s), ValidationError);
  s = MachineSpec::symmetric(MachineKind::joint, 0.5, 0.5, {0.6, 0.5});
  EXPECT_THROW(validated(s), ValidationError);
  s = MachineSpec::symmetric(MachineKind::joint, 0.5, 0.5, {0.1});
  s.m = 2;
  EXPECT_THROW(validated(s), ValidationError);
  s.m = 1;
  s.p = std::vector<complex>{1.0, 1.0};
  EXPECT_THROW(validated(s), ValidationError);
  s.m = 0;
  EXPECT_THROW(validated(s), ValidationError);
}

TEST(Validated, ClampsRoundingAndIgnoresNcmBeta) {
  auto s = MachineSpec::symmetric(MachineKind::ncm, 1.0 + 1e-13, 5.0, {1.0 + 1e-12});
  const auto v = validated(s);
  EXPECT_LE(std::abs(v.alpha), 1.0);
  EXPECT_EQ(v.beta, complex(1.0));
  EXPECT_LE(v.r[0][0], 1.0);
}

TEST(Feasible, OrthogonalOriginals) {
  oracle::Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    MachineSpec s = random_spec(rng);
    s.kind = MachineKind::joint;
    s.alpha = 0.0;
    EXPECT_TRUE(feasible(s).feasible);
  }
}

TEST(Feasible, JointThresholdAtPointEight) {
  const auto pred = [](double r) {
    return feasible(MachineSpec::symmetric(MachineKind::joint, 0.5, 0.8, {r})).feasible;
  };
  EXPECT_TRUE(pred(0.8));
  EXPECT_FALSE(pred(0.8 + 1e-6));
  EXPECT_TRUE(pred(0.8 - 1e-6));
  // Oracle: largest r whose explicit residual has a nonnegative eigenvalue,
  // minimizing the off-diagonal by brute force over p.
  const double r_star = oracle::boundary_by_bisection([](double r) {
    const double off = oracle::min_offdiag_bruteforce(0.4, r * 0.25);
    return (1.0 - r) >= off;
  });
  EXPECT_NEAR(r_star, 0.8, 1e-3);
}

TEST(Feasible, SupplementaryWithDependentSideInfoIsInfeasible) {
  for (real r : {0.01, 0.1, 0.4, 0.9}) {
    const auto s = MachineSpec::symmetric(MachineKind::supplementary, 0.5, 1.0, {r});
    EXPECT_FALSE(feasible(s).feasible) << r;
  }
}

TEST(Feasible, DependentSideInfoGuardRandom) {
  oracle::Rng rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    MachineSpec s;
    s.kind = MachineKind::supplementary;
    s.alpha = rng.in_disk(0.95);
    s.beta = std::polar(1.0, rng.uniform(0.0, 2.0 * pi));
    s.m = rng.integer(1, 4);
    s.r = {rng.simplex(s.m, rng.uniform(0.01, 1.0)), rng.simplex(s.m, rng.uniform(0.01, 1.0))};
    EXPECT_FALSE(feasible(s).feasible);
  }
}

TEST(OptimalProbeOverlaps, Examples) {
  auto s = MachineSpec::symmetric(MachineKind::joint, 0.5, 0.8, {0.2, 0.2});
  for (const auto& p : optimal_probe_overlaps(s)) EXPECT_NEAR(std::abs(p - 1.0), 0.0, 1e-15);

  s.alpha = std::polar(0.5, pi / 3);
  const auto p = optimal_probe_overlaps(s);
  for (int k = 1; k <= 2; ++k) {
    const complex expected = std::polar(1.0, -k * pi / 3);
    EXPECT_NEAR(std::abs(p[static_cast<std::size_t>(k - 1)] - expected), 0.0, 1e-14);
  }

  s.r = {std::vector<real>{0.0, 0.0}, std::vector<real>{0.0, 0.0}};
  for (const auto& q : optimal_probe_overlaps(s)) EXPECT_EQ(q, complex(1.0));
}

TEST(OptimalProbeOverlaps, MinimizeOffDiagonal) {
  oracle::Rng rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    MachineSpec s = random_spec(rng, 1);
    s.p = optimal_probe_overlaps(s);
    const auto c = residual_coefficients(s);
    const double brute = oracle::min_offdiag_bruteforce(residual_target(s), c[0]);
    EXPECT_LE(std::abs(residual_gram(s)(0, 1)), brute + 1e-12);
  }
}

TEST(ReducedInequality, Examples) {
  auto r = reduced_inequality(MachineSpec::symmetric(MachineKind::joint, 0.5, 0.9, {0.5}));
  EXPECT_NEAR(r.lhs, 0.5, 1e-15);
  EXPECT_NEAR(r.rhs, 0.325, 1e-15);
  EXPECT_TRUE(r.holds);

  r = reduced_inequality(MachineSpec::symmetric(MachineKind::ncm, 0.5, 1.0, {2.0 / 3.0}));
  EXPECT_NEAR(r.lhs, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.rhs, 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(r.holds);

  r = reduced_inequality(MachineSpec::symmetric(MachineKind::joint, 0.7, 0.6, {0.0}));
  EXPECT_EQ(r.lhs, 1.0);
  EXPECT_NEAR(r.rhs, 0.42, 1e-15);
  EXPECT_TRUE(r.holds);
}

TEST(ReducedInequality, PremiseRequired) {
  EXPECT_THROW(reduced_inequality(MachineSpec::symmetric(MachineKind::joint, 0.5, 0.1, {0.3})),
               ValidationError);
}

TEST(Feasible, DeterminantAndReducedVerdictsAgree) {
  oracle::Rng rng(25);
  int checked = 0;
  while (checked < 1000) {
    const MachineSpec s = random_spec(rng);
    if (!reduced_applicable(s)) continue;
    ++checked;
    const auto rep = feasible(s);
    const auto red = reduced_inequality(s);
    EXPECT_EQ(rep.feasible, red.holds);
    EXPECT_NEAR(rep.slack, red.lhs - red.rhs, 1e-12);
    // Independent verdict from the explicit-vector residual.
    const double lam = oracle::min_eigenvalue(oracle_residual(s, rep.p_used));
    if (std::abs(lam) > 1e-7) {
      EXPECT_EQ(rep.feasible, lam > 0.0);
    }
  }
}

// Lowering a single entry is not safe: sqrt(r1 r2) falls faster than the
// diagonal gains when the entry is small. Scaling the whole spec toward zero is.
TEST(Feasible, MonotoneAlongRay) {
  oracle::Rng rng(26);
  int checked = 0;
  while (checked < 500) {
    MachineSpec s = random_spec(rng);
    if (!feasible(s).feasible) continue;
    ++checked;
    const real lambda = rng.uniform(0.0, 1.0);
    for (auto& row : s.r)
      for (auto& x : row) x *= lambda;
    EXPECT_TRUE(feasible(s).feasible);
  }
}

TEST(Feasible, SingleEntryDecreaseCanBreak) {
  // sqrt((1-r1)(1-r2)) >= a - sqrt(r1 r2) a^2 holds at (0.94, 0.02), fails at (0.94, 0.0002).
  MachineSpec s = MachineSpec::symmetric(MachineKind::ncm, 0.25, 1.0, {0.5});
  s.r = {std::vector<real>{0.94}, std::vector<real>{0.02}};
  EXPECT_TRUE(feasible(s).feasible);
  s.r[1][0] = 0.0002;
  EXPECT_FALSE(feasible(s).feasible);
}

TEST(Feasible, NcmThresholdMatchesDuanGuo) {
  for (int i = 0; i <= 9; ++i) {
    const real a = 0.1 * i;
    const real bound = 1.0 / (1.0 + a);
    EXPECT_TRUE(feasible(MachineSpec::symmetric(MachineKind::ncm, a, 1.0, {bound})).feasible);
    EXPECT_TRUE(
        feasible(MachineSpec::symmetric(MachineKind::ncm, a, 1.0, {bound * (1 - 1e-6)})).feasible);
    if (a > 0.0) {
      EXPECT_FALSE(
          feasible(MachineSpec::symmetric(MachineKind::ncm, a, 1.0, {bound * (1 + 1e-6)})).feasible);
    }
  }
}

TEST(Feasible, ReportFields) {
  const auto rep = feasible(MachineSpec::symmetric(MachineKind::joint, 0.5, 0.8, {0.8}));
  EXPECT_TRUE(rep.feasible);
  EXPECT_TRUE(rep.p_optimal);
  EXPECT_TRUE(rep.reduced_applicable);
  EXPECT_NEAR(rep.slack, 0.0, 1e-12);
  EXPECT_NEAR(rep.det, 0.0, 1e-12);

  auto fixed = MachineSpec::symmetric(MachineKind::joint, 0.5, 0.8, {0.8});
  fixed.p = std::vector<complex>{0.0};
  const auto rf = feasible(fixed);
  EXPECT_FALSE(rf.p_optimal);
  EXPECT_FALSE(rf.feasible);
}
