#include <cmath>

#include <gtest/gtest.h>

#include "coupled_levy/chains.hpp"
#include "coupled_levy/costs.hpp"
#include "coupled_levy/error.hpp"
#include "test_helpers.hpp"

using namespace coupled_levy;
using namespace testing_support;

namespace {

Distribution1D lattice5() {
  return Distribution1D::from_atoms(
      {{-2.0, 0.1}, {-1.0, 0.2}, {0.0, 0.4}, {1.0, 0.2}, {2.0, 0.1}});
}

Terminal band(double c) {
  return [c](double d) { return std::max(c - d, 0.0); };
}

}  // namespace

TEST(Chain, EqualStartsGiveIdenticalPaths) {
  ChainSpec spec{laplace01(), 0.4, 0.4, 20};
  UniformStream u(1);
  const auto path = simulate_amr_chain(spec, u);
  ASSERT_EQ(path.xs.size(), 21u);
  EXPECT_EQ(path.coalesced_at, std::optional<std::size_t>(0));
  EXPECT_EQ(path.xs, path.ys);
}

TEST(Chain, DiracJumpsKeepPathsConstant) {
  ChainSpec spec{Distribution1D::dirac(0.0), 0.0, 1.5, 10};
  UniformStream u(2);
  const auto path = simulate_amr_chain(spec, u);
  for (std::size_t k = 0; k <= 10; ++k) {
    EXPECT_EQ(path.xs[k], 0.0);
    EXPECT_NEAR(path.ys[k], 1.5, 1e-9);
  }
  EXPECT_FALSE(path.coalesced_at);
}

TEST(Chain, CoalescenceIsAbsorbing) {
  ChainSpec spec{lattice5(), 0.0, 2.0, 30};
  ShiftCouplingCache cache(spec.jump_law);
  std::size_t coalesced = 0;
  for (std::uint64_t r = 0; r < 500; ++r) {
    UniformStream u(3, 0, r);
    const auto path = simulate_amr_chain(spec, u, cache);
    if (!path.coalesced_at) continue;
    ++coalesced;
    for (std::size_t k = *path.coalesced_at; k < path.xs.size(); ++k) {
      EXPECT_EQ(path.xs[k], path.ys[k]);
    }
    for (std::size_t k = 0; k < *path.coalesced_at; ++k) EXPECT_NE(path.xs[k], path.ys[k]);
  }
  EXPECT_GT(coalesced, 0u);
}

TEST(Chain, MarginalIncrementsFollowJumpLaw) {
  const auto F = laplace01();
  ChainSpec spec{F, 0.0, 1.0, 1};
  ShiftCouplingCache cache(F);
  std::vector<double> dx(50000);
  std::vector<double> dy(50000);
  for (std::size_t r = 0; r < dx.size(); ++r) {
    UniformStream u(4, 0, r);
    const auto path = simulate_amr_chain(spec, u, cache);
    dx[r] = path.xs[1] - path.xs[0];
    dy[r] = path.ys[1] - path.ys[0];
  }
  const auto cdf = [&](double x) { return F.cdf(x); };
  EXPECT_TRUE(ks_one_sample(dx, cdf, cdf).passes(1e-3));
  EXPECT_TRUE(ks_one_sample(dy, cdf, cdf).passes(1e-3));
}

TEST(Psi, SymmetryIdentity) {
  const auto F = laplace01();
  for (double a : {0.3, 0.7, 1.5}) {
    for (double c : {0.3, 0.7, 1.5}) {
      EXPECT_NEAR(psi(F, a, c) + a, psi(F, c, a) + c, 1e-6) << a << " " << c;
    }
  }
}

TEST(Psi, Limits) {
  const auto F = laplace01();
  EXPECT_NEAR(psi(F, 1e-7, 0.8), 0.8, 1e-6);
  EXPECT_NEAR(psi(F, 0.8, 1e-7), 0.0, 1e-6);
  EXPECT_THROW(psi(F, 0.0, 1.0), DomainError);
}

TEST(PsiN, OneStepMatchesPsi) {
  const auto F = laplace01();
  for (double a : {0.3, 1.0}) {
    EXPECT_NEAR(psi_n(F, a, band(0.5), 1), psi(F, a, 0.5), 1e-3);
  }
}

TEST(PsiN, ZeroSeparationIsAbsorbing) {
  const auto F = laplace01();
  for (std::size_t n : {1u, 3u}) EXPECT_DOUBLE_EQ(psi_n(F, 0.0, band(0.5), n), 0.5);
}

TEST(PsiN, NonincreasingAndConvexOnGrid) {
  const auto F = laplace01();
  const auto detail = psi_n_detail(F, 1.0, band(1.0), 3, 256);
  const auto& g = detail.table.grid();
  const auto& v = detail.table.values();
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LE(v[i], v[i - 1] + 1e-9) << g[i];
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    const double w = (g[i] - g[i - 1]) / (g[i + 1] - g[i - 1]);
    EXPECT_LE(v[i], (1.0 - w) * v[i - 1] + w * v[i + 1] + 1e-6) << g[i];
  }
}

TEST(PsiN, MonteCarloAgreesWithValueIteration) {
  const auto F = laplace01();
  ChainSpec spec{F, 0.0, 1.0, 3};
  const auto mc = estimate_chain(spec, CouplingKind::amr, band(1.0), 100000, 11);
  const double v = psi_n(F, 1.0, band(1.0), 3);
  EXPECT_NEAR(mc.mean, v, 3 * mc.std_error + 1e-3);
}

TEST(PsiN, ExactLatticeValueAgreesWithMonteCarlo) {
  ChainSpec spec{lattice5(), 0.0, 3.0, 3};
  const auto mc = estimate_chain(spec, CouplingKind::amr, band(2.0), 100000, 12);
  const double exact = amr_chain_value_exact(spec.jump_law, 3.0, band(2.0), 3);
  EXPECT_NEAR(mc.mean, exact, 3 * mc.std_error);
}

TEST(Chain, DominatesSynchronousForCappedCost) {
  const auto F = laplace01();
  const auto cost = ConcaveCost::capped(1.0);
  ChainSpec spec{F, 0.0, 1.0, 5};
  const Terminal phi = [&](double d) { return cost(d); };
  const auto amr = estimate_chain(spec, CouplingKind::amr, phi, 100000, 13);
  const auto sync = estimate_chain(spec, CouplingKind::synchronous, phi, 100000, 14);
  EXPECT_LE(amr.mean, sync.mean + 3 * combined_se(amr, sync));
  EXPECT_NEAR(sync.mean, 1.0, 1e-9);
}

TEST(Chain, SwappingStartsPreservesSeparationLaw) {
  const auto F = laplace01();
  ShiftCouplingCache cache(F);
  std::vector<double> a(20000);
  std::vector<double> b(20000);
  for (std::size_t r = 0; r < a.size(); ++r) {
    UniformStream u1(15, 0, r);
    UniformStream u2(16, 0, r);
    const auto p1 = simulate_amr_chain({F, 0.0, 1.0, 4}, u1, cache);
    const auto p2 = simulate_amr_chain({F, 1.0, 0.0, 4}, u2, cache);
    a[r] = std::abs(p1.xs.back() - p1.ys.back());
    b[r] = std::abs(p2.xs.back() - p2.ys.back());
  }
  EXPECT_TRUE(ks_two_sample(a, b).passes(1e-3));
}

TEST(Chain, RejectsNonUnimodalJumpLaw) {
  const auto bimodal = Distribution1D::from_atoms({{-1.0, 0.5}, {1.0, 0.5}});
  EXPECT_THROW(validate({bimodal, 0.0, 1.0, 1}), PreconditionError);
  EXPECT_NO_THROW(validate({laplace01(), 0.0, 1.0, 1}));
}

TEST(PsiN, SequenceMatchesSingleLevels) {
  const auto F = laplace01();
  const auto seq = psi_values(F, 0.8, band(1.0), 3, 128);
  ASSERT_EQ(seq.size(), 4u);
  EXPECT_DOUBLE_EQ(seq[0], 0.2);
  // Grids differ with the horizon, so levels agree to grid tolerance.
  for (std::size_t n = 1; n <= 3; ++n) EXPECT_NEAR(seq[n], psi_n(F, 0.8, band(1.0), n, 128), 1e-3);
}
