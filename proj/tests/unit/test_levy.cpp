#include <cmath>

#include <gtest/gtest.h>

#include "coupled_levy/chains.hpp"
#include "coupled_levy/error.hpp"
#include "coupled_levy/levy.hpp"
#include "test_helpers.hpp"

using namespace coupled_levy;
using namespace testing_support;

namespace {

CompoundPoissonSpec laplace_spec(double rate = 2.0, double a = 1.0, double t = 1.0) {
  return {rate, laplace01(), 0.0, a, t};
}

CompoundPoissonSpec lattice_spec() {
  return {1.0, Distribution1D::from_atoms({{-1.0, 0.5}, {1.0, 0.5}}), 0.0, 2.0, 4.0};
}

}  // namespace

TEST(Uniformize, ClockAndExtendedLaw) {
  const CompoundPoissonSpec spec{1.0, exponential1(), 0.0, 1.0, 1.0};
  const auto u = uniformize(spec);
  EXPECT_DOUBLE_EQ(u.clock_rate, 2.0);
  EXPECT_DOUBLE_EQ(u.extended_law.atom_at(0.0), 0.5);
  EXPECT_NEAR(u.extended_law.cdf(1.0), 0.5 + 0.5 * (1.0 - std::exp(-1.0)), 1e-12);
}

TEST(Levy, PoissonCountsFitPoisson) {
  UniformStream u(1);
  for (double mean : {0.5, 4.0, 30.0}) {
    std::vector<std::uint64_t> counts(50000);
    for (auto& c : counts) c = poisson_count(mean, u);
    EXPECT_TRUE(chi_square_poisson(counts, mean).passes(1e-3)) << mean;
  }
}

TEST(Levy, EqualStartsGiveIdenticalJumps) {
  auto spec = laplace_spec();
  spec.y0 = spec.x0;
  UniformStream u(2);
  const auto path = simulate_pair(spec, CouplingKind::amr, u);
  for (const auto& [a, b] : path.jumps) EXPECT_EQ(a, b);
  EXPECT_EQ(path.x_end, path.y_end);
}

TEST(Levy, NoTicksKeepsStart) {
  auto spec = laplace_spec(2.0, 1.0, 1e-300);
  UniformStream u(3);
  const auto path = simulate_pair(spec, CouplingKind::amr, u);
  EXPECT_TRUE(path.tick_times.empty());
  EXPECT_EQ(path.x_end, spec.x0);
  EXPECT_EQ(path.y_end, spec.y0);
}

TEST(Levy, PathInvariants) {
  const auto spec = laplace_spec();
  PairSimulator sim(spec, CouplingKind::amr);
  for (std::uint64_t r = 0; r < 2000; ++r) {
    UniformStream u(4, 0, r);
    const auto path = sim.run(u, true);
    double x = spec.x0;
    double y = spec.y0;
    for (std::size_t i = 0; i < path.jumps.size(); ++i) {
      EXPECT_GT(path.tick_times[i], 0.0);
      EXPECT_LE(path.tick_times[i], spec.horizon);
      if (i > 0) EXPECT_GE(path.tick_times[i], path.tick_times[i - 1]);
      if (path.coalesced_at && path.tick_times[i] > *path.coalesced_at) {
        EXPECT_EQ(path.jumps[i].first, path.jumps[i].second);
      }
      x += path.jumps[i].first;
      y += path.jumps[i].second;
    }
    EXPECT_NEAR(x, path.x_end, 1e-9);
    EXPECT_NEAR(y, path.y_end, 1e-9);
  }
}

TEST(Levy, SymmetricJumpsAreOppositeBeforeCoalescence) {
  const auto spec = laplace_spec();
  PairSimulator sim(spec, CouplingKind::amr);
  std::size_t uncoupled = 0;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    UniformStream u(5, 0, r);
    const auto path = sim.run(u, true);
    for (std::size_t i = 0; i < path.jumps.size(); ++i) {
      if (path.coalesced_at && path.tick_times[i] >= *path.coalesced_at) break;
      EXPECT_NEAR(path.jumps[i].first + path.jumps[i].second, 0.0, 1e-8);
      ++uncoupled;
    }
  }
  EXPECT_GT(uncoupled, 500u);
}

TEST(Levy, TrivialCostEstimates) {
  auto spec = laplace_spec();
  const auto cost = ConcaveCost::power(0.5);
  const auto sync = estimate_cost(spec, CouplingKind::synchronous, cost, 1000, 6);
  EXPECT_NEAR(sync.mean, 1.0, 1e-12);
  EXPECT_NEAR(sync.std_error, 0.0, 1e-12);
  spec.y0 = spec.x0;
  const auto same = estimate_cost(spec, CouplingKind::amr, cost, 1000, 6);
  EXPECT_EQ(same.mean, 0.0);
  EXPECT_EQ(same.std_error, 0.0);
}

TEST(Levy, DeterministicForFixedSeed) {
  const auto spec = laplace_spec();
  const auto a = estimate_cost(spec, CouplingKind::amr, ConcaveCost::capped(1.0), 3000, 7);
  const auto b = estimate_cost(spec, CouplingKind::amr, ConcaveCost::capped(1.0), 3000, 7);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
}

TEST(Levy, AmrDominatesBaselines) {
  const auto spec = laplace_spec();
  const std::vector<ConcaveCost> costs{ConcaveCost::power(0.5)};
  const auto amr = estimate_costs(spec, CouplingKind::amr, costs, 20000, 8)[0];
  for (auto kind : {CouplingKind::synchronous, CouplingKind::independent,
                    CouplingKind::reflection, CouplingKind::basic}) {
    const auto other = estimate_costs(spec, kind, costs, 20000, 9)[0];
    EXPECT_LE(amr.mean, other.mean + 3.0 * combined_se(amr, other)) << to_string(kind);
  }
}

TEST(Levy, ReflectionRejectsAsymmetricJumps) {
  const CompoundPoissonSpec spec{2.0, exponential1(), 0.0, 1.0, 1.0};
  EXPECT_THROW(PairSimulator(spec, CouplingKind::reflection), PreconditionError);
  EXPECT_THROW(validate(CompoundPoissonSpec{0.0, exponential1(), 0.0, 1.0, 1.0},
                        CouplingKind::amr),
               ConfigError);
}

TEST(Levy, MarginalsArePreserved) {
  for (const auto& law : {laplace01(), exponential1()}) {
    const CompoundPoissonSpec spec{2.0, law, 0.0, 1.0, 1.0};
    const auto r = marginal_law_check(spec, CouplingKind::amr, 20000, 10);
    EXPECT_TRUE(r.passes) << r.x.p_value << " " << r.y.p_value;
  }
}

TEST(Levy, ExtendedJumpStatistics) {
  for (auto kind : {CouplingKind::amr, CouplingKind::independent}) {
    const auto r = extended_jump_check(laplace_spec(), kind, 20000, 11);
    EXPECT_TRUE(r.passes(1e-3)) << to_string(kind) << " atom p " << r.atom_p_value << " ks p "
                                << r.continuous.p_value << " chi p " << r.tick_counts.p_value
                                << " corr " << r.count_jump_correlation;
  }
}

TEST(Levy, UniformizationDiagnostic) {
  for (auto eta : {Intensity::independent, Intensity::synchronous}) {
    const auto r = uniformization_diagnostic(laplace_spec(), eta, 20000, 12);
    EXPECT_TRUE(r.passes(1e-3));
  }
}

TEST(Levy, ConditionalCountsMatchChainValues) {
  const CompoundPoissonSpec spec{0.5, laplace01(), 0.0, 1.0, 1.0};
  const auto r = conditional_count_check(spec, ConcaveCost::capped(1.0), 40000, 13);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_NEAR(r.rows[0].chain_value, 1.0, 1e-12);
  EXPECT_NEAR(r.rows[0].poisson_weight, std::exp(-1.0), 1e-12);
  for (const auto& row : r.rows) {
    EXPECT_TRUE(row.agrees) << row.ticks << ": " << row.mc.mean << " vs " << row.chain_value;
  }
  EXPECT_TRUE(r.agrees) << r.overall.mean << " vs " << r.poissonized;
}

TEST(Levy, LatticeTotalVariation) {
  const auto spec = lattice_spec();
  EXPECT_DOUBLE_EQ(lattice_tv(spec, 0.0), 1.0);
  double prev = 1.0;
  for (double t : {0.5, 1.0, 2.0, 4.0, 50.0}) {
    const double tv = lattice_tv(spec, t);
    EXPECT_LT(tv, prev);
    prev = tv;
  }
  EXPECT_LT(prev, 0.2);
  EXPECT_THROW(lattice_tv(laplace_spec(), 1.0), PreconditionError);
}

TEST(Levy, SurvivalMatchesTotalVariation) {
  const auto pts = coalescence_vs_tv(lattice_spec(), {0.0, 0.5, 1.0, 2.0, 4.0}, 20000, 14);
  ASSERT_EQ(pts.size(), 5u);
  EXPECT_EQ(pts[0].survival, 1.0);
  for (const auto& p : pts) {
    EXPECT_TRUE(p.agrees) << p.t << ": " << p.survival << " vs " << p.tv;
  }
}

TEST(Levy, ExponentialJumpsCoalesceAtFirstCrossing) {
  const CompoundPoissonSpec spec{2.0, exponential1(), 0.0, 1.0, 3.0};
  const auto r = crossing_check(spec, 1000, 15);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_GT(r.coalesced, 100u);
}
