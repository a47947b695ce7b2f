#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "coupled_levy/chains.hpp"
#include "coupled_levy/coupling.hpp"
#include "coupled_levy/error.hpp"
#include "coupled_levy/oracle.hpp"
#include "test_helpers.hpp"

using namespace coupled_levy;
using namespace testing_support;

namespace {

void expect_feasible(const TransportPlan& t, const std::vector<double>& rows,
                     const std::vector<double>& cols,
                     const std::vector<std::vector<double>>& cost) {
  double value = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols.size(); ++j) {
      EXPECT_GE(t.plan[i][j], 0.0);
      s += t.plan[i][j];
      value += t.plan[i][j] * cost[i][j];
    }
    EXPECT_NEAR(s, rows[i], 1e-12);
  }
  for (std::size_t j = 0; j < cols.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) s += t.plan[i][j];
    EXPECT_NEAR(s, cols[j], 1e-12);
  }
  EXPECT_NEAR(value, t.value, 1e-12);
  EXPECT_GE(t.min_reduced_cost, -1e-10);
}

std::vector<double> random_weights(UniformStream& u, std::size_t n) {
  std::vector<double> w(n);
  for (auto& x : w) x = u.next();
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= s;
  double rest = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) rest -= w[i];
  w.back() = rest;
  return w;
}

// Cost of the comonotone plan, optimal for convex costs of x - y.
double monotone_cost(const std::vector<double>& xs, const std::vector<double>& a,
                     const std::vector<double>& ys, const std::vector<double>& b,
                     const std::function<double(double)>& c) {
  std::size_t i = 0;
  std::size_t j = 0;
  double ra = a[0];
  double rb = b[0];
  double total = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double q = std::min(ra, rb);
    total += q * c(xs[i] - ys[j]);
    ra -= q;
    rb -= q;
    if (ra <= rb) {
      if (++i < xs.size()) ra += a[i];
    } else {
      if (++j < ys.size()) rb += b[j];
    }
  }
  return total;
}

Distribution1D nine_atom_law() {
  const double w[] = {1, 2, 3, 5, 8, 5, 3, 2, 1};
  std::vector<Atom> atoms;
  for (int k = -4; k <= 4; ++k) atoms.push_back({static_cast<double>(k), w[k + 4] / 30.0});
  return Distribution1D::from_atoms(atoms);
}

}  // namespace

TEST(Transport, DiracToDirac) {
  const auto d = Distribution1D::dirac(0.0);
  const auto t = solve_transport(d, d, ConcaveCost::power(0.5));
  ASSERT_EQ(t.plan.size(), 1u);
  EXPECT_DOUBLE_EQ(t.plan[0][0], 1.0);
  EXPECT_DOUBLE_EQ(t.value, 0.0);
}

TEST(Transport, RejectsMassMismatch) {
  EXPECT_THROW(solve_transport({0.5, 0.5}, {0.5, 0.6}, {{0, 1}, {1, 0}}), DomainError);
}

TEST(Transport, MatchesMonotonePlanForConvexCost) {
  UniformStream u(21);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t m = 2 + rep % 20;
    const std::size_t n = 3 + (rep * 7) % 25;
    std::vector<double> xs(m);
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < m; ++i) xs[i] = static_cast<double>(i) + 0.3 * u.next();
    for (std::size_t j = 0; j < n; ++j) ys[j] = 0.7 * static_cast<double>(j) + 0.3 * u.next();
    const auto a = random_weights(u, m);
    const auto b = random_weights(u, n);
    std::vector<std::vector<double>> c(m, std::vector<double>(n));
    const auto sq = [](double d) { return d * d; };
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) c[i][j] = sq(xs[i] - ys[j]);
    }
    const auto t = solve_transport(a, b, c);
    expect_feasible(t, a, b, c);
    EXPECT_NEAR(t.value, monotone_cost(xs, a, ys, b, sq), 1e-10);
  }
}

TEST(Transport, EqualMassDegenerateInstance) {
  const std::size_t n = 64;
  const std::vector<double> w(n, 1.0 / n);
  std::vector<std::vector<double>> c(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c[i][j] = std::sqrt(std::abs(static_cast<double>(i) - static_cast<double>(j) - 3.5));
    }
  }
  const auto t = solve_transport(w, w, c);
  expect_feasible(t, w, w, c);
}

TEST(Transport, BandDualMatchesBandPayoff) {
  const auto F = uniform01();
  const auto G = shift(F, 0.5);
  const std::size_t n = 32;
  std::vector<Atom> fa;
  std::vector<Atom> ga;
  for (double x : quantile_atoms(F, n)) fa.push_back({x, 1.0 / n});
  for (double x : quantile_atoms(G, n)) ga.push_back({x, 1.0 / n});
  const auto t = solve_transport(Distribution1D::from_atoms(fa), Distribution1D::from_atoms(ga),
                                 ConcaveCost::capped(0.5));
  EXPECT_NEAR(0.5 - t.value, band_payoff(F, G, 0.5), 1e-2);
}

TEST(Transport, BandPayoffPlanBeatsRandomFeasiblePlans) {
  UniformStream u(22);
  const std::size_t m = 12;
  const std::size_t n = 10;
  std::vector<double> xs(m);
  std::vector<double> ys(n);
  for (auto& x : xs) x = 2.0 * u.next();
  for (auto& y : ys) y = 2.0 * u.next() + 0.4;
  const auto a = random_weights(u, m);
  const auto b = random_weights(u, n);
  const double cband = 0.6;
  std::vector<std::vector<double>> neg_payoff(m, std::vector<double>(n));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      neg_payoff[i][j] = -std::max(cband - std::abs(xs[i] - ys[j]), 0.0);
    }
  }
  const auto t = solve_transport(a, b, neg_payoff);
  expect_feasible(t, a, b, neg_payoff);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::vector<double>> k(m, std::vector<double>(n));
    for (auto& row : k) {
      for (auto& x : row) x = std::exp(3.0 * u.next());
    }
    for (int it = 0; it < 2000; ++it) {
      for (std::size_t i = 0; i < m; ++i) {
        const double s = std::accumulate(k[i].begin(), k[i].end(), 0.0);
        for (auto& x : k[i]) x *= a[i] / s;
      }
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += k[i][j];
        for (std::size_t i = 0; i < m; ++i) k[i][j] *= b[j] / s;
      }
    }
    double payoff = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) payoff -= k[i][j] * neg_payoff[i][j];
    }
    EXPECT_GE(-t.value, payoff - 1e-9);
  }
}

TEST(TwoPoint, ValueAtHalf) {
  const auto r = two_point_example(0.5, 0.5);
  EXPECT_NEAR(r.f_value, std::sqrt(1.5) + std::sqrt(0.5) - 2.0 * std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(r.f_value, 0.5176, 1e-4);
  EXPECT_EQ(r.preferred, TwoPointPlan::synchronous);
  EXPECT_NEAR(two_point_plan(0.5, 0.5).value, r.synchronous_cost, 1e-12);
}

TEST(TwoPoint, LinearProgramPicksCheaperExtremePlan) {
  for (double g : {0.2, 0.5, 0.9}) {
    for (double alpha : {0.1, 0.4, 0.7, 0.8, 1.0, 1.5, 3.0}) {
      const auto r = two_point_example(g, alpha);
      const double lp = two_point_plan(g, alpha).value;
      EXPECT_NEAR(lp, std::min(r.synchronous_cost, r.reflection_cost), 1e-12);
    }
  }
}

TEST(TwoPoint, RootForGammaNineTenths) {
  const double r = two_point_root(0.9);
  EXPECT_GT(r, 0.9);
  EXPECT_LT(r, 0.95);
  EXPECT_NEAR(two_point_example(0.9, r).f_value, 0.0, 1e-12);
}

TEST(TwoPoint, RootsIncreaseInGammaTowardInverseSqrtTwo) {
  double prev = 0.0;
  for (int k = 1; k <= 99; ++k) {
    const double r = two_point_root(k / 100.0);
    EXPECT_GT(r, prev);
    EXPECT_GT(r, 1.0 / std::sqrt(2.0));
    prev = r;
  }
  // As gamma -> 0, f / gamma -> ln((1 - alpha^2) / alpha^2).
  EXPECT_NEAR(two_point_root(1e-5), 1.0 / std::sqrt(2.0), 1e-4);
}

TEST(TwoPoint, NegativeForAlphaAtLeastOne) {
  for (double g : {0.1, 0.5, 0.9}) {
    for (double alpha : {1.0, 1.5, 4.0}) EXPECT_LT(two_point_example(g, alpha).f_value, 0.0);
  }
}

TEST(VerifyAmr, LaplacePowerCost) {
  const auto r = verify_amr_optimal(laplace01(), 1.0, ConcaveCost::power(0.5), 32);
  EXPECT_LT(r.gap, 1e-2);
  EXPECT_GE(r.min_reduced_cost, -1e-10);
}

TEST(VerifyAmr, UniformCappedCost) {
  const auto r = verify_amr_optimal(uniform01(), 0.3, ConcaveCost::capped(0.4), 32);
  EXPECT_LT(r.gap, 1e-2);
}

TEST(VerifyAmr, ZeroSeparation) {
  const auto r = verify_amr_optimal(laplace01(), 0.0, ConcaveCost::power(0.5), 32);
  EXPECT_EQ(r.lp_value, 0.0);
  EXPECT_EQ(r.amr_value, 0.0);
  EXPECT_EQ(r.gap, 0.0);
}

TEST(ChainOracle, AmrChainIsOptimalOnNineAtoms) {
  const auto F = nine_atom_law();
  for (const auto& cost : {ConcaveCost::power(0.5), ConcaveCost::capped(2.0)}) {
    const std::function<double(double)> phi = [&](double d) { return cost(d); };
    for (double a : {1.0, 2.0, 5.0}) {
      const double lp = optimal_chain_value_lp(F, a, phi, 3);
      const double amr = amr_chain_value_exact(F, a, phi, 3);
      EXPECT_NEAR(lp, amr, 1e-9) << cost.name() << " a=" << a;
    }
  }
}
