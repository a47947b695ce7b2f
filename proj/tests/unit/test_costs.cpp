#include <cmath>

#include <gtest/gtest.h>

#include "coupled_levy/costs.hpp"
#include "coupled_levy/error.hpp"
#include "test_helpers.hpp"

using namespace coupled_levy;
using namespace testing_support;

namespace {

std::vector<ConcaveCost> catalogue() {
  return {ConcaveCost::power(0.5), ConcaveCost::power(0.2), ConcaveCost::capped(1.0),
          ConcaveCost::bounded_exp(), ConcaveCost::bands({{1.0, 1.0}, {0.5, 0.3}, {2.0, 2.5}})};
}

}  // namespace

TEST(Evaluate, Examples) {
  EXPECT_DOUBLE_EQ(ConcaveCost::power(0.5)(4.0), 2.0);
  EXPECT_DOUBLE_EQ(ConcaveCost::capped(1.0)(3.0), 1.0);
  EXPECT_DOUBLE_EQ(ConcaveCost::bands({{1.0, 1.0}}).payoff(0.25), 0.75);
  EXPECT_NEAR(ConcaveCost::bounded_exp()(2.0), 1.0 - std::exp(-2.0), 1e-16);
}

TEST(Evaluate, RejectsNegativeDistance) {
  EXPECT_THROW(ConcaveCost::capped(1.0)(-0.1), DomainError);
}

TEST(Evaluate, RejectsInvalidParameters) {
  EXPECT_THROW(ConcaveCost::power(1.5), ConfigError);
  EXPECT_THROW(ConcaveCost::capped(0.0), ConfigError);
  EXPECT_THROW(ConcaveCost::bands({{-1.0, 1.0}}), ConfigError);
}

TEST(Evaluate, ZeroAtOriginMonotoneConcave) {
  for (const auto& cost : catalogue()) {
    EXPECT_EQ(cost(0.0), 0.0) << cost.name();
    for (int i = 0; i < 300; ++i) {
      const double d1 = 0.013 * i;
      EXPECT_LE(cost(d1), cost(d1 + 0.013) + 1e-15);
      for (int j = i + 1; j < 300; j += 7) {
        const double d2 = 0.013 * j;
        EXPECT_GE(cost(0.5 * (d1 + d2)), 0.5 * (cost(d1) + cost(d2)) - 1e-12) << cost.name();
      }
    }
  }
}

TEST(Payoff, ConvexNonincreasing) {
  for (const auto& cost : catalogue()) {
    const double d_max = 6.0;
    for (int i = 0; i + 2 <= 600; ++i) {
      const double a = 0.01 * i;
      const double pa = cost.payoff(a, d_max);
      const double pb = cost.payoff(a + 0.01, d_max);
      const double pc = cost.payoff(a + 0.02, d_max);
      EXPECT_LE(pb, pa + 1e-15);
      EXPECT_LE(pb, 0.5 * (pa + pc) + 1e-12) << cost.name();
    }
  }
}

TEST(BandApproximation, CappedIsOneBand) {
  const auto r = band_approximation(ConcaveCost::capped(1.0), 1, 2.0);
  ASSERT_EQ(r.bands.bands.size(), 1u);
  EXPECT_DOUBLE_EQ(r.bands.bands[0].lambda, 1.0);
  EXPECT_DOUBLE_EQ(r.bands.bands[0].c, 1.0);
  EXPECT_EQ(r.sup_error, 0.0);
}

TEST(BandApproximation, BoundedExpAccuracy) {
  const auto r = band_approximation(ConcaveCost::bounded_exp(), 64, 10.0);
  double err = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double d = 10.0 * i / 10000;
    const double approx = band_combination_payoff(r.bands, d);
    EXPECT_LE(approx, std::exp(-d) + 1e-15);
    err = std::max(err, std::exp(-d) - approx);
  }
  EXPECT_LT(err, 0.02);
  EXPECT_NEAR(err, r.sup_error, 1e-12);
}

TEST(BandApproximation, ErrorNonincreasingUnderDoubling) {
  for (const auto& cost : catalogue()) {
    double prev = INFINITY;
    for (std::size_t n : {4, 8, 16, 32}) {
      const auto r = band_approximation(cost, n, 5.0);
      EXPECT_LE(r.sup_error, prev + 1e-15) << cost.name() << " n=" << n;
      EXPECT_GE(r.sup_error, -1e-15);
      prev = r.sup_error;
    }
  }
}

TEST(BandApproximation, RejectsUnboundedRange) {
  EXPECT_THROW(band_approximation(ConcaveCost::power(0.5), 8, INFINITY), DomainError);
}

TEST(Integrability, FiniteForLaplace) {
  const double v = integrability_proxy(ConcaveCost::power(0.5), laplace01());
  // E|X|^{1/2} for a standard Laplace variable is Gamma(3/2).
  EXPECT_NEAR(v, std::tgamma(1.5), 1e-6);
}
