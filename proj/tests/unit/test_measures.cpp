#include <cmath>

#include <gtest/gtest.h>

#include "coupled_levy/error.hpp"
#include "coupled_levy/measures.hpp"
#include "coupled_levy/stats.hpp"
#include "test_helpers.hpp"

using namespace coupled_levy;
using namespace testing_support;

namespace {

Distribution1D half_atom_half_exponential() {
  return Distribution1D::mixture({{0.0, 0.5}}, Exponential{1.0, 0.0}, 0.5);
}

std::vector<Distribution1D> zoo() {
  std::vector<Distribution1D> out;
  out.push_back(uniform01());
  out.push_back(laplace01());
  out.push_back(exponential1());
  out.push_back(Distribution1D::from_family(Triangular{-1.0, 0.0, 2.0}));
  out.push_back(Distribution1D::from_family(Gaussian{0.5, 2.0}));
  out.push_back(Distribution1D::from_atoms({{0.0, 0.5}, {1.0, 0.5}}));
  out.push_back(half_atom_half_exponential());
  out.push_back(Distribution1D::mixture({{-0.5, 0.2}, {0.3, 0.1}},
                                        Tabulated({-1.0, 0.0, 0.5, 2.0}, {1.0, 0.0, 3.0}), 0.7));
  return out;
}

}  // namespace

TEST(Cdf, UniformAtHalf) { EXPECT_DOUBLE_EQ(uniform01().cdf(0.5), 0.5); }

TEST(Cdf, DiracIsRightContinuous) {
  const auto d = Distribution1D::dirac(0.0);
  EXPECT_EQ(d.cdf(-0.1), 0.0);
  EXPECT_EQ(d.cdf(0.0), 1.0);
  EXPECT_EQ(d.cdf_left(0.0), 0.0);
}

TEST(Cdf, AtomPlusExponentialAtZero) {
  EXPECT_DOUBLE_EQ(half_atom_half_exponential().cdf(0.0), 0.5);
}

TEST(Quantile, TwoPointPlusAndMinus) {
  const auto d = Distribution1D::from_atoms({{0.0, 0.5}, {1.0, 0.5}});
  EXPECT_EQ(d.quantile_plus(0.5), 1.0);
  EXPECT_EQ(d.quantile_minus(0.5), 0.0);
}

TEST(Quantile, UniformContinuous) {
  EXPECT_NEAR(uniform01().quantile_plus(0.3), 0.3, 1e-15);
  EXPECT_NEAR(uniform01().quantile_minus(0.3), 0.3, 1e-15);
}

TEST(Quantile, AtomPlusExponentialMatchesInverse) {
  const auto d = half_atom_half_exponential();
  EXPECT_EQ(d.quantile_plus(0.25), 0.0);
  EXPECT_EQ(d.quantile_minus(0.25), 0.0);
  // F(x) = 1/2 + (1 - e^{-x}) / 2 inverts to -log(2 (1 - z)).
  EXPECT_NEAR(d.quantile_plus(0.75), std::log(2.0), 1e-12);
  EXPECT_NEAR(d.quantile_minus(0.75), std::log(2.0), 1e-12);
  // Bisection on the cdf as a second route.
  double lo = 0.0;
  double hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (d.cdf(mid) >= 0.75 ? hi : lo) = mid;
  }
  EXPECT_NEAR(d.quantile_plus(0.75), hi, 1e-12);
}

TEST(Quantile, RejectsLevelsOutsideUnitInterval) {
  const auto d = uniform01();
  EXPECT_THROW(d.quantile_plus(0.0), DomainError);
  EXPECT_THROW(d.quantile_minus(1.0), DomainError);
  EXPECT_THROW(d.quantile_plus(std::nan("")), DomainError);
}

TEST(Quantile, OrderingAndGaloisProperties) {
  for (const auto& d : zoo()) {
    double prev_plus = -INFINITY;
    for (int i = 1; i < 400; ++i) {
      const double z = i / 400.0;
      const double qp = d.quantile_plus(z);
      const double qm = d.quantile_minus(z);
      EXPECT_LE(qm, qp);
      EXPECT_GE(qp, prev_plus);
      prev_plus = qp;
      EXPECT_GE(d.cdf(qp), z - 1e-12) << describe(d);
      EXPECT_LE(d.cdf_left(qm), z + 1e-12) << describe(d);
    }
  }
}

TEST(Quantile, PlusAndMinusAgreeAlmostSurely) {
  UniformStream u(11);
  for (const auto& d : zoo()) {
    int differ = 0;
    for (int i = 0; i < 20000; ++i) {
      const double z = u.next();
      if (std::abs(d.quantile_plus(z) - d.quantile_minus(z)) > 1e-9) ++differ;
    }
    EXPECT_EQ(differ, 0) << describe(d);
  }
}

TEST(Cdf, MonotoneWithLimits) {
  for (const auto& d : zoo()) {
    double prev = 0.0;
    for (int i = -2000; i <= 2000; ++i) {
      const double v = d.cdf(i * 0.01);
      EXPECT_GE(v, prev - 1e-15);
      prev = v;
    }
    EXPECT_NEAR(d.cdf(-1e6), 0.0, 1e-12);
    EXPECT_NEAR(d.cdf(1e6), 1.0, 1e-12);
  }
}

TEST(Construction, RejectsBadMass) {
  EXPECT_THROW(Distribution1D::from_atoms({{0.0, 0.4}}), ConfigError);
  EXPECT_THROW(Distribution1D::from_atoms({{0.0, -0.1}, {1.0, 1.1}}), ConfigError);
}

TEST(Construction, MergesColocatedAtoms) {
  const auto d = Distribution1D::from_atoms({{0.0, 0.25}, {0.0, 0.25}, {1.0, 0.5}});
  ASSERT_EQ(d.atoms().size(), 2u);
  EXPECT_DOUBLE_EQ(d.atom_at(0.0), 0.5);
}

TEST(Tabulated, NormalizesAndInvertsExactly) {
  const auto d = Distribution1D::from_family(Tabulated({0.0, 1.0, 3.0}, {2.0, 1.0}));
  // Heights 2 and 1 scaled to total area one: masses 1/2 and 1/2.
  EXPECT_NEAR(d.cdf(1.0), 0.5, 1e-15);
  EXPECT_NEAR(d.quantile_plus(0.75), 2.0, 1e-15);
  EXPECT_NEAR(d.pdf(0.5), 0.5, 1e-15);
}

TEST(Tabulated, EmptyCellSeparatesInverses) {
  const auto d = Distribution1D::from_family(Tabulated({0.0, 1.0, 2.0, 3.0}, {1.0, 0.0, 1.0}));
  EXPECT_NEAR(d.quantile_minus(0.5), 1.0, 1e-15);
  EXPECT_NEAR(d.quantile_plus(0.5), 2.0, 1e-15);
}

TEST(Shift, DiracAndUniform) {
  const auto d = shift(Distribution1D::dirac(0.0), 0.7);
  EXPECT_EQ(d.atom_at(0.7), 1.0);
  const auto u = shift(uniform01(), 0.5);
  EXPECT_DOUBLE_EQ(u.cdf(0.5), 0.0);
  EXPECT_DOUBLE_EQ(u.cdf(1.0), 0.5);
  EXPECT_DOUBLE_EQ(u.cdf(1.5), 1.0);
}

TEST(Shift, GroupPropertyAndTranslation) {
  for (const auto& d : zoo()) {
    const auto s = shift(d, 1.3);
    const auto back = shift(s, -1.3);
    // Atom locations move by a rounding error, so compare off the atoms.
    for (int i = -50; i <= 50; ++i) {
      const double x = 0.1 * i + 0.013;
      EXPECT_NEAR(back.cdf(x), d.cdf(x), 1e-12);
      EXPECT_NEAR(s.cdf(x), d.cdf(x - 1.3), 1e-12);
    }
  }
}

TEST(MixWithDirac, EdgeWeightsAndMass) {
  const auto e = exponential1();
  EXPECT_LT(cdf_distance(mix_with_dirac(e, 0.0), e), 1e-15);
  const auto one = mix_with_dirac(e, 1.0);
  EXPECT_EQ(one.atom_at(0.0), 1.0);
  const auto half = mix_with_dirac(e, 0.5);
  EXPECT_DOUBLE_EQ(half.cdf(0.0), 0.5);
  for (const auto& d : zoo()) {
    for (double w : {0.1, 0.5, 0.9}) {
      EXPECT_NEAR(mix_with_dirac(d, w).total_mass(), 1.0, 1e-12);
    }
  }
  const auto merged = mix_with_dirac(half_atom_half_exponential(), 0.5);
  ASSERT_EQ(merged.atoms().size(), 1u);
  EXPECT_DOUBLE_EQ(merged.atom_at(0.0), 0.75);
}

TEST(Sample, SimpleCases) {
  EXPECT_EQ(sample(Distribution1D::dirac(0.0), 0.37), 0.0);
  EXPECT_NEAR(sample(uniform01(), 0.42), 0.42, 1e-15);
}

TEST(Sample, LaplaceKolmogorovSmirnov) {
  const auto d = laplace01();
  const auto xs = draw(d, 100000, 2024);
  const auto ks = ks_one_sample(xs, [&](double x) { return d.cdf(x); },
                                [&](double x) { return d.cdf_left(x); });
  EXPECT_LT(ks.statistic, 0.01);
  EXPECT_TRUE(ks.passes(1e-3));
}

TEST(Unimodal, Examples) {
  EXPECT_TRUE(check_unimodal(laplace01()).is_unimodal_at_zero);
  EXPECT_TRUE(check_unimodal(exponential1()).is_unimodal_at_zero);
  const auto bad = Distribution1D::mixture({{1.0, 0.5}}, Uniform{0.0, 1.0}, 0.5);
  const auto r = check_unimodal(bad);
  EXPECT_FALSE(r.is_unimodal_at_zero);
  EXPECT_TRUE(r.atom_violation);
}

TEST(Unimodal, DetectsDensityBreach) {
  const auto d = Distribution1D::from_family(Tabulated({-1.0, 0.0, 1.0, 2.0}, {1.0, 1.0, 2.0}));
  const auto r = check_unimodal(d);
  EXPECT_FALSE(r.is_unimodal_at_zero);
  EXPECT_GT(r.max_violation, 0.1);
  EXPECT_FALSE(r.atom_violation);
}

TEST(Unimodal, ReportInvariant) {
  for (const auto& d : zoo()) {
    const auto r = check_unimodal(d, 1e-9);
    EXPECT_EQ(r.is_unimodal_at_zero, r.max_violation <= 1e-9 && !r.atom_violation);
  }
}

TEST(Unimodal, InvariantUnderShiftWithRecentering) {
  for (const auto& d : zoo()) {
    for (double a : {-2.0, 0.7}) {
      EXPECT_EQ(check_unimodal(d).is_unimodal_at_zero,
                check_unimodal(shift(d, a), 1e-9, a).is_unimodal_at_zero)
          << describe(d);
    }
  }
}

TEST(Lattice, DetectsSpan) {
  double span = 0.0;
  EXPECT_TRUE(is_lattice(Distribution1D::from_atoms({{-1.0, 0.5}, {1.0, 0.5}}), &span));
  EXPECT_DOUBLE_EQ(span, 2.0);
  EXPECT_FALSE(is_lattice(laplace01()));
}

TEST(Symmetry, Detects) {
  EXPECT_TRUE(is_symmetric_about(laplace01(), 0.0));
  EXPECT_FALSE(is_symmetric_about(exponential1(), 0.0));
  EXPECT_TRUE(is_symmetric_about(uniform01(), 0.5));
}

TEST(Unimodal, LatticeMassFunctions) {
  const auto ext = Distribution1D::from_atoms({{-1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}});
  EXPECT_TRUE(check_unimodal(ext).is_unimodal_at_zero);
  const auto dip = Distribution1D::from_atoms({{-2.0, 0.3}, {-1.0, 0.1}, {0.0, 0.6}});
  EXPECT_FALSE(check_unimodal(dip).is_unimodal_at_zero);
  const auto gap = Distribution1D::from_atoms({{-3.0, 0.2}, {-1.0, 0.1}, {0.0, 0.7}});
  EXPECT_FALSE(check_unimodal(gap).is_unimodal_at_zero);
  const auto off = Distribution1D::from_atoms({{-1.0, 0.5}, {1.0, 0.5}});
  EXPECT_FALSE(check_unimodal(off).is_unimodal_at_zero);
}
