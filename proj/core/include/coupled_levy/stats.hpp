#pragma once

// Estimators and goodness-of-fit tests used by the simulation checks.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace coupled_levy {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Sample mean and standard error (unbiased variance).
Estimate estimate(std::span<const double> values);

/// Standard error of a difference of two independent estimates.
double combined_se(const Estimate& a, const Estimate& b);

/// Kolmogorov limiting survival function Q(l) = 2 sum (-1)^{k-1} exp(-2 k^2 l^2).
double kolmogorov_survival(double lambda);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool passes(double level) const { return p_value > level; }
};

/// One-sample test against a law given by its cdf and left limits; ties and
/// atoms are handled by comparing on both sides of every observed value.
KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf,
                       const std::function<double(double)>& cdf_left);

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Asymptotic two-sample critical value at the given level.
double ks_two_sample_critical(double level, std::size_t n, std::size_t m);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  bool passes(double level) const { return p_value > level; }
};

/// Goodness of fit of nonnegative integer counts to Poisson(mean). Tail bins
/// are pooled so that every expected count is at least 5.
ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> counts, double mean);

/// Two-sided binomial test of k successes in n trials against success
/// probability p (doubled smaller tail).
double binomial_two_sided_p(std::uint64_t k, std::uint64_t n, double p);

/// Pearson correlation of two equally long samples.
double correlation(std::span<const double> a, std::span<const double> b);

}  // namespace coupled_levy
