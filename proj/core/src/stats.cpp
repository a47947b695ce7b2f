#include "coupled_levy/stats.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "coupled_levy/error.hpp"

namespace coupled_levy {

Estimate estimate(std::span<const double> values) {
  Estimate e;
  e.n = values.size();
  if (e.n == 0) return e;
  // Two-pass form keeps the variance accurate for nearly constant samples.
  double sum = 0.0;
  for (double v : values) sum += v;
  e.mean = sum / static_cast<double>(e.n);
  if (e.n < 2) return e;
  double ss = 0.0;
  for (double v : values) ss += (v - e.mean) * (v - e.mean);
  const double var = ss / static_cast<double>(e.n - 1);
  e.std_error = std::sqrt(var / static_cast<double>(e.n));
  return e;
}

double combined_se(const Estimate& a, const Estimate& b) {
  return std::hypot(a.std_error, b.std_error);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf,
                       const std::function<double(double)>& cdf_left) {
  if (samples.empty()) throw DomainError("KS test needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    const double before = static_cast<double>(i) / n;
    const double after = static_cast<double>(j) / n;
    d = std::max(d, std::abs(after - cdf(samples[i])));
    d = std::max(d, std::abs(before - cdf_left(samples[i])));
    i = j;
  }
  const double rn = std::sqrt(n);
  return {d, kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d)};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw DomainError("KS test needs samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double en = std::sqrt(n * m / (n + m));
  return {d, kolmogorov_survival((en + 0.12 + 0.11 / en) * d)};
}

double ks_two_sample_critical(double level, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(level / 2.0));
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> counts, double mean) {
  if (counts.empty()) throw DomainError("chi-square test needs counts");
  std::uint64_t kmax = 0;
  for (auto c : counts) kmax = std::max(kmax, c);
  std::vector<double> observed(kmax + 1, 0.0);
  for (auto c : counts) observed[c] += 1.0;
  const double total = static_cast<double>(counts.size());
  const boost::math::poisson_distribution<double> law(mean);

  // Bin k collects P[N = k]; the last bin collects the upper tail.
  std::vector<double> expected(kmax + 1);
  for (std::uint64_t k = 0; k <= kmax; ++k) {
    expected[k] = total * boost::math::pdf(law, static_cast<double>(k));
  }
  expected[kmax] =
      kmax == 0 ? total
                : total * boost::math::cdf(boost::math::complement(law, static_cast<double>(kmax - 1)));

  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double obs = 0.0;
  double exp = 0.0;
  for (std::uint64_t k = 0; k <= kmax; ++k) {
    obs += observed[k];
    exp += expected[k];
    if (exp >= 5.0) {
      bins.emplace_back(obs, exp);
      obs = exp = 0.0;
    }
  }
  if (exp > 0.0 || obs > 0.0) {
    if (bins.empty()) {
      bins.emplace_back(obs, exp);
    } else {
      bins.back().first += obs;
      bins.back().second += exp;
    }
  }
  ChiSquareResult r;
  for (const auto& [o, e] : bins) r.statistic += (o - e) * (o - e) / e;
  r.dof = bins.size() > 1 ? bins.size() - 1 : 1;
  const boost::math::chi_squared_distribution<double> chi(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(chi, r.statistic));
  return r;
}

double binomial_two_sided_p(std::uint64_t k, std::uint64_t n, double p) {
  const boost::math::binomial_distribution<double> law(static_cast<double>(n), p);
  const double lower = boost::math::cdf(law, static_cast<double>(k));
  const double upper =
      k == 0 ? 1.0 : boost::math::cdf(boost::math::complement(law, static_cast<double>(k) - 1.0));
  return std::min(1.0, 2.0 * std::min(lower, upper));
}

double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw DomainError("correlation needs paired samples");
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace coupled_levy
