#include "coupled_levy/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "coupled_levy/error.hpp"

namespace coupled_levy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

ConcaveCost::ConcaveCost(Form form) : form_(std::move(form)) {
  std::visit(Overloaded{
                 [](const PowerCost& c) {
                   if (!(c.p > 0.0 && c.p < 1.0)) throw ConfigError("power cost needs p in (0,1)");
                 },
                 [](const CappedCost& c) {
                   if (!(c.c > 0.0)) throw ConfigError("capped cost needs c > 0");
                 },
                 [](const BoundedExpCost&) {},
                 [](const BandCombination& b) {
                   for (const auto& band : b.bands) {
                     if (!(band.lambda > 0.0 && band.c > 0.0)) {
                       throw ConfigError("band weights and widths must be positive");
                     }
                   }
                 },
             },
             form_);
}

double ConcaveCost::operator()(double d) const {
  if (!(d >= 0.0)) throw DomainError("cost argument must be a nonnegative distance");
  return std::visit(Overloaded{
                        [d](const PowerCost& c) { return std::pow(d, c.p); },
                        [d](const CappedCost& c) { return std::min(d, c.c); },
                        [d](const BoundedExpCost&) { return -std::expm1(-d); },
                        [d](const BandCombination& b) {
                          double v = 0.0;
                          for (const auto& band : b.bands) v += band.lambda * std::min(d, band.c);
                          return v;
                        },
                    },
                    form_);
}

double ConcaveCost::slope(double d) const {
  if (!(d >= 0.0)) throw DomainError("cost argument must be a nonnegative distance");
  return std::visit(Overloaded{
                        [d](const PowerCost& c) {
                          return d == 0.0 ? kInf : c.p * std::pow(d, c.p - 1.0);
                        },
                        [d](const CappedCost& c) { return d < c.c ? 1.0 : 0.0; },
                        [d](const BoundedExpCost&) { return std::exp(-d); },
                        [d](const BandCombination& b) {
                          double s = 0.0;
                          for (const auto& band : b.bands) {
                            if (d < band.c) s += band.lambda;
                          }
                          return s;
                        },
                    },
                    form_);
}

bool ConcaveCost::bounded() const { return !std::holds_alternative<PowerCost>(form_); }

double ConcaveCost::bound() const {
  return std::visit(Overloaded{
                        [](const PowerCost&) { return kInf; },
                        [](const CappedCost& c) { return c.c; },
                        [](const BoundedExpCost&) { return 1.0; },
                        [](const BandCombination& b) {
                          double v = 0.0;
                          for (const auto& band : b.bands) v += band.lambda * band.c;
                          return v;
                        },
                    },
                    form_);
}

double ConcaveCost::payoff_bound(double d_max) const {
  if (bounded()) return bound();
  if (!(d_max > 0.0) || !std::isfinite(d_max)) {
    throw DomainError("an unbounded cost needs a finite positive d_max for its payoff");
  }
  return (*this)(d_max);
}

double ConcaveCost::payoff(double d, double d_max) const {
  if (const auto* b = std::get_if<BandCombination>(&form_)) {
    return band_combination_payoff(*b, d);
  }
  return payoff_bound(d_max) - (*this)(d);
}

std::string ConcaveCost::name() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const PowerCost& c) { os << "power(" << c.p << ")"; },
                 [&](const CappedCost& c) { os << "capped(" << c.c << ")"; },
                 [&](const BoundedExpCost&) { os << "bounded_exp"; },
                 [&](const BandCombination& b) { os << "bands(" << b.bands.size() << ")"; },
             },
             form_);
  return os.str();
}

double band_combination_payoff(const BandCombination& bands, double d) {
  if (!(d >= 0.0)) throw DomainError("payoff argument must be a nonnegative distance");
  double v = 0.0;
  for (const auto& band : bands.bands) v += band.lambda * std::max(band.c - d, 0.0);
  return v;
}

BandApproximation band_approximation(const ConcaveCost& cost, std::size_t n, double d_max) {
  if (n == 0) throw DomainError("band_approximation needs n >= 1");
  if (!(d_max > 0.0) || !std::isfinite(d_max)) {
    throw DomainError("band_approximation needs a finite positive d_max");
  }
  const double B = cost.payoff_bound(d_max);
  auto payoff = [&](double d) { return B - cost(d); };

  // Tangent lines y = v + s (d - x) with s = -phi'(x+) <= 0.
  struct Line {
    double x, v, s;
  };
  std::vector<Line> lines;
  for (std::size_t k = 0; k < n; ++k) {
    const double x =
        d_max * (1.0 - std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n))) /
        2.0;
    const double s = -cost.slope(x);
    if (!std::isfinite(s)) continue;
    lines.push_back({x, payoff(x), s});
  }

  // Upper envelope of the tangents and zero, as a convex piecewise-linear
  // function: walk from d = 0 to the right, switching to the line that stays
  // on top at each intersection.
  auto value = [](const Line& l, double d) { return l.v + l.s * (d - l.x); };
  BandApproximation out;
  if (!lines.empty()) {
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.s < b.s; });
    std::vector<std::pair<double, double>> kinks;  // (location, slope increase)
    std::size_t cur = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (value(lines[i], 0.0) > value(lines[cur], 0.0)) cur = i;
    }
    double d = 0.0;
    while (true) {
      const Line& L = lines[cur];
      // Next line (flatter slope) overtaking L, or the zero line.
      double best_t = L.s < 0.0 ? L.x - L.v / L.s : kInf;
      std::size_t next = lines.size();
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!(lines[i].s > L.s)) continue;
        const double t = (lines[i].v - lines[i].s * lines[i].x - L.v + L.s * L.x) / (L.s - lines[i].s);
        if (t > d && t < best_t) {
          best_t = t;
          next = i;
        }
      }
      if (!std::isfinite(best_t)) break;
      if (next == lines.size()) {
        if (best_t > 0.0) kinks.emplace_back(best_t, -L.s);
        break;
      }
      kinks.emplace_back(best_t, lines[next].s - L.s);
      d = best_t;
      cur = next;
    }
    for (const auto& [c, lambda] : kinks) {
      if (lambda > 0.0 && c > 0.0) out.bands.bands.push_back({lambda, c});
    }
  }

  double err = 0.0;
  constexpr int kGrid = 10000;
  for (int i = 0; i <= kGrid; ++i) {
    const double d = d_max * i / kGrid;
    err = std::max(err, payoff(d) - band_combination_payoff(out.bands, d));
  }
  out.sup_error = err;
  return out;
}

double integrability_proxy(const ConcaveCost& cost, const Distribution1D& d) {
  double total = 0.0;
  for (const auto& a : d.atoms()) total += a.p * cost(std::abs(a.x));
  if (d.has_density()) {
    const double lo = d.quantile_plus(1e-12);
    const double hi = d.quantile_plus(1.0 - 1e-12);
    auto f = [&](double x) { return cost(std::abs(x)) * d.pdf(x); };
    std::vector<double> cuts = d.breakpoints();
    cuts.push_back(lo);
    cuts.push_back(hi);
    cuts.push_back(0.0);
    std::erase_if(cuts, [&](double c) { return c < lo || c > hi; });
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i],
                                                                             cuts[i + 1], 10, 1e-9);
    }
  }
  return total;
}

}  // namespace coupled_levy
