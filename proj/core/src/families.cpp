#include "coupled_levy/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/erf.hpp>

#include "coupled_levy/error.hpp"

namespace coupled_levy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// exp(-745) underflows to zero in double precision.
constexpr double kExpTail = 745.0;
constexpr double kGaussTail = 39.0;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double clamp01(double z) { return std::clamp(z, 0.0, 1.0); }

}  // namespace

// ---------------------------------------------------------------------------
// Tabulated

Tabulated::Tabulated(std::vector<double> grid, std::vector<double> values) {
  if (grid.size() < 2 || values.size() + 1 != grid.size()) {
    throw ConfigError("tabulated density needs grid of size n+1 for n values");
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1])) {
      throw ConfigError("tabulated density grid must be strictly increasing");
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw ConfigError("tabulated density values must be finite and >= 0");
    }
    total += values[i] * (grid[i + 1] - grid[i]);
  }
  if (!(total > 0.0)) {
    throw ConfigError("tabulated density has zero mass");
  }
  auto data = std::make_shared<Data>();
  data->grid = std::move(grid);
  data->values = std::move(values);
  data->cum.resize(data->values.size() + 1, 0.0);
  for (double& v : data->values) v /= total;
  for (std::size_t i = 0; i < data->values.size(); ++i) {
    data->cum[i + 1] =
        data->cum[i] + data->values[i] * (data->grid[i + 1] - data->grid[i]);
  }
  data->cum.back() = 1.0;
  data_ = std::move(data);
}

Tabulated Tabulated::shifted(double a) const { return Tabulated(data_, offset_ + a); }

double Tabulated::pdf(double x) const {
  const auto& g = data_->grid;
  const double y = x - offset_;
  if (y < g.front() || y >= g.back()) return 0.0;
  const auto it = std::upper_bound(g.begin(), g.end(), y);
  return data_->values[static_cast<std::size_t>(it - g.begin()) - 1];
}

double Tabulated::cdf(double x) const {
  const auto& g = data_->grid;
  const double y = x - offset_;
  if (y <= g.front()) return 0.0;
  if (y >= g.back()) return 1.0;
  const auto it = std::upper_bound(g.begin(), g.end(), y);
  const std::size_t i = static_cast<std::size_t>(it - g.begin()) - 1;
  return std::min(1.0, data_->cum[i] + data_->values[i] * (y - g[i]));
}

double Tabulated::quantile(double z, bool plus) const {
  const auto& g = data_->grid;
  const auto& cum = data_->cum;
  if (z <= 0.0) return plus ? lo() : lo();
  if (z >= 1.0) return hi();
  // First cell whose cumulative mass at its right end exceeds (or reaches) z.
  std::size_t i = 0;
  if (plus) {
    i = static_cast<std::size_t>(std::upper_bound(cum.begin() + 1, cum.end(), z) -
                                 cum.begin()) - 1;
  } else {
    i = static_cast<std::size_t>(std::lower_bound(cum.begin() + 1, cum.end(), z) -
                                 cum.begin()) - 1;
  }
  i = std::min(i, data_->values.size() - 1);
  const double v = data_->values[i];
  double y = g[i];
  if (v > 0.0) {
    y = g[i] + (z - cum[i]) / v;
    y = std::clamp(y, g[i], g[i + 1]);
  }
  return y + offset_;
}

// ---------------------------------------------------------------------------
// Dispatch

double family_pdf(const DensityFamily& f, double x) {
  return std::visit(
      Overloaded{
          [x](const Uniform& u) {
            return (x >= u.lo && x < u.hi) ? 1.0 / (u.hi - u.lo) : 0.0;
          },
          [x](const Triangular& t) {
            if (x < t.lo || x >= t.hi) return 0.0;
            const double w = t.hi - t.lo;
            if (x < t.mode) return 2.0 * (x - t.lo) / (w * (t.mode - t.lo));
            if (t.hi == t.mode) return 2.0 / w;
            return 2.0 * (t.hi - x) / (w * (t.hi - t.mode));
          },
          [x](const Laplace& l) {
            return std::exp(-std::abs(x - l.mu) / l.scale) / (2.0 * l.scale);
          },
          [x](const Exponential& e) {
            return x < e.loc ? 0.0 : e.rate * std::exp(-e.rate * (x - e.loc));
          },
          [x](const Gaussian& g) {
            const double s = (x - g.mu) / g.sigma;
            return std::exp(-0.5 * s * s) / (g.sigma * std::sqrt(2.0 * M_PI));
          },
          [x](const Tabulated& t) { return t.pdf(x); },
      },
      f);
}

double family_cdf(const DensityFamily& f, double x) {
  return std::visit(
      Overloaded{
          [x](const Uniform& u) {
            if (x <= u.lo) return 0.0;
            if (x >= u.hi) return 1.0;
            return (x - u.lo) / (u.hi - u.lo);
          },
          [x](const Triangular& t) {
            if (x <= t.lo) return 0.0;
            if (x >= t.hi) return 1.0;
            const double w = t.hi - t.lo;
            if (x <= t.mode) return (x - t.lo) * (x - t.lo) / (w * (t.mode - t.lo));
            return 1.0 - (t.hi - x) * (t.hi - x) / (w * (t.hi - t.mode));
          },
          [x](const Laplace& l) {
            const double s = (x - l.mu) / l.scale;
            return s < 0.0 ? 0.5 * std::exp(s) : 1.0 - 0.5 * std::exp(-s);
          },
          [x](const Exponential& e) {
            return x <= e.loc ? 0.0 : -std::expm1(-e.rate * (x - e.loc));
          },
          [x](const Gaussian& g) {
            return 0.5 * std::erfc(-(x - g.mu) / (g.sigma * M_SQRT2));
          },
          [x](const Tabulated& t) { return t.cdf(x); },
      },
      f);
}

double family_ccdf(const DensityFamily& f, double x) {
  return std::visit(
      Overloaded{
          [x](const Laplace& l) {
            const double s = (x - l.mu) / l.scale;
            return s < 0.0 ? 1.0 - 0.5 * std::exp(s) : 0.5 * std::exp(-s);
          },
          [x](const Exponential& e) {
            return x <= e.loc ? 1.0 : std::exp(-e.rate * (x - e.loc));
          },
          [x](const Gaussian& g) {
            return 0.5 * std::erfc((x - g.mu) / (g.sigma * M_SQRT2));
          },
          [&f, x](const auto&) { return 1.0 - family_cdf(f, x); },
      },
      f);
}

double family_quantile(const DensityFamily& f, double z, bool plus) {
  if (std::isnan(z)) throw DomainError("quantile level is NaN");
  z = clamp01(z);
  return std::visit(
      Overloaded{
          [z](const Uniform& u) { return u.lo + z * (u.hi - u.lo); },
          [z](const Triangular& t) {
            const double w = t.hi - t.lo;
            const double split = (t.mode - t.lo) / w;
            if (z <= split) return t.lo + std::sqrt(z * w * (t.mode - t.lo));
            return t.hi - std::sqrt((1.0 - z) * w * (t.hi - t.mode));
          },
          [z](const Laplace& l) {
            if (z <= 0.0) return -kInf;
            if (z >= 1.0) return kInf;
            return z < 0.5 ? l.mu + l.scale * std::log(2.0 * z)
                           : l.mu - l.scale * std::log(2.0 * (1.0 - z));
          },
          [z](const Exponential& e) {
            if (z >= 1.0) return kInf;
            return e.loc - std::log1p(-z) / e.rate;
          },
          [z](const Gaussian& g) {
            if (z <= 0.0) return -kInf;
            if (z >= 1.0) return kInf;
            return g.mu - g.sigma * M_SQRT2 * boost::math::erfc_inv(2.0 * z);
          },
          [z, plus](const Tabulated& t) { return t.quantile(z, plus); },
      },
      f);
}

DensityFamily family_shift(const DensityFamily& f, double a) {
  return std::visit(
      Overloaded{
          [a](const Uniform& u) -> DensityFamily { return Uniform{u.lo + a, u.hi + a}; },
          [a](const Triangular& t) -> DensityFamily {
            return Triangular{t.lo + a, t.mode + a, t.hi + a};
          },
          [a](const Laplace& l) -> DensityFamily { return Laplace{l.mu + a, l.scale}; },
          [a](const Exponential& e) -> DensityFamily {
            return Exponential{e.rate, e.loc + a};
          },
          [a](const Gaussian& g) -> DensityFamily { return Gaussian{g.mu + a, g.sigma}; },
          [a](const Tabulated& t) -> DensityFamily { return t.shifted(a); },
      },
      f);
}

std::pair<double, double> family_support(const DensityFamily& f) {
  return std::visit(
      Overloaded{
          [](const Uniform& u) { return std::pair{u.lo, u.hi}; },
          [](const Triangular& t) { return std::pair{t.lo, t.hi}; },
          [](const Laplace&) { return std::pair{-kInf, kInf}; },
          [](const Exponential& e) { return std::pair{e.loc, kInf}; },
          [](const Gaussian&) { return std::pair{-kInf, kInf}; },
          [](const Tabulated& t) { return std::pair{t.lo(), t.hi()}; },
      },
      f);
}

std::pair<double, double> family_effective_range(const DensityFamily& f) {
  return std::visit(
      Overloaded{
          [](const Laplace& l) {
            return std::pair{l.mu - kExpTail * l.scale, l.mu + kExpTail * l.scale};
          },
          [](const Exponential& e) {
            return std::pair{e.loc, e.loc + kExpTail / e.rate};
          },
          [](const Gaussian& g) {
            return std::pair{g.mu - kGaussTail * g.sigma, g.mu + kGaussTail * g.sigma};
          },
          [&f](const auto&) { return family_support(f); },
      },
      f);
}

std::vector<double> family_kinks(const DensityFamily& f) {
  return std::visit(
      Overloaded{
          [](const Uniform& u) { return std::vector<double>{u.lo, u.hi}; },
          [](const Triangular& t) { return std::vector<double>{t.lo, t.mode, t.hi}; },
          [](const Laplace& l) { return std::vector<double>{l.mu}; },
          [](const Exponential& e) { return std::vector<double>{e.loc}; },
          [](const Gaussian& g) { return std::vector<double>{g.mu}; },
          [](const Tabulated& t) {
            std::vector<double> out(t.grid().begin(), t.grid().end());
            for (double& x : out) x += t.offset();
            return out;
          },
      },
      f);
}

double family_mode(const DensityFamily& f) {
  return std::visit(
      Overloaded{
          [](const Uniform& u) { return 0.5 * (u.lo + u.hi); },
          [](const Triangular& t) { return t.mode; },
          [](const Laplace& l) { return l.mu; },
          [](const Exponential& e) { return e.loc; },
          [](const Gaussian& g) { return g.mu; },
          [](const Tabulated& t) {
            const auto v = t.values();
            const auto it = std::max_element(v.begin(), v.end());
            const auto i = static_cast<std::size_t>(it - v.begin());
            return 0.5 * (t.grid()[i] + t.grid()[i + 1]) + t.offset();
          },
      },
      f);
}

bool family_is_symmetric(const DensityFamily& f) {
  return std::visit(
      Overloaded{
          [](const Uniform&) { return true; },
          [](const Triangular& t) {
            return std::abs((t.mode - t.lo) - (t.hi - t.mode)) <=
                   1e-12 * (t.hi - t.lo);
          },
          [](const Laplace&) { return true; },
          [](const Exponential&) { return false; },
          [](const Gaussian&) { return true; },
          [](const Tabulated& t) {
            const auto g = t.grid();
            const auto v = t.values();
            const std::size_t n = v.size();
            const double scale = g.back() - g.front();
            for (std::size_t i = 0; i < n; ++i) {
              const double left = g[i + 1] - g[i];
              const double right = g[n - i] - g[n - i - 1];
              if (std::abs(left - right) > 1e-12 * scale) return false;
              if (std::abs(v[i] - v[n - 1 - i]) > 1e-12 * (v[i] + v[n - 1 - i])) {
                return false;
              }
            }
            return true;
          },
      },
      f);
}

const char* family_name(const DensityFamily& f) {
  return std::visit(Overloaded{
                        [](const Uniform&) { return "uniform"; },
                        [](const Triangular&) { return "triangular"; },
                        [](const Laplace&) { return "laplace"; },
                        [](const Exponential&) { return "exponential"; },
                        [](const Gaussian&) { return "gaussian"; },
                        [](const Tabulated&) { return "tabulated"; },
                    },
                    f);
}

}  // namespace coupled_levy
