#pragma once

// Closed-form and tabulated probability densities on the real line. Every
// family is normalized; weights are applied by the owning Distribution1D.

#include <memory>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace coupled_levy {

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

struct Triangular {
  double lo = -1.0;
  double mode = 0.0;
  double hi = 1.0;
};

struct Laplace {
  double mu = 0.0;
  double scale = 1.0;
};

struct Exponential {
  double rate = 1.0;
  double loc = 0.0;
};

struct Gaussian {
  double mu = 0.0;
  double sigma = 1.0;
};

/// Piecewise-constant density on a strictly increasing grid. Heights are
/// normalized on construction so that the density integrates to one.
class Tabulated {
 public:
  Tabulated(std::vector<double> grid, std::vector<double> values);

  std::span<const double> grid() const { return data_->grid; }
  std::span<const double> values() const { return data_->values; }
  double offset() const { return offset_; }

  Tabulated shifted(double a) const;

  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double z, bool plus) const;
  double lo() const { return data_->grid.front() + offset_; }
  double hi() const { return data_->grid.back() + offset_; }

 private:
  struct Data {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> cum;  // cum[i] = mass of cells before i
  };
  Tabulated(std::shared_ptr<const Data> data, double offset)
      : data_(std::move(data)), offset_(offset) {}

  std::shared_ptr<const Data> data_;
  double offset_ = 0.0;
};

using DensityFamily =
    std::variant<Uniform, Triangular, Laplace, Exponential, Gaussian, Tabulated>;

double family_pdf(const DensityFamily& f, double x);
double family_cdf(const DensityFamily& f, double x);
/// Upper tail 1 - F(x), evaluated without cancellation where the family allows.
double family_ccdf(const DensityFamily& f, double x);
/// Substitute inverse. `plus` selects inf{x: F(x) > z}, otherwise inf{x: F(x) >= z};
/// the two differ only for tabulated densities with empty cells.
double family_quantile(const DensityFamily& f, double z, bool plus = true);
DensityFamily family_shift(const DensityFamily& f, double a);

/// Closed support (may be infinite).
std::pair<double, double> family_support(const DensityFamily& f);
/// Finite interval carrying all but a negligible (< 1e-300) amount of mass.
std::pair<double, double> family_effective_range(const DensityFamily& f);
/// Points where the density is not smooth: support ends, modes, grid nodes.
std::vector<double> family_kinks(const DensityFamily& f);

/// Mode (or a point of the modal interval) of the family.
double family_mode(const DensityFamily& f);
/// True when the density is symmetric about `family_mode`.
bool family_is_symmetric(const DensityFamily& f);

const char* family_name(const DensityFamily& f);

}  // namespace coupled_levy
