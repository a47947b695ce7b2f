#pragma once

// Concave increasing transport costs phi with phi(0) = 0, and the dual convex
// nonincreasing payoffs B - phi(d). A band combination sum lambda_i min(d, c_i)
// has payoff sum lambda_i (c_i - d)^+.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "coupled_levy/measures.hpp"

namespace coupled_levy {

struct PowerCost {
  double p = 0.5;
};

struct CappedCost {
  double c = 1.0;
};

struct BoundedExpCost {};

struct Band {
  double lambda = 1.0;
  double c = 1.0;
};

struct BandCombination {
  std::vector<Band> bands;
};

class ConcaveCost {
 public:
  using Form = std::variant<PowerCost, CappedCost, BoundedExpCost, BandCombination>;

  explicit ConcaveCost(Form form);

  static ConcaveCost power(double p) { return ConcaveCost(PowerCost{p}); }
  static ConcaveCost capped(double c) { return ConcaveCost(CappedCost{c}); }
  static ConcaveCost bounded_exp() { return ConcaveCost(BoundedExpCost{}); }
  static ConcaveCost bands(std::vector<Band> bands) {
    return ConcaveCost(BandCombination{std::move(bands)});
  }

  const Form& form() const { return form_; }

  /// phi(d); throws DomainError for d < 0.
  double operator()(double d) const;
  /// Right derivative of phi at d (infinite for power costs at 0).
  double slope(double d) const;

  bool bounded() const;
  /// sup phi; infinite for power costs.
  double bound() const;

  /// B - phi(d) with B = bound() for bounded forms and B = phi(d_max) otherwise.
  double payoff(double d, double d_max = 0.0) const;
  double payoff_bound(double d_max = 0.0) const;

  /// Short label such as "power(0.5)" used in tables.
  std::string name() const;

 private:
  Form form_;
};

inline double evaluate(const ConcaveCost& cost, double d) { return cost(d); }

struct BandApproximation {
  BandCombination bands;
  double sup_error = 0.0;  // sup over [0, d_max] of payoff minus the band payoff
};

/// Bands whose payoff approximates the payoff of `cost` on [0, d_max] from
/// below: the positive part of the upper envelope of tangents at the nested
/// Chebyshev-Lobatto knots d_max (1 - cos(k pi / n)) / 2, k = 0..n-1.
/// Doubling n refines the knot set, so the error is nonincreasing.
BandApproximation band_approximation(const ConcaveCost& cost, std::size_t n, double d_max);

/// Payoff sum lambda_i (c_i - d)^+ of a band combination.
double band_combination_payoff(const BandCombination& bands, double d);

/// Numeric proxy for E[phi(|X|)] under d, over its effective range; infinite
/// or NaN values flag a cost that is not integrable against the law.
double integrability_proxy(const ConcaveCost& cost, const Distribution1D& d);

}  // namespace coupled_levy
