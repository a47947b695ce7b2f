#pragma once

// Brute-force ground truth: exact min-cost transportation plans between
// finite discrete marginals.

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "coupled_levy/costs.hpp"
#include "coupled_levy/measures.hpp"

namespace coupled_levy {

struct TransportPlan {
  std::vector<double> row_support;
  std::vector<double> col_support;
  std::vector<std::vector<double>> plan;
  double value = 0.0;
  /// Smallest reduced cost at termination; >= -1e-10 certifies optimality.
  double min_reduced_cost = 0.0;
  std::size_t pivots = 0;
};

/// Minimizes sum plan[i][j] * cost[i][j] subject to row sums `rows` and column
/// sums `cols` with the transportation simplex (northwest-corner start,
/// Bland's rule, marginals perturbed by 1e-13 * index against degeneracy).
/// The reported plan solves the final basis for the unperturbed marginals.
TransportPlan solve_transport(const std::vector<double>& rows, const std::vector<double>& cols,
                              const std::vector<std::vector<double>>& cost);

/// Plan between purely atomic laws (at most 64 atoms each) for cost(|x - y|).
TransportPlan solve_transport(const Distribution1D& mu, const Distribution1D& nu,
                              const ConcaveCost& cost);

enum class TwoPointPlan { synchronous, reflection };

struct TwoPointResult {
  double f_value = 0.0;
  TwoPointPlan preferred = TwoPointPlan::synchronous;
  double synchronous_cost = 0.0;  // alpha^gamma
  double reflection_cost = 0.0;   // ((1 + alpha)^gamma + |1 - alpha|^gamma) / 2
};

/// {0, 1} versus {alpha, 1 + alpha}, equal weights, cost d^gamma.
/// f = (1 + alpha)^gamma + |1 - alpha|^gamma - 2 alpha^gamma.
TwoPointResult two_point_example(double gamma, double alpha);

/// The 2x2 instance of two_point_example solved by solve_transport.
TransportPlan two_point_plan(double gamma, double alpha);

/// Smallest alpha in (0, 1) where f changes sign (f > 0 below it).
double two_point_root(double gamma);

struct AmrOptimalityReport {
  double lp_value = 0.0;
  double amr_value = 0.0;
  double gap = 0.0;  // |amr - lp| / max(|lp|, 1e-300)
  std::size_t n_atoms = 0;
  std::size_t residual_atoms = 0;
  double min_reduced_cost = 0.0;
};

/// Discretizes F and shift(F, a) onto n_atoms equal-mass atoms each, placing
/// round(n_atoms * p) quantile atoms on each residual and the rest on the
/// normalized meet, so the discrete pair keeps the decomposition. Compares the
/// LP optimum with the cost of the AMR plan on the same atoms.
AmrOptimalityReport verify_amr_optimal(const Distribution1D& F, double a, const ConcaveCost& cost,
                                       std::size_t n_atoms);

/// Equal-mass quantile atoms at levels (i + 1/2) / n.
std::vector<double> quantile_atoms(const Distribution1D& d, std::size_t n);

/// min over step-by-step couplings of E[terminal(|X_n - Y_n|)] for a purely
/// atomic jump law, by dynamic programming over separations with one transport
/// LP per (step, separation).
double optimal_chain_value_lp(const Distribution1D& F, double a,
                              const std::function<double(double)>& terminal, std::size_t n);

std::string to_string(TwoPointPlan plan);

}  // namespace coupled_levy
