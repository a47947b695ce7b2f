#pragma once

// Step-by-step couplings of two copies of a random walk X_{k+1} = X_k + xi_k
// with a unimodal jump law. The AMR chain couples each step's increments by
// the AMR coupling of the jump law and its shift by the current separation.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "coupled_levy/baselines.hpp"
#include "coupled_levy/coupling.hpp"
#include "coupled_levy/measures.hpp"
#include "coupled_levy/rng.hpp"
#include "coupled_levy/stats.hpp"

namespace coupled_levy {

struct ChainSpec {
  Distribution1D jump_law;
  double x0 = 0.0;
  double y0 = 0.0;
  std::size_t steps = 0;
};

/// Throws PreconditionError when the jump law is not unimodal at 0.
void validate(const ChainSpec& spec);

struct ChainPath {
  std::vector<double> xs;
  std::vector<double> ys;
  std::optional<std::size_t> coalesced_at;
};

/// Separations that round to zero under the cache quantum count as coalesced.
ChainPath simulate_amr_chain(const ChainSpec& spec, UniformStream& uniforms,
                             ShiftCouplingCache& cache);
ChainPath simulate_amr_chain(const ChainSpec& spec, UniformStream& uniforms);

/// Same stepping scheme with a per-step baseline coupling (two uniforms per step).
ChainPath simulate_chain(const ChainSpec& spec, CouplingKind kind, UniformStream& uniforms,
                         ShiftCouplingCache& cache);

using Terminal = std::function<double(double)>;

/// Monte Carlo mean of terminal(|X_n - Y_n|) over independent replicas.
Estimate estimate_chain(const ChainSpec& spec, CouplingKind kind, const Terminal& terminal,
                        std::size_t replicas, std::uint64_t seed);

/// sup over couplings of E[(c - |X - Y|)^+] with X ~ F, Y ~ F + a.
double psi(const Distribution1D& F, double a, double c);

/// Tabulated function of the separation, piecewise linear between grid nodes
/// and flat outside them.
class PsiTable {
 public:
  PsiTable(std::vector<double> grid, std::vector<double> values);
  double operator()(double d) const;
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
};

/// Nodes on [0, a_max]: zero, a geometric run near zero, a dense linear run up
/// to a_bulk, then a sparse linear run (one eighth of the points) to a_max.
std::vector<double> difference_grid(double a_max, std::size_t points, double a_bulk = 0.0);

/// E[f(Y - X)] for one AMR step from separation a > 0 (Y - X >= 0 on every
/// branch). Purely atomic laws are summed exactly; otherwise the uncoupled
/// branch is integrated over the driving uniform with Gauss-Legendre panels
/// split wherever a coordinate sits on an atom.
double amr_step_expectation(const AmrCoupling& c, double a, const Terminal& f);

/// Value iteration psi_k(d) = E[psi_{k-1}(new separation)] under the AMR step,
/// starting from psi_0 = terminal. The table holds psi_{n-1}; the returned
/// value at `a` is one step on top of it, taken on the exact terminal when
/// n = 1.
struct PsiN {
  double value = 0.0;
  PsiTable table;
};
PsiN psi_n_detail(const Distribution1D& F, double a, const Terminal& terminal, std::size_t n,
                  std::size_t grid_points = 512);
double psi_n(const Distribution1D& F, double a, const Terminal& terminal, std::size_t n,
             std::size_t grid_points = 512);

/// psi_k(a) for k = 0..n_max from a single value iteration.
std::vector<double> psi_values(const Distribution1D& F, double a, const Terminal& terminal,
                               std::size_t n_max, std::size_t grid_points = 512);

/// E[terminal(|X_n - Y_n|)] under the AMR chain for a purely atomic jump law,
/// computed by exact recursion over reachable separations.
double amr_chain_value_exact(const Distribution1D& F, double a, const Terminal& terminal,
                             std::size_t n);

/// Largest separation that a chain of n steps reaches with mass above tail.
double chain_reach(const Distribution1D& F, double a, std::size_t n, double tail = 1e-10);

}  // namespace coupled_levy
