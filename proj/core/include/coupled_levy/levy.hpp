#pragma once

// Couplings of two compound Poisson processes in uniformized form: a shared
// clock of rate 2 lambda with extended jump law 1/2 delta_0 + 1/2 jump_law.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "coupled_levy/baselines.hpp"
#include "coupled_levy/costs.hpp"
#include "coupled_levy/coupling.hpp"
#include "coupled_levy/measures.hpp"
#include "coupled_levy/rng.hpp"
#include "coupled_levy/stats.hpp"

namespace coupled_levy {

struct CompoundPoissonSpec {
  double rate = 1.0;  // lambda, the total jump intensity
  Distribution1D jump_law;
  double x0 = 0.0;
  double y0 = 0.0;
  double horizon = 1.0;
};

/// Throws ConfigError for a nonpositive rate or horizon. For the AMR coupling
/// the extended law must be unimodal at 0 (PreconditionError otherwise); for
/// reflection the jump law must be symmetric.
void validate(const CompoundPoissonSpec& spec, CouplingKind kind);

struct Uniformized {
  double clock_rate = 0.0;
  Distribution1D extended_law;
};

Uniformized uniformize(const CompoundPoissonSpec& spec);

struct CoupledPath {
  std::vector<double> tick_times;
  std::vector<std::pair<double, double>> jumps;  // (dz1, dz2) per tick
  std::vector<std::pair<double, double>> states;  // (x, y) after each tick
  double x_end = 0.0;
  double y_end = 0.0;
  double separation = 0.0;  // y_end - x_end, without cancellation error
  std::optional<double> coalesced_at;
};

/// Poisson(mean) by sequential inversion of one uniform; large means use the
/// library sampler on the stream's engine.
std::uint64_t poisson_count(double mean, UniformStream& uniforms);

/// Simulator bound to one spec and coupling kind. Holds a per-instance cache
/// of shift couplings of the extended law, so use one instance per worker.
class PairSimulator {
 public:
  PairSimulator(const CompoundPoissonSpec& spec, CouplingKind kind);

  /// Simulates on [0, horizon]; `record` keeps tick times and jumps.
  CoupledPath run(UniformStream& uniforms, bool record = true);
  CoupledPath run(UniformStream& uniforms, double horizon, bool record);

  const Uniformized& uniformized() const { return uni_; }

 private:
  CompoundPoissonSpec spec_;
  CouplingKind kind_;
  Uniformized uni_;
  ShiftCouplingCache cache_;
};

CoupledPath simulate_pair(const CompoundPoissonSpec& spec, CouplingKind kind,
                          UniformStream& uniforms);

/// Plain (non-uniformized) compound Poisson(rate, jump_law) increment over
/// [0, horizon].
double simulate_increment(const CompoundPoissonSpec& spec, UniformStream& uniforms);

/// MC mean and SE of cost(|x_end - y_end|) per cost, all costs evaluated on the
/// same paths. Replica r uses stream (seed, cell, r).
std::vector<Estimate> estimate_costs(const CompoundPoissonSpec& spec, CouplingKind kind,
                                     const std::vector<ConcaveCost>& costs, std::size_t replicas,
                                     std::uint64_t seed, std::uint64_t cell = 0);
Estimate estimate_cost(const CompoundPoissonSpec& spec, CouplingKind kind, const ConcaveCost& cost,
                       std::size_t replicas, std::uint64_t seed, std::uint64_t cell = 0);

struct ConditionalRow {
  std::size_t ticks = 0;
  std::size_t paths = 0;
  Estimate mc;
  double chain_value = 0.0;
  double poisson_weight = 0.0;
  bool agrees = false;  // |mc - chain| <= 3 SE + grid tolerance
};

struct ConditionalReport {
  std::vector<ConditionalRow> rows;  // tick counts 0..3
  Estimate overall;
  double poissonized = 0.0;  // sum over n of chain value times Poisson weight
  std::size_t truncation = 0;
  bool agrees = false;
};

/// Groups AMR paths by their tick count and compares conditional costs with
/// the n-step chain value on the extended law.
ConditionalReport conditional_count_check(const CompoundPoissonSpec& spec, const ConcaveCost& cost,
                                          std::size_t replicas, std::uint64_t seed);

struct MarginalReport {
  KsResult x;  // coupled X increment versus plain simulation
  KsResult y;  // coupled Y increment versus plain simulation
  bool passes = false;
};

MarginalReport marginal_law_check(const CompoundPoissonSpec& spec, CouplingKind kind,
                                  std::size_t replicas, std::uint64_t seed, double level = 1e-3);

struct ExtendedJumpReport {
  std::uint64_t ticks = 0;
  std::uint64_t zero_jumps = 0;
  double atom_p_value = 0.0;    // binomial test of P[dz = 0] = 1/2 + jump-law atom / 2
  KsResult continuous;          // nonzero jumps versus the jump law
  ChiSquareResult tick_counts;  // counts versus Poisson(2 lambda t)
  double count_jump_correlation = 0.0;
  double correlation_se = 0.0;
  bool passes(double level) const;
};

/// Statistics of the first coordinate's extended jumps under `kind`.
ExtendedJumpReport extended_jump_check(const CompoundPoissonSpec& spec, CouplingKind kind,
                                       std::size_t replicas, std::uint64_t seed);

enum class Intensity { independent, synchronous };

struct DiagnosticReport {
  ExtendedJumpReport first;
  ExtendedJumpReport second;
  bool passes(double level) const { return first.passes(level) && second.passes(level); }
};

/// Rebuilds the uniformized representation of two processes simulated on their
/// own clocks (independent: disjoint clocks, so each tick moves one process;
/// synchronous: one shared clock plus empty ticks at rate lambda) and checks
/// the extended-jump statistics of both coordinates.
DiagnosticReport uniformization_diagnostic(const CompoundPoissonSpec& spec, Intensity eta,
                                           std::size_t replicas, std::uint64_t seed);

struct SurvivalPoint {
  double t = 0.0;
  double survival = 0.0;
  double std_error = 0.0;
  double tv = 0.0;
  bool agrees = false;
};

/// Exact total variation between the time-t laws started at x0 and y0 for a
/// lattice jump law. Throws PreconditionError for non-lattice laws.
double lattice_tv(const CompoundPoissonSpec& spec, double t);

/// Survival of the AMR coupling against the exact total variation at each t.
std::vector<SurvivalPoint> coalescence_vs_tv(const CompoundPoissonSpec& spec,
                                             const std::vector<double>& times,
                                             std::size_t replicas, std::uint64_t seed);

struct CrossingReport {
  std::size_t paths = 0;
  std::size_t coalesced = 0;
  std::size_t violations = 0;
};

/// For x0 < y0: on every path, coalescence happens exactly at the first tick
/// where the lower path reaches or passes the upper one, and they agree after.
CrossingReport crossing_check(const CompoundPoissonSpec& spec, std::size_t paths,
                              std::uint64_t seed);

}  // namespace coupled_levy
