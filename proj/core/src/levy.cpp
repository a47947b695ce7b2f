#include "coupled_levy/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>

#include <boost/math/distributions/poisson.hpp>

#include "coupled_levy/chains.hpp"
#include "coupled_levy/error.hpp"
#include "coupled_levy/parallel.hpp"

namespace coupled_levy {

void validate(const CompoundPoissonSpec& spec, CouplingKind kind) {
  if (!(spec.rate > 0.0) || !std::isfinite(spec.rate)) throw ConfigError("rate must be positive");
  if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon)) {
    throw ConfigError("horizon must be positive");
  }
  if (kind == CouplingKind::amr) {
    const auto report = check_unimodal(uniformize(spec).extended_law);
    if (!report.is_unimodal_at_zero) {
      throw PreconditionError("extended jump law is not unimodal at 0", report.max_violation);
    }
  }
  if (kind == CouplingKind::reflection) require_symmetric(spec.jump_law);
}

Uniformized uniformize(const CompoundPoissonSpec& spec) {
  return {2.0 * spec.rate, mix_with_dirac(spec.jump_law, 0.5)};
}

std::uint64_t poisson_count(double mean, UniformStream& uniforms) {
  if (!(mean > 0.0)) return 0;
  if (mean > 600.0) {
    std::poisson_distribution<std::uint64_t> law(mean);
    return law(uniforms.engine());
  }
  const double u = uniforms.next();
  std::uint64_t k = 0;
  double term = std::exp(-mean);
  double cum = term;
  while (u > cum && term > 0.0) {
    ++k;
    term *= mean / static_cast<double>(k);
    cum += term;
  }
  return k;
}

PairSimulator::PairSimulator(const CompoundPoissonSpec& spec, CouplingKind kind)
    : spec_(spec), kind_(kind), uni_(uniformize(spec)), cache_(uni_.extended_law) {
  validate(spec_, kind_);
}

CoupledPath PairSimulator::run(UniformStream& uniforms, bool record) {
  return run(uniforms, spec_.horizon, record);
}

CoupledPath PairSimulator::run(UniformStream& uniforms, double horizon, bool record) {
  const auto& law = uni_.extended_law;
  const bool two_uniforms = kind_ != CouplingKind::amr;
  const std::uint64_t n = poisson_count(uni_.clock_rate * horizon, uniforms);
  std::vector<double> times(n);
  for (auto& t : times) t = horizon * uniforms.next();
  std::sort(times.begin(), times.end());

  CoupledPath path;
  double x = spec_.x0;
  double y = spec_.y0;
  // y - x accumulated from jump differences, so equal jumps keep it exact.
  double sep = y - x;
  bool coalesced = false;
  if (cache_.quantize(std::abs(sep)) == 0.0) {
    y = x;
    sep = 0.0;
    coalesced = true;
    path.coalesced_at = 0.0;
  }
  const bool start_below = x < y;
  bool crossed = false;
  if (record) {
    path.tick_times = times;
    path.jumps.reserve(n);
    path.states.reserve(n);
  }

  for (std::uint64_t i = 0; i < n; ++i) {
    const double u1 = uniforms.next();
    const double u2 = two_uniforms ? uniforms.next() : 0.5;
    double dz1 = 0.0;
    double dz2 = 0.0;
    if (coalesced) {
      dz1 = dz2 = law.quantile_plus(u1);
    } else {
      const bool swapped = y < x;
      const double lo = swapped ? y : x;
      const double hi = swapped ? x : y;
      const double a = hi - lo;
      // Jumps of the lower and upper walkers.
      double d_lo = 0.0;
      double d_hi = 0.0;
      bool hit = false;
      switch (crossed ? CouplingKind::synchronous : kind_) {
        case CouplingKind::amr:
        case CouplingKind::basic: {
          const AmrCoupling& c = cache_.get(a);
          const double a_q = cache_.quantize(a);
          const CoupleSample s =
              kind_ == CouplingKind::amr ? c.sample(u1) : baseline_sample(kind_, c, u1, u2);
          d_lo = s.x;
          d_hi = s.y - a_q;
          hit = s.coupled;
          break;
        }
        case CouplingKind::synchronous:
          d_lo = d_hi = law.quantile_plus(u1);
          break;
        case CouplingKind::independent:
          d_lo = law.quantile_plus(u1);
          d_hi = law.quantile_plus(u2);
          break;
        case CouplingKind::reflection:
          d_lo = law.quantile_plus(u1);
          d_hi = law.quantile_plus(1.0 - u1);
          break;
      }
      if (hit || cache_.quantize(std::abs((hi + d_hi) - (lo + d_lo))) == 0.0) {
        d_hi = (lo + d_lo) - hi;
        coalesced = true;
        path.coalesced_at = times[i];
      }
      dz1 = swapped ? d_hi : d_lo;
      dz2 = swapped ? d_lo : d_hi;
      sep = coalesced ? 0.0 : sep + (dz2 - dz1);
    }
    x += dz1;
    y = coalesced ? x : y + dz2;
    if (!coalesced && (x < y) != start_below) crossed = true;
    if (record) {
      path.jumps.emplace_back(dz1, dz2);
      path.states.emplace_back(x, y);
    }
  }
  path.separation = sep;
  path.x_end = x;
  path.y_end = y;
  return path;
}

CoupledPath simulate_pair(const CompoundPoissonSpec& spec, CouplingKind kind,
                          UniformStream& uniforms) {
  PairSimulator sim(spec, kind);
  return sim.run(uniforms, true);
}

double simulate_increment(const CompoundPoissonSpec& spec, UniformStream& uniforms) {
  const std::uint64_t n = poisson_count(spec.rate * spec.horizon, uniforms);
  double total = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) total += sample(spec.jump_law, uniforms.next());
  return total;
}

namespace {

// Runs `body(sim, stream, r)` for every replica with one simulator per worker.
template <class Body>
void for_replicas(const CompoundPoissonSpec& spec, CouplingKind kind, std::size_t replicas,
                  std::uint64_t seed, std::uint64_t cell, Body body) {
  if (replicas == 0) throw DomainError("replicas must be positive");
  validate(spec, kind);
  std::vector<std::unique_ptr<PairSimulator>> sims(worker_count());
  parallel_for(replicas, [&](std::size_t begin, std::size_t end, std::size_t worker) {
    auto& sim = sims[worker];
    if (!sim) sim = std::make_unique<PairSimulator>(spec, kind);
    for (std::size_t r = begin; r < end; ++r) {
      UniformStream stream(seed, cell, r);
      body(*sim, stream, r);
    }
  });
}

void require_integrable(const ConcaveCost& cost, const Distribution1D& law) {
  if (cost.bounded()) return;
  const double proxy = integrability_proxy(cost, law);
  if (!std::isfinite(proxy)) {
    throw PreconditionError("cost is not integrable against the jump law", proxy);
  }
}

}  // namespace

std::vector<Estimate> estimate_costs(const CompoundPoissonSpec& spec, CouplingKind kind,
                                     const std::vector<ConcaveCost>& costs, std::size_t replicas,
                                     std::uint64_t seed, std::uint64_t cell) {
  for (const auto& c : costs) require_integrable(c, spec.jump_law);
  std::vector<std::vector<double>> values(costs.size(), std::vector<double>(replicas));
  for_replicas(spec, kind, replicas, seed, cell,
               [&](PairSimulator& sim, UniformStream& stream, std::size_t r) {
                 const auto path = sim.run(stream, false);
                 const double d = std::abs(path.separation);
                 for (std::size_t k = 0; k < costs.size(); ++k) values[k][r] = costs[k](d);
               });
  std::vector<Estimate> out;
  for (const auto& v : values) out.push_back(estimate(v));
  return out;
}

Estimate estimate_cost(const CompoundPoissonSpec& spec, CouplingKind kind, const ConcaveCost& cost,
                       std::size_t replicas, std::uint64_t seed, std::uint64_t cell) {
  return estimate_costs(spec, kind, {cost}, replicas, seed, cell).front();
}

ConditionalReport conditional_count_check(const CompoundPoissonSpec& spec, const ConcaveCost& cost,
                                          std::size_t replicas, std::uint64_t seed) {
  constexpr double kGridTolerance = 2e-3;
  require_integrable(cost, spec.jump_law);
  std::vector<std::size_t> ticks(replicas);
  std::vector<double> values(replicas);
  for_replicas(spec, CouplingKind::amr, replicas, seed, 0,
               [&](PairSimulator& sim, UniformStream& stream, std::size_t r) {
                 const auto path = sim.run(stream, true);
                 ticks[r] = path.tick_times.size();
                 values[r] = cost(std::abs(path.separation));
               });

  const auto uni = uniformize(spec);
  const double mean = uni.clock_rate * spec.horizon;
  const boost::math::poisson_distribution<double> law(mean);
  std::size_t truncation = 0;
  while (boost::math::cdf(boost::math::complement(law, static_cast<double>(truncation))) >= 1e-8) {
    ++truncation;
  }
  const double a = std::abs(spec.y0 - spec.x0);
  const Terminal phi = [&](double d) { return cost(d); };
  const auto chain = psi_values(uni.extended_law, a, phi, std::max<std::size_t>(truncation, 3));

  ConditionalReport report;
  report.truncation = truncation;
  report.overall = estimate(values);
  for (std::size_t n = 0; n <= truncation; ++n) {
    report.poissonized += chain[n] * boost::math::pdf(law, static_cast<double>(n));
  }
  report.agrees = std::abs(report.overall.mean - report.poissonized) <=
                  3.0 * report.overall.std_error + kGridTolerance;
  for (std::size_t n = 0; n <= 3; ++n) {
    std::vector<double> group;
    for (std::size_t r = 0; r < replicas; ++r) {
      if (ticks[r] == n) group.push_back(values[r]);
    }
    ConditionalRow row;
    row.ticks = n;
    row.paths = group.size();
    row.mc = group.empty() ? Estimate{} : estimate(group);
    row.chain_value = chain[n];
    row.poisson_weight = boost::math::pdf(law, static_cast<double>(n));
    row.agrees = group.empty() ||
                 std::abs(row.mc.mean - row.chain_value) <= 3.0 * row.mc.std_error + kGridTolerance;
    report.agrees = report.agrees && row.agrees;
    report.rows.push_back(row);
  }
  return report;
}

MarginalReport marginal_law_check(const CompoundPoissonSpec& spec, CouplingKind kind,
                                  std::size_t replicas, std::uint64_t seed, double level) {
  std::vector<double> xs(replicas);
  std::vector<double> ys(replicas);
  for_replicas(spec, kind, replicas, seed, 0,
               [&](PairSimulator& sim, UniformStream& stream, std::size_t r) {
                 const auto path = sim.run(stream, false);
                 xs[r] = path.x_end - spec.x0;
                 ys[r] = path.y_end - spec.y0;
               });
  std::vector<double> plain(replicas);
  parallel_for(replicas, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t r = begin; r < end; ++r) {
      UniformStream stream(seed, 1, r);
      plain[r] = simulate_increment(spec, stream);
    }
  });
  MarginalReport report{ks_two_sample(xs, plain), ks_two_sample(ys, plain), false};
  report.passes = report.x.passes(level) && report.y.passes(level);
  return report;
}

bool ExtendedJumpReport::passes(double level) const {
  return atom_p_value > level && continuous.passes(level) && tick_counts.passes(level) &&
         std::abs(count_jump_correlation) <= 3.0 * correlation_se;
}

namespace {

struct JumpCollector {
  std::vector<std::uint64_t> counts;
  std::vector<std::vector<double>> jumps;  // per replica
};

ExtendedJumpReport analyze_jumps(const CompoundPoissonSpec& spec, const JumpCollector& data) {
  ExtendedJumpReport report;
  const double zero_mass = uniformize(spec).extended_law.atom_at(0.0);
  const double base_zero = spec.jump_law.atom_at(0.0);
  std::vector<double> nonzero;
  std::vector<double> count_x;
  std::vector<double> mean_abs;
  for (std::size_t r = 0; r < data.jumps.size(); ++r) {
    const auto& js = data.jumps[r];
    report.ticks += js.size();
    double abs_sum = 0.0;
    for (double z : js) {
      abs_sum += std::abs(z);
      if (z == 0.0) {
        ++report.zero_jumps;
      } else {
        nonzero.push_back(z);
      }
    }
    if (!js.empty()) {
      count_x.push_back(static_cast<double>(js.size()));
      mean_abs.push_back(abs_sum / static_cast<double>(js.size()));
    }
  }
  report.atom_p_value = binomial_two_sided_p(report.zero_jumps, report.ticks, zero_mass);
  // Nonzero jumps follow the jump law conditioned away from 0.
  const auto& F = spec.jump_law;
  const auto cdf = [&](double x) {
    return (F.cdf(x) - (x >= 0.0 ? base_zero : 0.0)) / (1.0 - base_zero);
  };
  const auto cdf_left = [&](double x) {
    return (F.cdf_left(x) - (x > 0.0 ? base_zero : 0.0)) / (1.0 - base_zero);
  };
  report.continuous = nonzero.empty() ? KsResult{0.0, 1.0} : ks_one_sample(nonzero, cdf, cdf_left);
  report.tick_counts = chi_square_poisson(data.counts, 2.0 * spec.rate * spec.horizon);
  if (count_x.size() > 2) {
    report.count_jump_correlation = correlation(count_x, mean_abs);
    report.correlation_se = 1.0 / std::sqrt(static_cast<double>(count_x.size() - 1));
  }
  return report;
}

}  // namespace

ExtendedJumpReport extended_jump_check(const CompoundPoissonSpec& spec, CouplingKind kind,
                                       std::size_t replicas, std::uint64_t seed) {
  JumpCollector data{std::vector<std::uint64_t>(replicas), std::vector<std::vector<double>>(replicas)};
  for_replicas(spec, kind, replicas, seed, 0,
               [&](PairSimulator& sim, UniformStream& stream, std::size_t r) {
                 const auto path = sim.run(stream, true);
                 data.counts[r] = path.jumps.size();
                 data.jumps[r].reserve(path.jumps.size());
                 for (const auto& j : path.jumps) data.jumps[r].push_back(j.first);
               });
  return analyze_jumps(spec, data);
}

DiagnosticReport uniformization_diagnostic(const CompoundPoissonSpec& spec, Intensity eta,
                                           std::size_t replicas, std::uint64_t seed) {
  validate(spec, CouplingKind::synchronous);
  if (replicas == 0) throw DomainError("replicas must be positive");
  JumpCollector first{std::vector<std::uint64_t>(replicas),
                      std::vector<std::vector<double>>(replicas)};
  JumpCollector second = first;
  const double m = spec.rate * spec.horizon;
  parallel_for(replicas, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t r = begin; r < end; ++r) {
      UniformStream stream(seed, 2, r);
      auto& j1 = first.jumps[r];
      auto& j2 = second.jumps[r];
      const std::uint64_t n1 = poisson_count(m, stream);
      const std::uint64_t n2 = poisson_count(m, stream);
      if (eta == Intensity::independent) {
        // n1 ticks of X's clock, then n2 ticks of Y's clock.
        for (std::uint64_t k = 0; k < n1; ++k) {
          j1.push_back(sample(spec.jump_law, stream.next()));
          j2.push_back(0.0);
        }
        for (std::uint64_t k = 0; k < n2; ++k) {
          j1.push_back(0.0);
          j2.push_back(sample(spec.jump_law, stream.next()));
        }
      } else {
        // n1 shared jump ticks, then n2 ticks of the rate-lambda filler clock.
        for (std::uint64_t k = 0; k < n1; ++k) {
          const double z = sample(spec.jump_law, stream.next());
          j1.push_back(z);
          j2.push_back(z);
        }
        j1.insert(j1.end(), n2, 0.0);
        j2.insert(j2.end(), n2, 0.0);
      }
      first.counts[r] = second.counts[r] = n1 + n2;
    }
  });
  return {analyze_jumps(spec, first), analyze_jumps(spec, second)};
}

double lattice_tv(const CompoundPoissonSpec& spec, double t) {
  const auto& F = spec.jump_law;
  double span = 0.0;
  if (F.has_density() || !is_lattice(F, &span) || !(span > 0.0)) {
    throw PreconditionError(
        "exact total variation needs a lattice jump law; use the Monte Carlo survival estimate");
  }
  const double base = F.atoms().front().x;
  std::vector<double> step;
  for (const auto& atom : F.atoms()) {
    const auto k = static_cast<std::size_t>(std::llround((atom.x - base) / span));
    if (step.size() <= k) step.resize(k + 1, 0.0);
    step[k] += atom.p;
  }
  const double mean = spec.rate * t;
  std::map<long long, double> px;
  std::map<long long, double> py;
  const auto key = [](double pos) { return std::llround(pos * 1e9); };
  std::vector<double> conv{1.0};  // law of the index sum after n jumps
  double weight = std::exp(-mean);
  double covered = 0.0;
  for (std::size_t n = 0; covered < 1.0 - 1e-15 && n < 100000; ++n) {
    if (n > 0) {
      weight *= mean / static_cast<double>(n);
      std::vector<double> next(conv.size() + step.size() - 1, 0.0);
      for (std::size_t i = 0; i < conv.size(); ++i) {
        for (std::size_t k = 0; k < step.size(); ++k) next[i + k] += conv[i] * step[k];
      }
      conv = std::move(next);
    }
    covered += weight;
    for (std::size_t j = 0; j < conv.size(); ++j) {
      const double off = static_cast<double>(n) * base + static_cast<double>(j) * span;
      px[key(spec.x0 + off)] += weight * conv[j];
      py[key(spec.y0 + off)] += weight * conv[j];
    }
    if (mean == 0.0) break;
  }
  double tv = 0.0;
  for (const auto& [k, p] : px) {
    const auto it = py.find(k);
    tv += std::abs(p - (it == py.end() ? 0.0 : it->second));
  }
  for (const auto& [k, p] : py) {
    if (!px.contains(k)) tv += p;
  }
  return 0.5 * tv;
}

std::vector<SurvivalPoint> coalescence_vs_tv(const CompoundPoissonSpec& spec,
                                             const std::vector<double>& times,
                                             std::size_t replicas, std::uint64_t seed) {
  require_symmetric(spec.jump_law);
  lattice_tv(spec, 0.0);
  if (times.empty()) return {};
  CompoundPoissonSpec run_spec = spec;
  run_spec.horizon = std::max(*std::max_element(times.begin(), times.end()), 1e-12);
  std::vector<double> meet(replicas);
  for_replicas(run_spec, CouplingKind::amr, replicas, seed, 0,
               [&](PairSimulator& sim, UniformStream& stream, std::size_t r) {
                 const auto path = sim.run(stream, false);
                 meet[r] = path.coalesced_at ? *path.coalesced_at
                                             : std::numeric_limits<double>::infinity();
               });
  std::vector<SurvivalPoint> out;
  for (double t : times) {
    std::vector<double> alive(replicas);
    for (std::size_t r = 0; r < replicas; ++r) alive[r] = meet[r] > t ? 1.0 : 0.0;
    const auto e = estimate(alive);
    SurvivalPoint pt{t, e.mean, e.std_error, lattice_tv(spec, t), false};
    pt.agrees = std::abs(pt.survival - pt.tv) <= 3.0 * pt.std_error + 1e-12;
    out.push_back(pt);
  }
  return out;
}

CrossingReport crossing_check(const CompoundPoissonSpec& spec, std::size_t paths,
                              std::uint64_t seed) {
  if (!(spec.x0 < spec.y0)) throw DomainError("crossing check needs x0 < y0");
  CrossingReport report;
  report.paths = paths;
  std::vector<std::size_t> violations(paths, 0);
  std::vector<char> coalesced(paths, 0);
  for_replicas(spec, CouplingKind::amr, paths, seed, 0,
               [&](PairSimulator& sim, UniformStream& stream, std::size_t r) {
                 const auto path = sim.run(stream, true);
                 double y = spec.y0;
                 bool met = false;
                 for (std::size_t i = 0; i < path.jumps.size(); ++i) {
                   const auto [dz1, dz2] = path.jumps[i];
                   const auto [x, y_next] = path.states[i];
                   const bool meets_here =
                       path.coalesced_at && *path.coalesced_at == path.tick_times[i] && !met;
                   if (met) {
                     if (dz1 != dz2 || x != y_next) ++violations[r];
                   } else {
                     // The lower path's new position against the upper's old one.
                     if ((x >= y) != meets_here) ++violations[r];
                   }
                   y = y_next;
                   if (meets_here) {
                     met = true;
                     if (x != y) ++violations[r];
                   } else if (!met && x >= y) {
                     ++violations[r];
                   }
                 }
                 if (path.coalesced_at && !met) ++violations[r];
                 coalesced[r] = met ? 1 : 0;
               });
  for (std::size_t r = 0; r < paths; ++r) {
    report.violations += violations[r];
    report.coalesced += static_cast<std::size_t>(coalesced[r]);
  }
  return report;
}

}  // namespace coupled_levy
