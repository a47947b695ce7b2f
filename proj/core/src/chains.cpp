#include "coupled_levy/chains.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include <boost/math/quadrature/gauss.hpp>

#include "coupled_levy/error.hpp"
#include "coupled_levy/parallel.hpp"

namespace coupled_levy {

void validate(const ChainSpec& spec) {
  const auto report = check_unimodal(spec.jump_law);
  if (!report.is_unimodal_at_zero) {
    throw PreconditionError("jump law is not unimodal at 0", report.max_violation);
  }
}

namespace {

// Draws one coupled step from separation a = hi - lo > 0. The sample's y is
// relative to the quantized shift, so the upper walker moves by y - a_q.
using StepDraw = std::function<CoupleSample(const AmrCoupling&)>;
using FreeDraw = std::function<double()>;

ChainPath run_chain(const ChainSpec& spec, ShiftCouplingCache& cache, const StepDraw& coupled_step,
                    const FreeDraw& free_step) {
  ChainPath path;
  path.xs.reserve(spec.steps + 1);
  path.ys.reserve(spec.steps + 1);
  double x = spec.x0;
  double y = spec.y0;
  if (cache.quantize(std::abs(y - x)) == 0.0) {
    y = x;
    path.coalesced_at = 0;
  }
  path.xs.push_back(x);
  path.ys.push_back(spec.y0);
  for (std::size_t k = 1; k <= spec.steps; ++k) {
    if (path.coalesced_at) {
      x += free_step();
      y = x;
    } else {
      const bool swapped = y < x;
      const double lo = swapped ? y : x;
      const double hi = swapped ? x : y;
      const double a = hi - lo;
      const AmrCoupling& c = cache.get(a);
      const double aq = cache.quantize(a);
      const auto s = coupled_step(c);
      double new_lo = lo + s.x;
      double new_hi = s.coupled ? new_lo : hi + (s.y - aq);
      if (cache.quantize(std::abs(new_hi - new_lo)) == 0.0) {
        new_hi = new_lo;
        path.coalesced_at = k;
      }
      x = swapped ? new_hi : new_lo;
      y = swapped ? new_lo : new_hi;
    }
    path.xs.push_back(x);
    path.ys.push_back(y);
  }
  return path;
}

}  // namespace

ChainPath simulate_amr_chain(const ChainSpec& spec, UniformStream& uniforms,
                             ShiftCouplingCache& cache) {
  return run_chain(
      spec, cache, [&](const AmrCoupling& c) { return c.sample(uniforms.next()); },
      [&] { return sample(spec.jump_law, uniforms.next()); });
}

ChainPath simulate_amr_chain(const ChainSpec& spec, UniformStream& uniforms) {
  ShiftCouplingCache cache(spec.jump_law);
  return simulate_amr_chain(spec, uniforms, cache);
}

ChainPath simulate_chain(const ChainSpec& spec, CouplingKind kind, UniformStream& uniforms,
                         ShiftCouplingCache& cache) {
  if (kind == CouplingKind::amr) return simulate_amr_chain(spec, uniforms, cache);
  return run_chain(
      spec, cache,
      [&](const AmrCoupling& c) {
        const double u1 = uniforms.next();
        const double u2 = uniforms.next();
        return baseline_sample(kind, c, u1, u2);
      },
      [&] {
        const double u1 = uniforms.next();
        uniforms.next();
        return sample(spec.jump_law, u1);
      });
}

Estimate estimate_chain(const ChainSpec& spec, CouplingKind kind, const Terminal& terminal,
                        std::size_t replicas, std::uint64_t seed) {
  if (replicas == 0) throw DomainError("replicas must be positive");
  if (kind == CouplingKind::reflection) require_symmetric(spec.jump_law);
  std::vector<double> values(replicas);
  std::vector<std::unique_ptr<ShiftCouplingCache>> caches(worker_count());
  parallel_for(replicas, [&](std::size_t begin, std::size_t end, std::size_t worker) {
    auto& cache = caches[worker];
    if (!cache) cache = std::make_unique<ShiftCouplingCache>(spec.jump_law);
    for (std::size_t r = begin; r < end; ++r) {
      UniformStream stream(seed, 0, r);
      const auto path = simulate_chain(spec, kind, stream, *cache);
      values[r] = terminal(std::abs(path.xs.back() - path.ys.back()));
    }
  });
  return estimate(values);
}

double psi(const Distribution1D& F, double a, double c) {
  if (!(a > 0.0) || !(c > 0.0)) throw DomainError("psi requires a > 0 and c > 0");
  return band_payoff(F, shift(F, a), c);
}

PsiTable::PsiTable(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.empty() || grid_.size() != values_.size()) {
    throw DomainError("psi table needs matching, nonempty grid and values");
  }
}

double PsiTable::operator()(double d) const {
  if (d <= grid_.front()) return values_.front();
  if (d >= grid_.back()) return values_.back();
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), d);
  const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
  const double w = (d - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
  return (1.0 - w) * values_[i - 1] + w * values_[i];
}

std::vector<double> difference_grid(double a_max, std::size_t points, double a_bulk) {
  if (!(a_max > 0.0) || points < 16) throw DomainError("difference grid needs a_max > 0, 16+ points");
  if (!(a_bulk > 0.0) || a_bulk > a_max) a_bulk = a_max;
  const std::size_t tail = a_bulk < a_max ? points / 8 : 0;
  const std::size_t geometric = points / 4;
  const std::size_t linear = points - 1 - geometric - tail;
  const double g0 = 1e-6 * a_bulk;
  const double g1 = 0.05 * a_bulk;
  std::vector<double> grid{0.0};
  for (std::size_t i = 0; i < geometric; ++i) {
    grid.push_back(g0 * std::pow(g1 / g0, static_cast<double>(i) / static_cast<double>(geometric)));
  }
  for (std::size_t i = 0; i < linear; ++i) {
    grid.push_back(g1 + (a_bulk - g1) * static_cast<double>(i + 1) / static_cast<double>(linear));
  }
  for (std::size_t i = 0; i < tail; ++i) {
    grid.push_back(a_bulk + (a_max - a_bulk) * static_cast<double>(i + 1) / static_cast<double>(tail));
  }
  return grid;
}

double amr_step_expectation(const AmrCoupling& c, double a, const Terminal& f) {
  if (!(a > 0.0)) return f(0.0);
  const auto& F = c.first();
  const auto& G = c.second();
  if (!F.has_density() && !G.has_density()) {
    double total = 0.0;
    for (const auto& j : amr_joint_discrete(c)) total += j.mass * f(std::abs(j.y - j.x));
    return total;
  }
  const double p = c.p();
  double total = (1.0 - p) * f(0.0);
  if (p <= 0.0) return total;

  // On the uncoupled branch u in (0, p): X(u) sits on an atom b for u between
  // D(b-) and D(b), and so does Y(u).
  std::vector<double> cuts{0.0, p};
  for (const auto* d : {&F, &G}) {
    for (const auto& atom : d->atoms()) {
      cuts.push_back(c.gap(atom.x));
      cuts.push_back(F.cdf_left(atom.x) - G.cdf_left(atom.x));
    }
  }
  std::erase_if(cuts, [p](double u) { return !(u >= 0.0 && u <= p); });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  constexpr int kSubpanels = 16;
  const auto integrand = [&](double u) {
    if (!(u > 0.0 && u < p)) return 0.0;
    return f(std::abs(c.residual_second(u) - c.residual_first(u)));
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double w = (cuts[i + 1] - cuts[i]) / kSubpanels;
    if (!(w > 0.0)) continue;
    for (int s = 0; s < kSubpanels; ++s) {
      const double lo = cuts[i] + s * w;
      total += boost::math::quadrature::gauss<double, 8>::integrate(integrand, lo, lo + w);
    }
  }
  return total;
}

double chain_reach(const Distribution1D& F, double a, std::size_t n, double tail) {
  const double width = F.quantile_plus(1.0 - tail) - F.quantile_plus(tail);
  return std::abs(a) + static_cast<double>(n) * std::max(width, 0.0);
}

namespace {

// Calls visit(k, psi_k, table_k) for k = 0..n_max - 1. psi_0 is the exact
// terminal; later levels interpolate their table.
using PsiVisitor = std::function<void(std::size_t, const Terminal&, const PsiTable&)>;

std::vector<double> psi_grid(const Distribution1D& F, double a, std::size_t n,
                             std::size_t grid_points) {
  const double a_max = std::max(chain_reach(F, a, n), 1.0);
  const double bulk_width = F.quantile_plus(1.0 - 1e-4) - F.quantile_plus(1e-4);
  const double a_bulk =
      std::min(a_max, std::abs(a) + 2.0 * std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1))) *
                                        std::max(bulk_width, 0.0));
  return difference_grid(a_max, grid_points, std::max(a_bulk, 1e-3 * a_max));
}

void iterate_psi(const Distribution1D& F, double a, const Terminal& terminal, std::size_t n_max,
                 std::size_t grid_points, const PsiVisitor& visit) {
  const auto grid = psi_grid(F, a, n_max, grid_points);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = terminal(grid[i]);
  PsiTable table(grid, values);
  for (std::size_t k = 0; k < n_max; ++k) {
    const Terminal interpolated = [&table](double d) { return table(d); };
    const Terminal& current = k == 0 ? terminal : interpolated;
    visit(k, current, table);
    if (k + 1 == n_max) break;
    std::vector<double> next(grid.size());
    next[0] = current(0.0);
    parallel_for(grid.size() - 1, [&](std::size_t begin, std::size_t end, std::size_t) {
      for (std::size_t i = begin + 1; i < end + 1; ++i) {
        const AmrCoupling c(F, shift(F, grid[i]));
        next[i] = amr_step_expectation(c, grid[i], current);
      }
    });
    table = PsiTable(grid, std::move(next));
  }
}

}  // namespace

PsiN psi_n_detail(const Distribution1D& F, double a, const Terminal& terminal, std::size_t n,
                  std::size_t grid_points) {
  if (a < 0.0) throw DomainError("separation must be nonnegative");
  if (n == 0) {
    auto grid = psi_grid(F, a, 0, grid_points);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = terminal(grid[i]);
    return {terminal(a), PsiTable(std::move(grid), std::move(values))};
  }
  std::optional<PsiN> out;
  iterate_psi(F, a, terminal, n, grid_points,
              [&](std::size_t k, const Terminal& psi, const PsiTable& t) {
                if (k + 1 != n) return;
                if (!(a > 0.0)) {
                  out = PsiN{psi(0.0), t};
                } else {
                  const AmrCoupling c(F, shift(F, a));
                  out = PsiN{amr_step_expectation(c, a, psi), t};
                }
              });
  return *out;
}

std::vector<double> psi_values(const Distribution1D& F, double a, const Terminal& terminal,
                               std::size_t n_max, std::size_t grid_points) {
  if (a < 0.0) throw DomainError("separation must be nonnegative");
  std::vector<double> out{terminal(a)};
  if (n_max == 0) return out;
  if (!(a > 0.0)) return std::vector<double>(n_max + 1, terminal(0.0));
  const AmrCoupling c(F, shift(F, a));
  iterate_psi(F, a, terminal, n_max, grid_points,
              [&](std::size_t, const Terminal& psi, const PsiTable&) {
                out.push_back(amr_step_expectation(c, a, psi));
              });
  return out;
}

double psi_n(const Distribution1D& F, double a, const Terminal& terminal, std::size_t n,
             std::size_t grid_points) {
  if (a == 0.0) return terminal(0.0);
  return psi_n_detail(F, a, terminal, n, grid_points).value;
}

double amr_chain_value_exact(const Distribution1D& F, double a, const Terminal& terminal,
                             std::size_t n) {
  if (F.has_density()) throw DomainError("exact chain value requires a purely atomic law");
  constexpr double kQuantum = 1e-9;
  std::map<long long, std::vector<JointAtom>> joints;
  std::map<std::pair<std::size_t, long long>, double> memo;
  std::function<double(std::size_t, double)> value = [&](std::size_t k, double d) -> double {
    const long long key = std::llround(d / kQuantum);
    if (key == 0) return terminal(0.0);
    if (k == 0) return terminal(d);
    if (auto it = memo.find({k, key}); it != memo.end()) return it->second;
    auto jt = joints.find(key);
    if (jt == joints.end()) {
      const AmrCoupling c(F, shift(F, d));
      jt = joints.emplace(key, amr_joint_discrete(c)).first;
    }
    double total = 0.0;
    for (const auto& j : jt->second) total += j.mass * value(k - 1, std::abs(j.y - j.x));
    memo[{k, key}] = total;
    return total;
  };
  return value(n, std::abs(a));
}

}  // namespace coupled_levy
