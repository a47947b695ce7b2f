#include "coupled_levy/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "coupled_levy/baselines.hpp"
#include "coupled_levy/chains.hpp"
#include "coupled_levy/costs.hpp"
#include "coupled_levy/coupling.hpp"
#include "coupled_levy/error.hpp"
#include "coupled_levy/levy.hpp"
#include "coupled_levy/oracle.hpp"
#include "coupled_levy/parallel.hpp"
#include "coupled_levy/rng.hpp"
#include "coupled_levy/stats.hpp"

namespace coupled_levy {
namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

Distribution1D laplace01() { return Distribution1D::from_family(Laplace{0.0, 1.0}); }
Distribution1D uniform01() { return Distribution1D::from_family(Uniform{0.0, 1.0}); }
Distribution1D exponential1() { return Distribution1D::from_family(Exponential{1.0, 0.0}); }
Distribution1D triangular_m1_0_2() {
  return Distribution1D::from_family(Triangular{-1.0, 0.0, 2.0});
}

bool symmetric(const Distribution1D& d) {
  try {
    require_symmetric(d);
    return true;
  } catch (const PreconditionError&) {
    return false;
  }
}

std::string num(double x, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

Outcome psi_symmetry() {
  double worst = 0.0;
  for (const auto& F : {laplace01(), triangular_m1_0_2()}) {
    for (double a : {0.3, 0.7, 1.5}) {
      for (double c : {0.3, 0.7, 1.5}) {
        worst = std::max(worst, std::abs(psi(F, a, c) + a - psi(F, c, a) - c));
      }
    }
  }
  return {worst < 1e-6, "max |psi(a,c) + a - psi(c,a) - c| = " + num(worst, 3) + " over 18 cells"};
}

Outcome band_optimum(std::uint64_t seed) {
  constexpr std::size_t kN = 100000;
  const std::vector<double> bands = {0.25, 0.5, 1.0};
  const CouplingKind kinds[] = {CouplingKind::amr, CouplingKind::synchronous,
                                CouplingKind::independent, CouplingKind::reflection,
                                CouplingKind::basic};
  std::size_t checks = 0;
  std::size_t failures = 0;
  double worst_z = 0.0;
  std::string first_failure;
  std::vector<std::string> skipped;
  std::uint64_t cell = 0;
  for (const auto& [name, F] : {std::pair{"uniform", uniform01()}, std::pair{"laplace", laplace01()}}) {
    const bool sym = symmetric(F);
    for (double a : {0.3, 1.0}) {
      const AmrCoupling coupling(F, shift(F, a));
      std::vector<std::vector<Estimate>> est;  // [kind][band]
      for (CouplingKind kind : kinds) {
        if (kind == CouplingKind::reflection && !sym) {
          skipped.push_back(std::string("reflection for ") + name);
          est.emplace_back();
          ++cell;
          continue;
        }
        std::vector<std::vector<double>> payoff(bands.size(), std::vector<double>(kN));
        parallel_for(kN, [&](std::size_t begin, std::size_t end, std::size_t) {
          for (std::size_t i = begin; i < end; ++i) {
            UniformStream u(seed, cell, i);
            const double u1 = u();
            const double u2 = u();
            const CoupleSample s = kind == CouplingKind::amr
                                       ? coupling.sample(u1)
                                       : baseline_sample(kind, coupling, u1, u2);
            const double d = std::abs(s.x - s.y);
            for (std::size_t b = 0; b < bands.size(); ++b) {
              payoff[b][i] = std::max(bands[b] - d, 0.0);
            }
          }
        });
        std::vector<Estimate> row;
        for (const auto& p : payoff) row.push_back(estimate(p));
        est.push_back(std::move(row));
        ++cell;
      }
      for (std::size_t b = 0; b < bands.size(); ++b) {
        const double exact = band_payoff(F, shift(F, a), bands[b]);
        const Estimate& amr = est[0][b];
        auto fail = [&](const std::string& what) {
          ++failures;
          if (first_failure.empty()) first_failure = what;
        };
        ++checks;
        const double z = amr.std_error > 0.0 ? std::abs(amr.mean - exact) / amr.std_error
                                             : (std::abs(amr.mean - exact) < 1e-12 ? 0.0 : 1e9);
        worst_z = std::max(worst_z, z);
        if (z > 3.0) {
          fail(std::string(name) + " a=" + num(a) + " c=" + num(bands[b]) + ": MC " +
               num(amr.mean) + " vs exact " + num(exact));
        }
        for (std::size_t k = 1; k < est.size(); ++k) {
          if (est[k].empty()) continue;
          ++checks;
          const Estimate& base = est[k][b];
          if (amr.mean < base.mean - 3.0 * combined_se(amr, base)) {
            fail(std::string(name) + " a=" + num(a) + " c=" + num(bands[b]) + ": " +
                 to_string(kinds[k]) + " payoff " + num(base.mean) + " beats amr " +
                 num(amr.mean));
          }
        }
      }
    }
  }
  std::string detail = std::to_string(checks - failures) + "/" + std::to_string(checks) +
                       " checks hold; max |MC - exact| / SE = " + num(worst_z, 3);
  if (!skipped.empty()) detail += "; not applicable: " + skipped.front();
  if (!first_failure.empty()) detail += "; first failure: " + first_failure;
  return {failures == 0, detail};
}

Outcome distributional_oracle() {
  struct Case {
    const char* name;
    Distribution1D F;
    double a;
    ConcaveCost cost;
  };
  const std::vector<Case> cases = {
      {"laplace", laplace01(), 1.0, ConcaveCost::power(0.5)},
      {"uniform", uniform01(), 0.3, ConcaveCost::capped(0.4)},
      {"laplace", laplace01(), 0.5, ConcaveCost::capped(1.0)},
      {"triangular", triangular_m1_0_2(), 0.7, ConcaveCost::bounded_exp()},
      {"gaussian", Distribution1D::from_family(Gaussian{0.0, 1.0}), 1.0, ConcaveCost::power(0.3)},
      {"uniform", uniform01(), 0.6, ConcaveCost::power(0.7)},
  };
  double worst = 0.0;
  std::string worst_case;
  for (const auto& c : cases) {
    const auto r = verify_amr_optimal(c.F, c.a, c.cost, 32);
    if (r.gap >= worst) {
      worst = r.gap;
      worst_case = std::string(c.name) + " a=" + num(c.a) + " " + c.cost.name();
    }
  }
  return {worst < 1e-2, "max relative gap " + num(worst, 3) + " (" + worst_case + "), 6 cases"};
}

Outcome chain_oracle() {
  const double w[] = {1, 2, 3, 5, 8, 5, 3, 2, 1};
  std::vector<Atom> atoms;
  for (int k = -4; k <= 4; ++k) atoms.push_back({static_cast<double>(k), w[k + 4] / 30.0});
  const auto F = Distribution1D::from_atoms(atoms);
  double worst = 0.0;
  std::size_t cases = 0;
  for (const auto& cost : {ConcaveCost::power(0.5), ConcaveCost::capped(2.0)}) {
    const Terminal phi = [&cost](double d) { return cost(d); };
    for (double a : {1.0, 2.0, 5.0}) {
      const double lp = optimal_chain_value_lp(F, a, phi, 3);
      const double amr = amr_chain_value_exact(F, a, phi, 3);
      worst = std::max(worst, std::abs(lp - amr));
      ++cases;
    }
  }
  return {worst <= 1e-9,
          "max |LP - AMR| = " + num(worst, 3) + " over " + std::to_string(cases) +
              " (cost, a) cases, 9 atoms, n = 3"};
}

Outcome two_point_threshold() {
  double inf_root = 1e300;
  double arg = 0.0;
  std::size_t mismatches = 0;
  for (int k = 1; k <= 99; ++k) {
    const double g = k / 100.0;
    const double root = two_point_root(g);
    if (root < inf_root) {
      inf_root = root;
      arg = g;
    }
    // Rows {0, 1}, columns {alpha, 1 + alpha}: plan[0][0] carries the
    // synchronous pairing, plan[0][1] the reflection.
    const auto before = two_point_plan(g, root * (1.0 - 1e-4));
    const auto after = two_point_plan(g, root * (1.0 + 1e-4));
    if (!(before.plan[0][0] > 0.25 && after.plan[0][1] > 0.25)) ++mismatches;
  }
  const double target = 0.7071;
  const bool ok = std::abs(inf_root - target) <= 1e-3 && mismatches == 0;
  return {ok, "infimum of roots " + num(inf_root, 7) + " at gamma = " + num(arg, 3) +
                  " (target 0.7071 +- 1e-3); LP switch mismatches: " +
                  std::to_string(mismatches) + "/99"};
}

Outcome uniformization_statistics(std::uint64_t seed) {
  constexpr double kLevel = 1e-3;
  constexpr double kTicks = 1e5;
  std::vector<std::string> notes;
  bool ok = true;
  std::uint64_t s = seed;
  for (const auto& [name, law] :
       {std::pair{"laplace", laplace01()}, std::pair{"exponential", exponential1()}}) {
    const CompoundPoissonSpec spec{2.0, law, 0.0, 1.0, 1.0};
    const auto paths = static_cast<std::size_t>(std::ceil(kTicks / (2.0 * spec.rate * spec.horizon)));
    const auto r = extended_jump_check(spec, CouplingKind::amr, paths, s++);
    const bool pass = r.passes(kLevel);
    ok = ok && pass;
    notes.push_back(std::string(name) + ": " + std::to_string(r.ticks) + " ticks, atom freq " +
                    num(static_cast<double>(r.zero_jumps) / static_cast<double>(r.ticks), 4) +
                    " (p " + num(r.atom_p_value, 3) + "), KS p " + num(r.continuous.p_value, 3) +
                    ", chi2 p " + num(r.tick_counts.p_value, 3));
  }
  std::string detail;
  for (std::size_t i = 0; i < notes.size(); ++i) detail += (i ? "; " : "") + notes[i];
  return {ok, detail};
}

Outcome marginal_preservation(std::uint64_t seed) {
  bool ok = true;
  std::string detail;
  std::uint64_t s = seed;
  for (const auto& [name, law] :
       {std::pair{"laplace", laplace01()}, std::pair{"exponential", exponential1()}}) {
    const CompoundPoissonSpec spec{2.0, law, 0.0, 1.0, 1.0};
    const auto r = marginal_law_check(spec, CouplingKind::amr, 100000, s++, 1e-3);
    ok = ok && r.passes;
    detail += std::string(detail.empty() ? "" : "; ") + name + ": KS p(Y) " +
              num(r.y.p_value, 3) + ", p(X) " + num(r.x.p_value, 3);
  }
  return {ok, detail};
}

Outcome levy_dominance(std::uint64_t seed) {
  const std::vector<ConcaveCost> costs = {ConcaveCost::power(0.5), ConcaveCost::capped(1.0),
                                          ConcaveCost::bounded_exp()};
  const CouplingKind baselines[] = {CouplingKind::synchronous, CouplingKind::independent,
                                    CouplingKind::reflection, CouplingKind::basic};
  std::size_t checks = 0;
  std::size_t failures = 0;
  double tightest = 1e300;  // min over checks of (baseline - amr) / combined SE
  std::string first_failure;
  std::vector<std::string> skipped;
  std::uint64_t cell = 0;
  for (const auto& [name, law] :
       {std::pair{"laplace", laplace01()}, std::pair{"exponential", exponential1()}}) {
    const CompoundPoissonSpec spec{2.0, law, 0.0, 1.0, 1.0};
    const auto amr = estimate_costs(spec, CouplingKind::amr, costs, 100000, seed, cell++);
    for (CouplingKind kind : baselines) {
      if (kind == CouplingKind::reflection && !symmetric(law)) {
        skipped.push_back(std::string("reflection for ") + name);
        ++cell;
        continue;
      }
      const auto base = estimate_costs(spec, kind, costs, 100000, seed, cell++);
      for (std::size_t i = 0; i < costs.size(); ++i) {
        ++checks;
        const double se = combined_se(amr[i], base[i]);
        if (se > 0.0) tightest = std::min(tightest, (base[i].mean - amr[i].mean) / se);
        if (amr[i].mean > base[i].mean + 3.0 * se) {
          ++failures;
          if (first_failure.empty()) {
            first_failure = std::string(name) + " " + costs[i].name() + ": amr " +
                            num(amr[i].mean) + " > " + to_string(kind) + " " +
                            num(base[i].mean);
          }
        }
      }
    }
  }
  std::string detail = std::to_string(checks - failures) + "/" + std::to_string(checks) +
                       " comparisons hold; min (baseline - amr) / SE = " + num(tightest, 3);
  for (const auto& s : skipped) detail += "; not applicable: " + s;
  if (!first_failure.empty()) detail += "; first failure: " + first_failure;
  return {failures == 0, detail};
}

Outcome lattice_maximality(std::uint64_t seed) {
  const CompoundPoissonSpec spec{1.0, Distribution1D::from_atoms({{-1.0, 0.5}, {1.0, 0.5}}), 0.0,
                                 2.0, 4.0};
  const auto pts = coalescence_vs_tv(spec, {0.5, 1.0, 2.0, 4.0}, 100000, seed);
  bool ok = true;
  std::string detail;
  for (const auto& p : pts) {
    ok = ok && p.agrees;
    detail += std::string(detail.empty() ? "" : "; ") + "t=" + num(p.t) + ": " +
              num(p.survival, 5) + " vs TV " + num(p.tv, 5);
  }
  return {ok && pts.size() == 4, detail};
}

Outcome exponential_crossing(std::uint64_t seed) {
  const CompoundPoissonSpec spec{2.0, exponential1(), 0.0, 1.0, 3.0};
  const auto r = crossing_check(spec, 1000, seed);
  return {r.violations == 0 && r.paths == 1000,
          std::to_string(r.paths) + " paths, " + std::to_string(r.coalesced) + " coalesced, " +
              std::to_string(r.violations) + " violations"};
}

struct Criterion {
  int id;
  const char* title;
  double budget;
  std::function<Outcome(std::uint64_t)> run;
};

std::vector<Criterion> criteria() {
  return {
      {1, "psi symmetry identity", 5, [](std::uint64_t) { return psi_symmetry(); }},
      {2, "band optimum of AMR", 30, band_optimum},
      {3, "distributional transport oracle", 10,
       [](std::uint64_t) { return distributional_oracle(); }},
      {4, "chain transport oracle", 60, [](std::uint64_t) { return chain_oracle(); }},
      {5, "two-point threshold", 5, [](std::uint64_t) { return two_point_threshold(); }},
      {6, "uniformization statistics", 30, uniformization_statistics},
      {7, "marginal preservation", 60, marginal_preservation},
      {8, "Levy cost dominance", 120, levy_dominance},
      {9, "lattice maximality", 60, lattice_maximality},
      {10, "exponential coalescence", 10, exponential_crossing},
  };
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            std::ostream* progress) {
  std::vector<CriterionResult> out;
  for (const auto& c : criteria()) {
    CriterionResult r;
    r.id = c.id;
    r.title = c.title;
    r.budget_seconds = c.budget;
    const bool selected = options.only.empty() ||
                          std::find(options.only.begin(), options.only.end(), c.id) !=
                              options.only.end();
    if (!selected) {
      r.status = CriterionStatus::skipped;
      r.detail = "not selected";
    } else {
      const auto start = std::chrono::steady_clock::now();
      try {
        const Outcome o = c.run(options.seed + static_cast<std::uint64_t>(c.id) * 1000);
        r.status = o.ok ? CriterionStatus::pass : CriterionStatus::fail;
        r.detail = o.detail;
      } catch (const std::exception& e) {
        r.status = CriterionStatus::fail;
        r.detail = std::string("error: ") + e.what();
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (r.status == CriterionStatus::pass && r.seconds > r.budget_seconds) {
        r.status = CriterionStatus::fail;
        r.detail += "; over time budget";
      }
    }
    if (progress) *progress << format_result(r) << std::endl;
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  switch (r.status) {
    case CriterionStatus::pass:
      os << "PASS ";
      break;
    case CriterionStatus::fail:
      os << "FAIL ";
      break;
    case CriterionStatus::skipped:
      os << "SKIPPED(" << r.detail << ") ";
      break;
  }
  os << "[" << std::setw(2) << r.id << "] " << r.title;
  if (r.status != CriterionStatus::skipped) {
    os << " (" << std::fixed << std::setprecision(2) << r.seconds << " s / "
       << std::setprecision(0) << r.budget_seconds << " s): " << r.detail;
  }
  return os.str();
}

bool all_passed(const std::vector<CriterionResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CriterionResult& r) { return r.status == CriterionStatus::pass; });
}

}  // namespace coupled_levy
