// Command line front end. Laws, costs and specs are given either as inline
// JSON (starting with '{') or as paths to JSON files. Exit codes: 0 success,
// 1 a check or acceptance criterion failed, 2 configuration error,
// 3 precondition failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coupled_levy/acceptance.hpp"
#include "coupled_levy/baselines.hpp"
#include "coupled_levy/chains.hpp"
#include "coupled_levy/costs.hpp"
#include "coupled_levy/coupling.hpp"
#include "coupled_levy/error.hpp"
#include "coupled_levy/experiment.hpp"
#include "coupled_levy/json_io.hpp"
#include "coupled_levy/levy.hpp"
#include "coupled_levy/measures.hpp"
#include "coupled_levy/oracle.hpp"
#include "coupled_levy/parallel.hpp"
#include "coupled_levy/rng.hpp"

namespace cl = coupled_levy;

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::size_t replicas = 10000;
  std::string out;
  std::string format = "csv";
};

bool inline_json(const std::string& arg) {
  const auto pos = arg.find_first_not_of(" \t\n");
  return pos != std::string::npos && arg[pos] == '{';
}

cl::Distribution1D law_arg(const std::string& arg) {
  return inline_json(arg) ? cl::parse_distribution(arg) : cl::load_distribution(arg);
}

cl::ConcaveCost cost_arg(const std::string& arg) {
  return inline_json(arg) ? cl::parse_cost(arg) : cl::load_cost(arg);
}

cl::CompoundPoissonSpec levy_arg(const std::string& arg) {
  return inline_json(arg) ? cl::parse_levy_spec(arg) : cl::load_levy_spec(arg);
}

cl::ChainSpec chain_arg(const std::string& arg) {
  return inline_json(arg) ? cl::parse_chain_spec(arg) : cl::load_chain_spec(arg);
}

cl::CouplingKind kind_arg(const std::string& name) {
  try {
    return cl::parse_coupling_kind(name);
  } catch (const std::exception& e) {
    throw cl::ConfigError(e.what());
  }
}

std::vector<cl::CouplingKind> all_kinds() {
  return {cl::CouplingKind::amr, cl::CouplingKind::synchronous, cl::CouplingKind::independent,
          cl::CouplingKind::reflection, cl::CouplingKind::basic};
}

bool symmetric(const cl::Distribution1D& d) {
  try {
    cl::require_symmetric(d);
    return true;
  } catch (const cl::PreconditionError&) {
    return false;
  }
}

void emit_text(const std::string& text, const Common& c) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw cl::ConfigError("cannot write " + c.out);
  f << text;
}

void emit(const cl::Table& t, const Common& c) { emit_text(t.render(c.format), c); }

std::string num(double x) { return cl::format_number(x); }

cl::Table key_values(const std::vector<std::pair<std::string, std::string>>& kv) {
  cl::Table t;
  t.header = {"key", "value"};
  for (const auto& [k, v] : kv) t.rows.push_back({k, v});
  return t;
}

// dist check

int dist_check(const std::string& law_text, double center, const Common& c) {
  const auto d = law_arg(law_text);
  const auto uni = cl::check_unimodal(d, 1e-9, center);
  double span = 0.0;
  const bool lattice = cl::is_lattice(d, &span);
  const auto [lo, hi] = d.effective_range();
  emit(key_values({{"total_mass", num(d.total_mass())},
                   {"atoms", std::to_string(d.atoms().size())},
                   {"atom_mass", num(d.atom_mass())},
                   {"density_pieces", std::to_string(d.pieces().size())},
                   {"support_lower", num(d.support_lower())},
                   {"support_upper", num(d.support_upper())},
                   {"effective_lower", num(lo)},
                   {"effective_upper", num(hi)},
                   {"median", num(0.5 * (d.quantile_minus(0.5) + d.quantile_plus(0.5)))},
                   {"unimodal_center", num(center)},
                   {"unimodal", uni.is_unimodal_at_zero ? "true" : "false"},
                   {"unimodal_max_violation", num(uni.max_violation)},
                   {"symmetric", symmetric(d) ? "true" : "false"},
                   {"lattice", lattice ? "true" : "false"},
                   {"lattice_span", lattice ? num(span) : ""}}),
       c);
  return 0;
}

// couple sample | band | psi

struct Pair {
  cl::Distribution1D F;
  cl::Distribution1D G;
};

Pair pair_args(const std::string& law, const std::string& second, std::optional<double> a) {
  auto F = law_arg(law);
  if (!second.empty()) return {F, law_arg(second)};
  if (!a) throw cl::ConfigError("give --second or --a");
  return {F, cl::shift(F, *a)};
}

int couple_sample(const Pair& p, const std::string& kind_name, std::size_t n, const Common& c) {
  const auto kind = kind_arg(kind_name);
  const auto dec = cl::hahn_jordan(p.F, p.G);
  if (kind == cl::CouplingKind::reflection) cl::require_symmetric(p.F);
  cl::Table t;
  t.header = {"index", "x", "y", "coupled"};
  for (std::size_t i = 0; i < n; ++i) {
    cl::UniformStream u(c.seed, 0, i);
    const double u1 = u();
    const double u2 = u();
    const auto s = kind == cl::CouplingKind::amr ? dec.coupling->sample(u1)
                                                 : cl::baseline_sample(kind, *dec.coupling, u1, u2);
    t.rows.push_back({std::to_string(i), num(s.x), num(s.y), s.coupled ? "1" : "0"});
  }
  emit(t, c);
  return 0;
}

int couple_decompose(const Pair& p, const Common& c) {
  emit_text(cl::decomposition_to_json(cl::hahn_jordan(p.F, p.G)), c);
  return 0;
}

int couple_band(const Pair& p, const std::vector<double>& bands, const Common& c) {
  const auto dec = cl::hahn_jordan(p.F, p.G);
  const auto& coupling = *dec.coupling;
  const bool sym = symmetric(p.F);
  cl::Table t;
  t.header = {"coupling", "c", "mean", "std_error", "exact_optimum", "replicas", "seed"};
  std::uint64_t cell = 0;
  for (auto kind : all_kinds()) {
    if (kind == cl::CouplingKind::reflection && !sym) {
      std::cerr << "note: reflection skipped, the law is not symmetric\n";
      ++cell;
      continue;
    }
    std::vector<std::vector<double>> payoff(bands.size(), std::vector<double>(c.replicas));
    cl::parallel_for(c.replicas, [&](std::size_t begin, std::size_t end, std::size_t) {
      for (std::size_t i = begin; i < end; ++i) {
        cl::UniformStream u(c.seed, cell, i);
        const double u1 = u();
        const double u2 = u();
        const auto s = kind == cl::CouplingKind::amr ? coupling.sample(u1)
                                                     : cl::baseline_sample(kind, coupling, u1, u2);
        for (std::size_t b = 0; b < bands.size(); ++b) {
          payoff[b][i] = std::max(bands[b] - std::abs(s.x - s.y), 0.0);
        }
      }
    });
    for (std::size_t b = 0; b < bands.size(); ++b) {
      const auto e = cl::estimate(payoff[b]);
      t.rows.push_back({cl::to_string(kind), num(bands[b]), num(e.mean), num(e.std_error),
                        num(cl::band_payoff(p.F, p.G, bands[b])), std::to_string(c.replicas),
                        std::to_string(c.seed)});
    }
    ++cell;
  }
  emit(t, c);
  return 0;
}

int couple_psi(const std::string& law, const std::vector<double>& as, const std::vector<double>& cs,
               const Common& c) {
  const auto F = law_arg(law);
  cl::Table t;
  t.header = {"a", "c", "psi_a_c", "psi_c_a", "identity_residual"};
  for (double a : as) {
    for (double band : cs) {
      const double ac = cl::psi(F, a, band);
      const double ca = cl::psi(F, band, a);
      t.rows.push_back({num(a), num(band), num(ac), num(ca), num(ac + a - ca - band)});
    }
  }
  emit(t, c);
  return 0;
}

// chain simulate

int chain_simulate(const std::string& spec_text, const std::string& cost_text,
                   const std::vector<std::string>& kinds, bool exact, const Common& c) {
  const auto spec = chain_arg(spec_text);
  const auto cost = cost_arg(cost_text);
  const cl::Terminal phi = [&cost](double d) { return cost(d); };
  const double a = std::abs(spec.y0 - spec.x0);
  cl::Table t;
  t.header = {"coupling", "cost_form", "steps", "a", "mean", "std_error", "replicas", "seed"};
  for (const auto& name : kinds) {
    const auto kind = kind_arg(name);
    if (kind == cl::CouplingKind::amr) cl::validate(spec);
    if (kind == cl::CouplingKind::reflection) cl::require_symmetric(spec.jump_law);
    const auto e = cl::estimate_chain(spec, kind, phi, c.replicas, c.seed);
    t.rows.push_back({cl::to_string(kind), cost.name(), std::to_string(spec.steps), num(a),
                      num(e.mean), num(e.std_error), std::to_string(c.replicas),
                      std::to_string(c.seed)});
  }
  if (exact) {
    cl::validate(spec);
    const bool atomic = !spec.jump_law.has_density();
    const double v = a == 0.0 ? phi(0.0)
                     : atomic ? cl::amr_chain_value_exact(spec.jump_law, a, phi, spec.steps)
                              : cl::psi_n(spec.jump_law, a, phi, spec.steps);
    t.rows.push_back({atomic ? "amr_exact" : "amr_value_iteration", cost.name(),
                      std::to_string(spec.steps), num(a), num(v), "0", "", ""});
  }
  emit(t, c);
  return 0;
}

// levy simulate | compare | check

cl::Table cost_rows(const cl::CompoundPoissonSpec& spec,
                    const std::vector<cl::CouplingKind>& kinds,
                    const std::vector<cl::ConcaveCost>& costs, const Common& c) {
  cl::Table t;
  t.header = {"coupling", "cost_form", "t", "a", "mean", "std_error", "replicas", "seed"};
  std::uint64_t cell = 0;
  for (auto kind : kinds) {
    cl::validate(spec, kind);
    const auto est = cl::estimate_costs(spec, kind, costs, c.replicas, c.seed, cell++);
    for (std::size_t i = 0; i < costs.size(); ++i) {
      t.rows.push_back({cl::to_string(kind), costs[i].name(), num(spec.horizon),
                        num(std::abs(spec.y0 - spec.x0)), num(est[i].mean),
                        num(est[i].std_error), std::to_string(c.replicas),
                        std::to_string(c.seed)});
    }
  }
  return t;
}

std::vector<cl::ConcaveCost> costs_arg(const std::vector<std::string>& args) {
  std::vector<cl::ConcaveCost> out;
  for (const auto& a : args) out.push_back(cost_arg(a));
  return out;
}

int levy_simulate(const std::string& spec_text, const std::string& kind_name,
                  const std::vector<std::string>& cost_texts, bool trace, const Common& c) {
  const auto spec = levy_arg(spec_text);
  const auto kind = kind_arg(kind_name);
  if (trace) {
    cl::validate(spec, kind);
    cl::UniformStream u(c.seed, 0, 0);
    const auto path = cl::simulate_pair(spec, kind, u);
    cl::Table t;
    t.header = {"tick", "time", "dz1", "dz2", "x", "y", "coalesced"};
    for (std::size_t i = 0; i < path.jumps.size(); ++i) {
      const bool met = path.coalesced_at && path.tick_times[i] >= *path.coalesced_at;
      t.rows.push_back({std::to_string(i), num(path.tick_times[i]), num(path.jumps[i].first),
                        num(path.jumps[i].second), num(path.states[i].first),
                        num(path.states[i].second), met ? "1" : "0"});
    }
    emit(t, c);
    return 0;
  }
  if (cost_texts.empty()) throw cl::ConfigError("give at least one --cost");
  emit(cost_rows(spec, {kind}, costs_arg(cost_texts), c), c);
  return 0;
}

int levy_compare(const std::string& spec_text, const std::vector<std::string>& cost_texts,
                 const Common& c) {
  const auto spec = levy_arg(spec_text);
  if (cost_texts.empty()) throw cl::ConfigError("give at least one --cost");
  std::vector<cl::CouplingKind> kinds;
  for (auto k : all_kinds()) {
    if (k == cl::CouplingKind::reflection && !symmetric(spec.jump_law)) {
      std::cerr << "note: reflection skipped, the jump law is not symmetric\n";
      continue;
    }
    kinds.push_back(k);
  }
  emit(cost_rows(spec, kinds, costs_arg(cost_texts), c), c);
  return 0;
}

void append_jump_rows(cl::Table& t, const std::string& who, const cl::ExtendedJumpReport& r) {
  t.rows.push_back({who + ".ticks", std::to_string(r.ticks)});
  t.rows.push_back({who + ".zero_jumps", std::to_string(r.zero_jumps)});
  t.rows.push_back({who + ".atom_p_value", num(r.atom_p_value)});
  t.rows.push_back({who + ".ks_p_value", num(r.continuous.p_value)});
  t.rows.push_back({who + ".tick_count_p_value", num(r.tick_counts.p_value)});
  t.rows.push_back({who + ".count_jump_correlation", num(r.count_jump_correlation)});
  t.rows.push_back({who + ".correlation_se", num(r.correlation_se)});
}

int levy_check(const std::string& spec_text, const std::string& what, const std::string& kind_name,
               const std::string& cost_text, const std::string& intensity,
               const std::vector<double>& times, double level, const Common& c) {
  const auto spec = levy_arg(spec_text);
  if (what == "marginal") {
    const auto kind = kind_arg(kind_name);
    cl::validate(spec, kind);
    const auto r = cl::marginal_law_check(spec, kind, c.replicas, c.seed, level);
    cl::Table t;
    t.header = {"coordinate", "ks_statistic", "p_value", "passes"};
    t.rows.push_back({"x", num(r.x.statistic), num(r.x.p_value), r.x.passes(level) ? "1" : "0"});
    t.rows.push_back({"y", num(r.y.statistic), num(r.y.p_value), r.y.passes(level) ? "1" : "0"});
    emit(t, c);
    return r.passes ? 0 : 1;
  }
  if (what == "jumps") {
    const auto kind = kind_arg(kind_name);
    cl::validate(spec, kind);
    const auto r = cl::extended_jump_check(spec, kind, c.replicas, c.seed);
    cl::Table t = key_values({});
    append_jump_rows(t, "x", r);
    t.rows.push_back({"passes", r.passes(level) ? "1" : "0"});
    emit(t, c);
    return r.passes(level) ? 0 : 1;
  }
  if (what == "uniformization") {
    cl::Intensity eta;
    if (intensity == "independent") {
      eta = cl::Intensity::independent;
    } else if (intensity == "synchronous") {
      eta = cl::Intensity::synchronous;
    } else {
      throw cl::ConfigError("intensity must be independent or synchronous");
    }
    const auto r = cl::uniformization_diagnostic(spec, eta, c.replicas, c.seed);
    cl::Table t = key_values({});
    append_jump_rows(t, "x", r.first);
    append_jump_rows(t, "y", r.second);
    t.rows.push_back({"passes", r.passes(level) ? "1" : "0"});
    emit(t, c);
    return r.passes(level) ? 0 : 1;
  }
  if (what == "conditional") {
    if (cost_text.empty()) throw cl::ConfigError("conditional check needs --cost");
    cl::validate(spec, cl::CouplingKind::amr);
    const auto r = cl::conditional_count_check(spec, cost_arg(cost_text), c.replicas, c.seed);
    cl::Table t;
    t.header = {"ticks", "paths", "mean", "std_error", "chain_value", "poisson_weight", "agrees"};
    for (const auto& row : r.rows) {
      t.rows.push_back({std::to_string(row.ticks), std::to_string(row.paths), num(row.mc.mean),
                        num(row.mc.std_error), num(row.chain_value), num(row.poisson_weight),
                        row.agrees ? "1" : "0"});
    }
    t.rows.push_back({"all", std::to_string(c.replicas), num(r.overall.mean),
                      num(r.overall.std_error), num(r.poissonized), "1", r.agrees ? "1" : "0"});
    emit(t, c);
    return r.agrees ? 0 : 1;
  }
  if (what == "survival") {
    const auto pts = cl::coalescence_vs_tv(spec, times, c.replicas, c.seed);
    cl::Table t;
    t.header = {"t", "survival", "std_error", "tv", "agrees"};
    bool ok = true;
    for (const auto& p : pts) {
      ok = ok && p.agrees;
      t.rows.push_back({num(p.t), num(p.survival), num(p.std_error), num(p.tv),
                        p.agrees ? "1" : "0"});
    }
    emit(t, c);
    return ok ? 0 : 1;
  }
  if (what == "crossing") {
    cl::validate(spec, cl::CouplingKind::amr);
    const auto r = cl::crossing_check(spec, c.replicas, c.seed);
    emit(key_values({{"paths", std::to_string(r.paths)},
                     {"coalesced", std::to_string(r.coalesced)},
                     {"violations", std::to_string(r.violations)}}),
         c);
    return r.violations == 0 ? 0 : 1;
  }
  throw cl::ConfigError("unknown check '" + what +
                        "' (marginal, jumps, uniformization, conditional, survival, crossing)");
}

// oracle verify | two-point

int oracle_verify(const std::string& law, const std::vector<double>& as,
                  const std::string& cost_text, std::size_t atoms, const Common& c) {
  const auto F = law_arg(law);
  const auto cost = cost_arg(cost_text);
  cl::Table t;
  t.header = {"a", "cost_form", "atoms", "residual_atoms", "lp_value", "amr_value", "gap",
              "min_reduced_cost"};
  for (double a : as) {
    const auto r = cl::verify_amr_optimal(F, a, cost, atoms);
    t.rows.push_back({num(a), cost.name(), std::to_string(r.n_atoms),
                      std::to_string(r.residual_atoms), num(r.lp_value), num(r.amr_value),
                      num(r.gap), num(r.min_reduced_cost)});
  }
  emit(t, c);
  return 0;
}

int oracle_two_point(const std::vector<double>& gammas, const std::vector<double>& alphas,
                     bool grid, std::size_t points, const Common& c) {
  if (grid) {
    std::vector<double> gs = gammas;
    if (gs.empty()) {
      for (int k = 1; k <= 9; ++k) gs.push_back(k / 10.0);
    }
    emit(cl::f_alpha_table(gs, points), c);
    return 0;
  }
  if (gammas.empty()) throw cl::ConfigError("give --gamma or --grid");
  cl::Table t;
  if (alphas.empty()) {
    t.header = {"gamma", "root"};
    for (double g : gammas) t.rows.push_back({num(g), num(cl::two_point_root(g))});
  } else {
    t.header = {"gamma", "alpha", "f", "preferred", "synchronous_cost", "reflection_cost",
                "lp_value"};
    for (double g : gammas) {
      for (double a : alphas) {
        const auto r = cl::two_point_example(g, a);
        t.rows.push_back({num(g), num(a), num(r.f_value), cl::to_string(r.preferred),
                          num(r.synchronous_cost), num(r.reflection_cost),
                          num(cl::two_point_plan(g, a).value)});
      }
    }
  }
  emit(t, c);
  return 0;
}

int verify(const std::vector<int>& only, const Common& c, bool seed_given) {
  cl::AcceptanceOptions opts;
  opts.only = only;
  if (seed_given) opts.seed = c.seed;
  for (int id : only) {
    if (id < 1 || id > cl::kCriterionCount) throw cl::ConfigError("criteria are numbered 1..10");
  }
  const auto results = cl::run_acceptance(opts, &std::cout);
  std::size_t passed = 0;
  std::size_t failed = 0;
  for (const auto& r : results) {
    passed += r.status == cl::CriterionStatus::pass ? 1 : 0;
    failed += r.status == cl::CriterionStatus::fail ? 1 : 0;
  }
  std::cout << passed << " passed, " << failed << " failed, "
            << results.size() - passed - failed << " skipped\n";
  return failed == 0 ? 0 : 1;
}

int plot(const std::string& results_path, const std::string& kind, const Common& c) {
  const auto table =
      results_path.empty() ? cl::Table{} : cl::parse_csv(cl::read_text_file(results_path));
  emit_text(cl::emit_plot_data(table, kind), c);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Couplings of compound Poisson processes: AMR, baselines and exact oracles"};
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--seed", common.seed, "Master seed");
  app.add_option("--replicas", common.replicas, "Monte Carlo replicas or paths")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", common.out, "Output file (default: standard output)");
  app.add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  int code = 0;
  std::string law, second, cost, spec, kind = "amr", check_kind, intensity = "independent",
                                       results, plot_kind, config;
  std::optional<double> a;
  std::vector<double> as, cs, times = {0.5, 1.0, 2.0, 4.0}, gammas, alphas, bands = {0.25, 0.5, 1.0};
  std::vector<std::string> costs, kinds = {"amr", "sync", "indep", "basic"};
  std::vector<int> only;
  std::size_t n = 10, atoms = 32, points = 200;
  double center = 0.0, level = 1e-3;
  bool exact = false, trace = false, grid = false;

  auto* dist = app.add_subcommand("dist", "Inspect a law")->require_subcommand(1);
  auto* dist_check_cmd = dist->add_subcommand("check", "Mass, unimodality, symmetry, lattice");
  dist_check_cmd->add_option("law", law, "Law JSON or file")->required();
  dist_check_cmd->add_option("--center", center, "Unimodality center");
  dist_check_cmd->callback([&] { code = dist_check(law, center, common); });

  auto* couple = app.add_subcommand("couple", "Single-step couplings")->require_subcommand(1);
  auto add_pair = [&](CLI::App* cmd) {
    cmd->add_option("law", law, "First law F (JSON or file)")->required();
    cmd->add_option("--second", second, "Second law G (default: F shifted by --a)");
    cmd->add_option("--a", a, "Shift of F giving G");
  };
  auto* sample_cmd = couple->add_subcommand("sample", "Draw coupled pairs");
  add_pair(sample_cmd);
  sample_cmd->add_option("--coupling", kind, "amr, sync, indep, reflect or basic");
  sample_cmd->add_option("-n,--count", n, "Number of pairs");
  sample_cmd->callback([&] { code = couple_sample(pair_args(law, second, a), kind, n, common); });
  auto* decompose_cmd = couple->add_subcommand("decompose", "Hahn-Jordan decomposition as JSON");
  add_pair(decompose_cmd);
  decompose_cmd->callback([&] { code = couple_decompose(pair_args(law, second, a), common); });
  auto* band_cmd = couple->add_subcommand("band", "Band payoffs under every coupling");
  add_pair(band_cmd);
  band_cmd->add_option("--c", bands, "Band widths");
  band_cmd->callback([&] { code = couple_band(pair_args(law, second, a), bands, common); });
  auto* psi_cmd = couple->add_subcommand("psi", "psi(a, c) and the symmetry identity");
  psi_cmd->add_option("law", law, "Law F (JSON or file)")->required();
  psi_cmd->add_option("--a", as, "Shifts")->required();
  psi_cmd->add_option("--c", cs, "Band widths")->required();
  psi_cmd->callback([&] { code = couple_psi(law, as, cs, common); });

  auto* chain = app.add_subcommand("chain", "Coupled random walks")->require_subcommand(1);
  auto* chain_sim = chain->add_subcommand("simulate", "Expected terminal cost after n steps");
  chain_sim->add_option("spec", spec, "Chain spec JSON or file")->required();
  chain_sim->add_option("--cost", cost, "Cost JSON or file")->required();
  chain_sim->add_option("--coupling", kinds, "Couplings to simulate");
  chain_sim->add_flag("--exact", exact, "Add the AMR chain value by recursion");
  chain_sim->callback([&] { code = chain_simulate(spec, cost, kinds, exact, common); });

  auto* levy = app.add_subcommand("levy", "Coupled compound Poisson processes")
                   ->require_subcommand(1);
  auto* levy_sim = levy->add_subcommand("simulate", "Expected costs under one coupling");
  levy_sim->add_option("spec", spec, "Process spec JSON or file")->required();
  levy_sim->add_option("--coupling", kind, "Coupling");
  levy_sim->add_option("--cost", costs, "Cost JSON or file (repeatable)");
  levy_sim->add_flag("--trace", trace, "Print one path tick by tick instead");
  levy_sim->callback([&] { code = levy_simulate(spec, kind, costs, trace, common); });
  auto* levy_cmp = levy->add_subcommand("compare", "Expected costs under every coupling");
  levy_cmp->add_option("spec", spec, "Process spec JSON or file")->required();
  levy_cmp->add_option("--cost", costs, "Cost JSON or file (repeatable)")->required();
  levy_cmp->callback([&] { code = levy_compare(spec, costs, common); });
  auto* levy_chk = levy->add_subcommand("check", "Statistical checks of the simulators");
  levy_chk->add_option("spec", spec, "Process spec JSON or file")->required();
  levy_chk->add_option("--kind", check_kind,
                       "marginal, jumps, uniformization, conditional, survival or crossing")
      ->required();
  levy_chk->add_option("--coupling", kind, "Coupling for marginal and jumps checks");
  levy_chk->add_option("--cost", cost, "Cost for the conditional check");
  levy_chk->add_option("--intensity", intensity, "independent or synchronous");
  levy_chk->add_option("--times", times, "Times for the survival check");
  levy_chk->add_option("--level", level, "Test level");
  levy_chk->callback([&] {
    code = levy_check(spec, check_kind, kind, cost, intensity, times, level, common);
  });

  auto* oracle = app.add_subcommand("oracle", "Exact transport oracles")->require_subcommand(1);
  auto* oracle_ver = oracle->add_subcommand("verify", "AMR against the transport LP");
  oracle_ver->add_option("law", law, "Law F (JSON or file)")->required();
  oracle_ver->add_option("--a", as, "Shifts")->required();
  oracle_ver->add_option("--cost", cost, "Cost JSON or file")->required();
  oracle_ver->add_option("--atoms", atoms, "Atoms per law")->check(CLI::Range(2, 64));
  oracle_ver->callback([&] { code = oracle_verify(law, as, cost, atoms, common); });
  auto* oracle_two = oracle->add_subcommand("two-point", "Two-point example f(alpha)");
  oracle_two->add_option("--gamma", gammas, "Exponents in (0,1)");
  oracle_two->add_option("--alpha", alphas, "Separations");
  oracle_two->add_flag("--grid", grid, "Tabulate f over alpha in (0, 2]");
  oracle_two->add_option("--points", points, "Alpha grid size")->check(CLI::PositiveNumber);
  oracle_two->callback([&] { code = oracle_two_point(gammas, alphas, grid, points, common); });

  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance suite");
  verify_cmd->add_option("--only", only, "Criteria to run (default: all)");
  verify_cmd->callback([&] { code = verify(only, common, app.count("--seed") > 0); });

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config");
  run_cmd->add_option("config", config, "Experiment config JSON file")->required();
  run_cmd->callback([&] {
    auto cfg = cl::load_experiment_config(config);
    if (app.count("--seed")) cfg.seed = common.seed;
    if (app.count("--replicas")) cfg.replicas = common.replicas;
    if (app.count("--out")) cfg.output = common.out;
    if (app.count("--format")) cfg.format = common.format;
    code = cl::run(cfg);
  });

  auto* plot_cmd = app.add_subcommand("plot", "Plot-data JSON from a results CSV");
  plot_cmd->add_option("results", results, "Results CSV");
  plot_cmd->add_option("--kind", plot_kind, "cost_vs_t, survival_vs_tv or f_alpha")->required();
  plot_cmd->callback([&] { code = plot(results, plot_kind, common); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const cl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cl::DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return 2;
  } catch (const cl::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return code;
}
