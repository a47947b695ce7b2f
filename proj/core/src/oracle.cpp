#include "coupled_levy/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>

#include <boost/math/tools/roots.hpp>

#include "coupled_levy/coupling.hpp"
#include "coupled_levy/error.hpp"

namespace coupled_levy {

namespace {

constexpr double kPerturbation = 1e-13;
constexpr std::size_t kMaxPivots = 1'000'000;

struct Cell {
  std::size_t i = 0;
  std::size_t j = 0;
};

// Basis of the transportation problem: a spanning tree on m row nodes and n
// column nodes (column j is node m + j) with m + n - 1 edges.
class Basis {
 public:
  Basis(std::size_t m, std::size_t n) : m_(m), n_(n), in_basis_(m * n, false) {}

  void add(Cell c) {
    cells_.push_back(c);
    in_basis_[c.i * n_ + c.j] = true;
  }
  void replace(std::size_t slot, Cell c) {
    in_basis_[cells_[slot].i * n_ + cells_[slot].j] = false;
    cells_[slot] = c;
    in_basis_[c.i * n_ + c.j] = true;
  }
  bool contains(std::size_t i, std::size_t j) const { return in_basis_[i * n_ + j]; }
  const std::vector<Cell>& cells() const { return cells_; }

  // Adjacency as (neighbour node, basis slot).
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency() const {
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(m_ + n_);
    for (std::size_t s = 0; s < cells_.size(); ++s) {
      adj[cells_[s].i].push_back({m_ + cells_[s].j, s});
      adj[m_ + cells_[s].j].push_back({cells_[s].i, s});
    }
    return adj;
  }

  // Basis slots on the tree path from column node j to row node i, in order.
  std::vector<std::size_t> path(std::size_t i, std::size_t j) const {
    const auto adj = adjacency();
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> parent_slot(m_ + n_, none);
    std::vector<std::size_t> parent(m_ + n_, none);
    std::vector<bool> seen(m_ + n_, false);
    std::deque<std::size_t> queue{m_ + j};
    seen[m_ + j] = true;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      if (v == i) break;
      for (const auto& [w, s] : adj[v]) {
        if (seen[w]) continue;
        seen[w] = true;
        parent[w] = v;
        parent_slot[w] = s;
        queue.push_back(w);
      }
    }
    if (!seen[i]) throw std::logic_error("transport basis is not a spanning tree");
    std::vector<std::size_t> slots;
    for (std::size_t v = i; v != m_ + j; v = parent[v]) slots.push_back(parent_slot[v]);
    std::reverse(slots.begin(), slots.end());
    return slots;
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<bool> in_basis_;
  std::vector<Cell> cells_;
};

// Basic values for the given marginals, by peeling leaves off the tree.
std::vector<double> solve_basis(const Basis& basis, const std::vector<double>& rows,
                                const std::vector<double>& cols) {
  const auto adj = basis.adjacency();
  std::vector<double> remaining(rows);
  remaining.insert(remaining.end(), cols.begin(), cols.end());
  std::vector<std::size_t> degree(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v) degree[v] = adj[v].size();
  std::vector<bool> used(basis.cells().size(), false);
  std::vector<double> x(basis.cells().size(), 0.0);
  std::deque<std::size_t> leaves;
  for (std::size_t v = 0; v < adj.size(); ++v) {
    if (degree[v] == 1) leaves.push_back(v);
  }
  while (!leaves.empty()) {
    const std::size_t v = leaves.front();
    leaves.pop_front();
    if (degree[v] != 1) continue;
    for (const auto& [w, s] : adj[v]) {
      if (used[s]) continue;
      used[s] = true;
      x[s] = remaining[v];
      remaining[w] -= remaining[v];
      remaining[v] = 0.0;
      --degree[v];
      if (--degree[w] == 1) leaves.push_back(w);
      break;
    }
  }
  return x;
}

}  // namespace

TransportPlan solve_transport(const std::vector<double>& rows, const std::vector<double>& cols,
                              const std::vector<std::vector<double>>& cost) {
  const std::size_t m = rows.size();
  const std::size_t n = cols.size();
  if (m == 0 || n == 0) throw DomainError("transport needs nonempty marginals");
  if (cost.size() != m) throw DomainError("cost matrix has the wrong number of rows");
  for (const auto& r : cost) {
    if (r.size() != n) throw DomainError("cost matrix has the wrong number of columns");
  }
  for (double w : rows) {
    if (!(w >= 0.0)) throw DomainError("marginal weights must be nonnegative");
  }
  for (double w : cols) {
    if (!(w >= 0.0)) throw DomainError("marginal weights must be nonnegative");
  }
  const double row_mass = std::accumulate(rows.begin(), rows.end(), 0.0);
  const double col_mass = std::accumulate(cols.begin(), cols.end(), 0.0);
  if (std::abs(row_mass - col_mass) > 1e-12) {
    throw DomainError("infeasible marginals: total masses differ");
  }

  // Orden's perturbation: every row gains delta and the last column m delta,
  // so no partial sums of rows and columns coincide.
  std::vector<double> a(rows);
  std::vector<double> b(cols);
  for (double& w : a) w += kPerturbation;
  b.back() += kPerturbation * static_cast<double>(m);

  Basis basis(m, n);
  std::vector<double> x;
  {
    std::vector<double> ra(a);
    std::vector<double> rb(b);
    std::size_t i = 0;
    std::size_t j = 0;
    while (true) {
      const double q = std::max(0.0, std::min(ra[i], rb[j]));
      basis.add({i, j});
      x.push_back(q);
      ra[i] -= q;
      rb[j] -= q;
      if (i == m - 1 && j == n - 1) break;
      if (i == m - 1) {
        ++j;
      } else if (j == n - 1) {
        ++i;
      } else if (ra[i] <= rb[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  double scale = 0.0;
  for (const auto& r : cost) {
    for (double c : r) scale = std::max(scale, std::abs(c));
  }
  const double tol = 1e-12 * std::max(scale, 1.0);

  std::vector<double> u(m);
  std::vector<double> v(n);
  const auto potentials = [&] {
    const auto adj = basis.adjacency();
    std::vector<bool> seen(m + n, false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    u[0] = 0.0;
    while (!queue.empty()) {
      const std::size_t node = queue.front();
      queue.pop_front();
      for (const auto& [w, s] : adj[node]) {
        if (seen[w]) continue;
        seen[w] = true;
        const Cell c = basis.cells()[s];
        if (w >= m) {
          v[w - m] = cost[c.i][c.j] - u[c.i];
        } else {
          u[w] = cost[c.i][c.j] - v[c.j];
        }
        queue.push_back(w);
      }
    }
  };

  TransportPlan out;
  while (true) {
    potentials();
    bool entered = false;
    Cell enter{};
    double min_rc = 0.0;
    for (std::size_t i = 0; i < m && !entered; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (basis.contains(i, j)) continue;
        const double rc = cost[i][j] - u[i] - v[j];
        min_rc = std::min(min_rc, rc);
        if (rc < -tol) {
          enter = {i, j};
          entered = true;
          break;
        }
      }
    }
    if (!entered) {
      out.min_reduced_cost = min_rc;
      break;
    }
    if (++out.pivots > kMaxPivots) throw std::runtime_error("transport simplex did not converge");
    const auto slots = basis.path(enter.i, enter.j);
    // Slots alternate -, +, - ... starting at the column of the entering cell.
    std::size_t leave = slots[0];
    double theta = x[slots[0]];
    for (std::size_t k = 0; k < slots.size(); k += 2) {
      const std::size_t s = slots[k];
      const Cell c = basis.cells()[s];
      const Cell l = basis.cells()[leave];
      if (x[s] < theta || (x[s] == theta && c.i * n + c.j < l.i * n + l.j)) {
        theta = x[s];
        leave = s;
      }
    }
    for (std::size_t k = 0; k < slots.size(); ++k) {
      x[slots[k]] += (k % 2 == 0) ? -theta : theta;
    }
    basis.replace(leave, enter);
    x[leave] = theta;
  }

  const auto exact = solve_basis(basis, rows, cols);
  out.plan.assign(m, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s < basis.cells().size(); ++s) {
    const Cell c = basis.cells()[s];
    out.plan[c.i][c.j] = std::max(exact[s], 0.0);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.value += out.plan[i][j] * cost[i][j];
  }
  return out;
}

TransportPlan solve_transport(const Distribution1D& mu, const Distribution1D& nu,
                              const ConcaveCost& cost) {
  if (mu.has_density() || nu.has_density()) {
    throw DomainError("transport oracle requires purely atomic laws");
  }
  if (mu.atoms().size() > 64 || nu.atoms().size() > 64) {
    throw DomainError("transport oracle supports at most 64 atoms per marginal");
  }
  std::vector<double> rows;
  std::vector<double> cols;
  TransportPlan shape;
  for (const auto& a : mu.atoms()) {
    shape.row_support.push_back(a.x);
    rows.push_back(a.p);
  }
  for (const auto& a : nu.atoms()) {
    shape.col_support.push_back(a.x);
    cols.push_back(a.p);
  }
  std::vector<std::vector<double>> c(rows.size(), std::vector<double>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      c[i][j] = cost(std::abs(shape.row_support[i] - shape.col_support[j]));
    }
  }
  auto plan = solve_transport(rows, cols, c);
  plan.row_support = std::move(shape.row_support);
  plan.col_support = std::move(shape.col_support);
  return plan;
}

TwoPointResult two_point_example(double gamma, double alpha) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("gamma must lie in (0,1)");
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  TwoPointResult r;
  r.synchronous_cost = std::pow(alpha, gamma);
  r.reflection_cost =
      0.5 * (std::pow(1.0 + alpha, gamma) + std::pow(std::abs(1.0 - alpha), gamma));
  r.f_value = 2.0 * (r.reflection_cost - r.synchronous_cost);
  r.preferred = r.f_value > 0.0 ? TwoPointPlan::synchronous : TwoPointPlan::reflection;
  return r;
}

TransportPlan two_point_plan(double gamma, double alpha) {
  const auto mu = Distribution1D::from_atoms({{0.0, 0.5}, {1.0, 0.5}});
  const auto nu = Distribution1D::from_atoms({{alpha, 0.5}, {1.0 + alpha, 0.5}});
  return solve_transport(mu, nu, ConcaveCost::power(gamma));
}

double two_point_root(double gamma) {
  const auto f = [gamma](double alpha) { return two_point_example(gamma, alpha).f_value; };
  constexpr int kScan = 4000;
  double lo = 1e-9;
  double f_lo = f(lo);
  for (int k = 1; k <= kScan; ++k) {
    const double hi = static_cast<double>(k) / kScan;
    const double f_hi = f(hi);
    if ((f_lo > 0.0) != (f_hi > 0.0)) {
      std::uintmax_t iters = 200;
      const auto r = boost::math::tools::toms748_solve(
          f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iters);
      return 0.5 * (r.first + r.second);
    }
    lo = hi;
    f_lo = f_hi;
  }
  throw std::runtime_error("two-point f has no sign change in (0, 1]");
}

std::vector<double> quantile_atoms(const Distribution1D& d, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = d.quantile_plus((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  return out;
}

AmrOptimalityReport verify_amr_optimal(const Distribution1D& F, double a, const ConcaveCost& cost,
                                       std::size_t n_atoms) {
  if (n_atoms == 0 || n_atoms > 64) throw DomainError("n_atoms must lie in [1, 64]");
  AmrOptimalityReport r;
  r.n_atoms = n_atoms;
  if (a == 0.0) return r;
  const double sep = std::abs(a);
  const auto dec = hahn_jordan(F, shift(F, sep));
  const auto k = static_cast<std::size_t>(
      std::clamp(std::llround(static_cast<double>(n_atoms) * dec.p), 0LL,
                 static_cast<long long>(n_atoms)));
  r.residual_atoms = k;
  const auto left = k > 0 ? quantile_atoms(dec.nu1, k) : std::vector<double>{};
  const auto right = k > 0 ? quantile_atoms(dec.nu2, k) : std::vector<double>{};
  const auto shared = dec.has_nu_star ? quantile_atoms(dec.nu_star, n_atoms - k)
                                      : std::vector<double>{};
  std::vector<double> xs(left);
  xs.insert(xs.end(), shared.begin(), shared.end());
  std::vector<double> ys(shared);
  ys.insert(ys.end(), right.begin(), right.end());
  if (xs.size() != n_atoms || ys.size() != n_atoms) {
    throw std::logic_error("discretized marginals have the wrong size");
  }

  const double w = 1.0 / static_cast<double>(n_atoms);
  for (std::size_t i = 0; i < k; ++i) r.amr_value += w * cost(std::abs(right[k - 1 - i] - left[i]));

  std::vector<std::vector<double>> c(n_atoms, std::vector<double>(n_atoms));
  for (std::size_t i = 0; i < n_atoms; ++i) {
    for (std::size_t j = 0; j < n_atoms; ++j) c[i][j] = cost(std::abs(xs[i] - ys[j]));
  }
  const std::vector<double> weights(n_atoms, w);
  const auto plan = solve_transport(weights, weights, c);
  r.lp_value = plan.value;
  r.min_reduced_cost = plan.min_reduced_cost;
  const double diff = std::abs(r.amr_value - r.lp_value);
  r.gap = diff == 0.0 ? 0.0 : diff / std::max(std::abs(r.lp_value), 1e-300);
  return r;
}

double optimal_chain_value_lp(const Distribution1D& F, double a,
                              const std::function<double(double)>& terminal, std::size_t n) {
  if (F.has_density()) throw DomainError("chain oracle requires a purely atomic jump law");
  constexpr double kQuantum = 1e-9;
  std::vector<double> xs;
  std::vector<double> ws;
  for (const auto& atom : F.atoms()) {
    xs.push_back(atom.x);
    ws.push_back(atom.p);
  }
  std::map<std::pair<std::size_t, long long>, double> memo;
  std::function<double(std::size_t, double)> value = [&](std::size_t k, double d) -> double {
    if (k == 0) return terminal(d);
    const long long key = std::llround(d / kQuantum);
    if (auto it = memo.find({k, key}); it != memo.end()) return it->second;
    std::vector<std::vector<double>> c(xs.size(), std::vector<double>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t j = 0; j < xs.size(); ++j) c[i][j] = value(k - 1, std::abs(xs[j] + d - xs[i]));
    }
    const double v = solve_transport(ws, ws, c).value;
    memo[{k, key}] = v;
    return v;
  };
  return value(n, std::abs(a));
}

std::string to_string(TwoPointPlan plan) {
  return plan == TwoPointPlan::synchronous ? "synchronous" : "reflection";
}

}  // namespace coupled_levy
