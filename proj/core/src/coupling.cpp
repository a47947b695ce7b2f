#include "coupled_levy/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "coupled_levy/error.hpp"

namespace coupled_levy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroResidual = 1e-14;

const DensityPiece* piece_covering(const Distribution1D& d, double x) {
  for (const auto& p : d.pieces()) {
    if (x >= p.lo && x < p.hi) return &p;
  }
  return nullptr;
}

double interior_point(double l, double r) {
  if (std::isfinite(l) && std::isfinite(r)) return 0.5 * (l + r);
  if (std::isfinite(l)) return l + std::max(1.0, std::abs(l));
  if (std::isfinite(r)) return r - std::max(1.0, std::abs(r));
  return 0.0;
}

void append_ends(const Distribution1D& d, std::vector<double>& cuts) {
  for (const auto& p : d.pieces()) {
    if (std::isfinite(p.lo)) cuts.push_back(p.lo);
    if (std::isfinite(p.hi)) cuts.push_back(p.hi);
  }
}

std::vector<double> sorted_cuts(std::vector<double> cuts, double lo, double hi) {
  std::erase_if(cuts, [&](double c) { return !(c > lo && c < hi); });
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

// Pieces of w1 * d1 + w2 * d2 restricted to (lo, hi); d2 may be null.
std::vector<DensityPiece> combine_pieces(const Distribution1D& d1, double w1,
                                         const Distribution1D* d2, double w2, double lo,
                                         double hi) {
  std::vector<double> cuts;
  append_ends(d1, cuts);
  if (d2) append_ends(*d2, cuts);
  cuts = sorted_cuts(std::move(cuts), lo, hi);
  std::vector<DensityPiece> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double l = cuts[i];
    const double r = cuts[i + 1];
    const double mid = interior_point(l, r);
    DensityPiece piece{l, r, {}};
    if (const auto* p1 = piece_covering(d1, mid)) {
      for (const auto& t : p1->terms) piece.terms.push_back({w1 * t.weight, t.family});
    }
    if (d2) {
      if (const auto* p2 = piece_covering(*d2, mid)) {
        for (const auto& t : p2->terms) piece.terms.push_back({w2 * t.weight, t.family});
      }
    }
    if (!piece.terms.empty()) out.push_back(std::move(piece));
  }
  return out;
}

// Measures whose negative parts are rounding noise are clipped to zero.
Distribution1D derived_measure(std::vector<Atom> atoms, std::vector<DensityPiece> pieces) {
  std::erase_if(atoms, [](const Atom& a) { return a.p <= kZeroResidual; });
  std::erase_if(pieces, [](const DensityPiece& p) { return p.mass() <= kZeroResidual; });
  return Distribution1D(std::move(atoms), std::move(pieces), std::nullopt, kDerivedTolerance);
}

std::pair<double, double> joint_range(const Distribution1D& a, const Distribution1D& b) {
  const auto [alo, ahi] = a.effective_range();
  const auto [blo, bhi] = b.effective_range();
  return {std::min(alo, blo), std::max(ahi, bhi)};
}

// First x in (lo, hi) where `pred` switches from false to true, by bisection.
template <class Pred>
double bisect_switch(Pred pred, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (!(mid > lo && mid < hi)) break;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::optional<double> superlevel_witness(const Distribution1D& F, const Distribution1D& G,
                                         std::size_t resolution) {
  std::vector<double> xs;
  for (double b : F.breakpoints()) xs.push_back(b);
  for (double b : G.breakpoints()) xs.push_back(b);
  const double lo = std::min(F.quantile_plus(1e-12), G.quantile_plus(1e-12));
  const double hi = std::max(F.quantile_plus(1 - 1e-12), G.quantile_plus(1 - 1e-12));
  const std::size_t n = std::max<std::size_t>(resolution, 2);
  for (std::size_t i = 0; i <= n; ++i) {
    xs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n));
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  // Values in order: left limit then value at each point.
  std::vector<double> vals;
  std::vector<double> where;
  vals.reserve(2 * xs.size());
  for (double x : xs) {
    const double left = F.cdf_left(x) - G.cdf_left(x);
    const double here = F.cdf(x) - G.cdf(x);
    for (double v : {left, here}) {
      if (v < -kDerivedTolerance) {
        throw PreconditionError("first law does not dominate the second: F(x) < G(x)", x);
      }
      vals.push_back(v);
      where.push_back(x);
    }
  }
  const std::size_t m = vals.size();
  std::vector<double> suffix(m + 1, -kInf);
  for (std::size_t i = m; i-- > 0;) suffix[i] = std::max(suffix[i + 1], vals[i]);
  double prefix = -kInf;
  for (std::size_t i = 0; i < m; ++i) {
    if (vals[i] < std::min(prefix, suffix[i + 1]) - kDerivedTolerance) return where[i];
    prefix = std::max(prefix, vals[i]);
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------

Distribution1D meet(const Distribution1D& d1, const Distribution1D& d2) {
  std::vector<Atom> atoms;
  for (const auto& a : d1.atoms()) {
    const double m = std::min(a.p, d2.atom_at(a.x));
    if (m > 0.0) atoms.push_back({a.x, m});
  }

  std::vector<double> cuts;
  append_ends(d1, cuts);
  append_ends(d2, cuts);
  for (double b : d1.breakpoints()) cuts.push_back(b);
  for (double b : d2.breakpoints()) cuts.push_back(b);
  cuts = sorted_cuts(std::move(cuts), -kInf, kInf);
  const auto [elo, ehi] = joint_range(d1, d2);

  std::vector<DensityPiece> pieces;
  auto first_larger = [&](double x) { return d1.pdf(x) > d2.pdf(x); };
  constexpr int kProbe = 48;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double l = cuts[i];
    const double r = cuts[i + 1];
    const double mid = interior_point(l, r);
    const auto* p1 = piece_covering(d1, mid);
    const auto* p2 = piece_covering(d2, mid);
    if (!p1 || !p2) continue;

    // Probe points, cubically denser toward the finite end of a ray.
    std::vector<double> probe;
    if (std::isfinite(l) && std::isfinite(r)) {
      for (int k = 1; k < kProbe; ++k) probe.push_back(l + (r - l) * k / kProbe);
    } else if (std::isfinite(l)) {
      const double span = std::max(ehi - l, 1.0);
      for (int k = 1; k < kProbe; ++k) probe.push_back(l + span * std::pow(double(k) / kProbe, 3));
    } else if (std::isfinite(r)) {
      const double span = std::max(r - elo, 1.0);
      for (int k = kProbe - 1; k >= 1; --k) {
        probe.push_back(r - span * std::pow(double(k) / kProbe, 3));
      }
    } else {
      for (int k = 1; k < kProbe; ++k) probe.push_back(elo + (ehi - elo) * k / kProbe);
    }

    std::vector<double> sub{l};
    for (std::size_t k = 0; k + 1 < probe.size(); ++k) {
      const bool a = first_larger(probe[k]);
      const bool b = first_larger(probe[k + 1]);
      if (a != b) {
        const double root =
            a ? bisect_switch([&](double x) { return !first_larger(x); }, probe[k], probe[k + 1])
              : bisect_switch(first_larger, probe[k], probe[k + 1]);
        sub.push_back(root);
      }
    }
    sub.push_back(r);
    for (std::size_t k = 0; k + 1 < sub.size(); ++k) {
      const double sl = sub[k];
      const double sr = sub[k + 1];
      if (!(sl < sr)) continue;
      const double sm = interior_point(sl, sr);
      const auto* smaller = first_larger(sm) ? p2 : p1;
      pieces.push_back(DensityPiece{sl, sr, smaller->terms});
    }
  }
  return derived_measure(std::move(atoms), std::move(pieces));
}

bool superlevel_connected(const Distribution1D& F, const Distribution1D& G,
                          std::size_t grid_resolution) {
  return !superlevel_witness(F, G, grid_resolution).has_value();
}

// ---------------------------------------------------------------------------
// AmrCoupling

AmrCoupling::AmrCoupling(Distribution1D first, Distribution1D second, InverseKind inverse)
    : first_(std::move(first)), second_(std::move(second)), inverse_(inverse) {
  if (first_.total_mass() <= 0.0 || second_.total_mass() <= 0.0) {
    throw DomainError("AMR coupling needs two probability laws");
  }
  std::tie(lo_, hi_) = joint_range(first_, second_);
  locate_peak();
  for (const auto& a : first_.atoms()) snap_.push_back(a.x);
  for (const auto& a : second_.atoms()) snap_.push_back(a.x);
  snap_.push_back(zeta_);
  std::sort(snap_.begin(), snap_.end());
  snap_.erase(std::unique(snap_.begin(), snap_.end()), snap_.end());
}

void AmrCoupling::locate_peak() {
  std::vector<double> cand = first_.breakpoints();
  const auto more = second_.breakpoints();
  cand.insert(cand.end(), more.begin(), more.end());
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  double best = -kInf;
  double where = 0.0;
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    const double x = cand[i];
    const double left = first_.cdf_left(x) - second_.cdf_left(x);
    const double here = gap(x);
    if (left > best) {
      best = left;
      where = x;
      best_index = i;
    }
    if (here > best) {
      best = here;
      where = x;
      best_index = i;
    }
  }

  // D is smooth between candidates; an interior peak is where f1 - f2 changes sign.
  auto h = [&](double x) { return first_.pdf(x) - second_.pdf(x); };
  if (!cand.empty()) {
    for (int side = 0; side < 2; ++side) {
      double l = side == 0 ? (best_index > 0 ? cand[best_index - 1] : lo_) : cand[best_index];
      double r = side == 0 ? cand[best_index]
                           : (best_index + 1 < cand.size() ? cand[best_index + 1] : hi_);
      if (side == 0 && best_index == 0) l = std::min(lo_, r - 1.0);
      if (side == 1 && best_index + 1 == cand.size()) r = std::max(hi_, l + 1.0);
      if (!(l < r)) continue;
      const double lp = std::nextafter(l, kInf);
      const double rm = std::nextafter(r, -kInf);
      if (h(lp) > 0.0 && h(rm) < 0.0) {
        const double root = bisect_switch([&](double x) { return !(h(x) > 0.0); }, lp, rm);
        const double v = gap(root);
        if (v > best) {
          best = v;
          where = root;
        }
      }
    }
  } else {
    where = 0.5 * (lo_ + hi_);
    best = gap(where);
  }
  zeta_ = where;

  auto settle = [&] {
    const double a1 = first_.atom_at(zeta_);
    const double a2 = second_.atom_at(zeta_);
    second_before_zeta_ = second_.cdf_left(zeta_);
    common_atom_ = std::min(a1, a2);
    p_ = (first_.cdf_left(zeta_) - second_before_zeta_) + std::max(a1 - a2, 0.0);
  };
  settle();

  if (p_ < kZeroResidual) {
    p_ = 0.0;
    zeta_ = first_.quantile_plus(0.5);
    settle();
    p_ = 0.0;
    return;
  }

  // On a plateau of D the peak is its left end.
  const double probe = zeta_ - 1e-7 * std::max(1.0, std::abs(zeta_));
  const double level = p_ - 1e-15;
  if (gap(probe) >= level) {
    zeta_ = bisect_switch([&](double x) { return gap(x) >= level; }, lo_, probe);
    for (double s : cand) {
      if (s >= zeta_ && s <= probe && gap(s) >= level) {
        zeta_ = std::min(zeta_, s);
        break;
      }
    }
    const double keep = p_;
    settle();
    p_ = std::max(p_, keep);
  }
  p_ = std::min(p_, 1.0);
}

double AmrCoupling::search(const std::function<bool(double)>& reached, double lo,
                           double hi) const {
  // Invariant: reached(hi) and not reached(lo).
  for (int i = 0; i < 400; ++i) {
    const double width = hi - lo;
    if (width <= std::max(1e-15, 4.0 * std::numeric_limits<double>::epsilon() *
                                     std::max(std::abs(lo), std::abs(hi)))) {
      break;
    }
    const double mid = lo + 0.5 * width;
    if (!(mid > lo && mid < hi)) break;
    if (reached(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  // Switches on atoms happen exactly at the atom.
  const auto it = std::upper_bound(snap_.begin(), snap_.end(), lo);
  if (it != snap_.end() && *it <= hi) return *it;
  return hi;
}

double AmrCoupling::residual_first(double u) const {
  const bool plus = inverse_ == InverseKind::plus;
  auto reached = [&](double x) {
    if (x >= zeta_) return true;
    const double d = gap(x);
    return plus ? d > u : d >= u;
  };
  const double lo = std::min(lo_, zeta_);
  if (reached(lo)) return lo;
  return search(reached, lo, zeta_);
}

double AmrCoupling::residual_second(double u) const {
  const bool plus = inverse_ == InverseKind::plus;
  auto reached = [&](double x) {
    const double d = gap(x);
    return plus ? d < u : d <= u;
  };
  if (reached(zeta_)) return zeta_;
  const double hi = std::max(hi_, zeta_);
  if (!reached(hi)) return hi;
  return search(reached, zeta_, hi);
}

double AmrCoupling::common(double u) const {
  const bool plus = inverse_ == InverseKind::plus;
  const double t = std::max(u - p_, std::numeric_limits<double>::min());
  const double g0 = second_before_zeta_;
  if (plus ? t < g0 : t <= g0) return second_.quantile(std::min(t, 1.0 - 1e-16), plus);
  if (plus ? t < g0 + common_atom_ : t <= g0 + common_atom_) return zeta_;
  return first_.quantile(std::clamp(u, std::numeric_limits<double>::min(), 1.0 - 1e-16), plus);
}

CoupleSample AmrCoupling::sample(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("uniform input must lie in (0,1)");
  if (u < p_) return {residual_first(u), residual_second(u), false};
  const double x = common(u);
  return {x, x, true};
}

// ---------------------------------------------------------------------------

HahnJordanDecomposition hahn_jordan(const Distribution1D& F, const Distribution1D& G,
                                    InverseKind inverse, bool check) {
  if (check) {
    if (auto w = superlevel_witness(F, G, 2048)) {
      throw PreconditionError("super-level sets of F - G are not connected", *w);
    }
  }
  auto coupling = std::make_shared<const AmrCoupling>(F, G, inverse);
  HahnJordanDecomposition dec{coupling->p(),
                              coupling->zeta(),
                              Distribution1D({}, {}, std::nullopt),
                              Distribution1D({}, {}, std::nullopt),
                              Distribution1D({}, {}, std::nullopt),
                              true,
                              coupling};
  const double z = dec.zeta;
  if (dec.p == 0.0) {
    dec.nu_star = F;
    return dec;
  }

  const double a1 = F.atom_at(z);
  const double a2 = G.atom_at(z);

  std::vector<Atom> atoms1;
  std::vector<Atom> atoms2;
  std::vector<Atom> common;
  for (const auto& a : F.atoms()) {
    if (a.x < z) atoms1.push_back({a.x, a.p - G.atom_at(a.x)});
    if (a.x > z) common.push_back(a);
  }
  for (const auto& a : G.atoms()) {
    if (a.x > z) atoms2.push_back({a.x, a.p - F.atom_at(a.x)});
    if (a.x < z) common.push_back(a);
  }
  atoms1.push_back({z, std::max(a1 - a2, 0.0)});
  atoms2.push_back({z, std::max(a2 - a1, 0.0)});
  common.push_back({z, std::min(a1, a2)});

  dec.nu1 = derived_measure(std::move(atoms1), combine_pieces(F, 1.0, &G, -1.0, -kInf, z))
                .normalized();
  dec.nu2 = derived_measure(std::move(atoms2), combine_pieces(G, 1.0, &F, -1.0, z, kInf))
                .normalized();
  if (dec.p >= 1.0 - kZeroResidual) {
    dec.has_nu_star = false;
    return dec;
  }
  auto pieces = combine_pieces(G, 1.0, nullptr, 0.0, -kInf, z);
  auto upper = combine_pieces(F, 1.0, nullptr, 0.0, z, kInf);
  pieces.insert(pieces.end(), upper.begin(), upper.end());
  dec.nu_star = derived_measure(std::move(common), std::move(pieces)).normalized();
  return dec;
}

CoupleSample amr_sample(const HahnJordanDecomposition& dec, double u) {
  return dec.coupling->sample(u);
}

double amr_density_map(const AmrCoupling& c, double x) {
  const double z = c.zeta();
  const double level = c.gap(x);
  if (x > z + 1e-12 * std::max(1.0, std::abs(z)) || (c.p() > 0.0 && x < z && !(level > 0.0))) {
    throw DomainError("amr_density_map: x lies outside the left residual region");
  }
  if (x >= z) return z;
  return amr_underline(c, x);
}

double amr_density_map(const Distribution1D& F, const Distribution1D& G, double x) {
  if (F.has_atoms() || G.has_atoms()) {
    throw DomainError("amr_density_map requires atomless laws");
  }
  return amr_density_map(AmrCoupling(F, G), x);
}

double amr_underline(const AmrCoupling& c, double x) {
  const double z = c.zeta();
  const double level = c.gap(x);
  auto below = [&](double y) { return c.gap(y) <= level; };
  if (below(z)) return z;
  double hi = std::max(z + 1.0, c.second().effective_range().second);
  hi = std::max(hi, c.first().effective_range().second);
  if (!below(hi)) return hi;
  return bisect_switch(below, z, hi);
}

double joint_square_prob(const AmrCoupling& c, double a, double b) {
  if (!(a < b)) throw DomainError("joint_square_prob needs a < b");
  const auto& F = c.first();
  const auto& G = c.second();
  for (double e : {a, b}) {
    if (F.atom_at(e) > 0.0 || G.atom_at(e) > 0.0) {
      throw DomainError("square endpoint falls on an atom; perturb the endpoints slightly");
    }
  }
  const double z = c.zeta();
  if (b <= z) return G.cdf(b) - G.cdf(a);
  if (a >= z) return F.cdf(b) - F.cdf(a);
  const double a1 = F.atom_at(z);
  const double a2 = G.atom_at(z);
  const double coupled =
      G.cdf_left(z) - G.cdf(a) + std::min(a1, a2) + F.cdf(b) - F.cdf(z);
  const double p = c.p();
  const double uncoupled = b > amr_underline(c, a) ? p - c.gap(a) : p - c.gap(b);
  return coupled + std::max(uncoupled, 0.0);
}

double band_payoff(const Distribution1D& F, const Distribution1D& G, double c) {
  if (!(c > 0.0)) throw DomainError("band width must be positive");
  constexpr double kTail = 1e-10;
  const double lo = std::min(F.quantile_plus(kTail), G.quantile_plus(kTail));
  const double hi = std::max(F.quantile_plus(1 - kTail), G.quantile_plus(1 - kTail)) + c;
  std::vector<double> cuts;
  for (const auto* d : {&F, &G}) {
    for (double b : d->breakpoints()) {
      cuts.push_back(b);
      cuts.push_back(b + c);
    }
  }
  cuts = sorted_cuts(std::move(cuts), lo, hi);
  auto integrand = [&](double t) {
    const double f = F.cdf(t) - F.cdf(t - c);
    const double g = G.cdf(t) - G.cdf(t - c);
    return std::max(std::min(f, g), 0.0);
  };
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  // The integrand is a difference of cdfs and carries cancellation noise, so
  // the relative target is derived from an absolute one per segment.
  constexpr double kAbsTolerance = 1e-11;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double rough = Rule::integrate(integrand, cuts[i], cuts[i + 1], 0);
    if (!(rough > 0.0)) continue;
    const double rel = std::max(1e-13, kAbsTolerance / rough);
    total += Rule::integrate(integrand, cuts[i], cuts[i + 1], 15, rel);
  }
  return total;
}

BandIdentity band_identity_check(const PairSampler& sampler, double c, std::size_t n) {
  if (n == 0) throw DomainError("band_identity_check needs at least one sample");
  if (!(c > 0.0)) throw DomainError("band width must be positive");
  double sum = 0.0;
  double sum_sq = 0.0;
  std::vector<std::pair<double, int>> events;
  events.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = sampler(i);
    const double v = std::max(c - std::abs(s.x - s.y), 0.0);
    sum += v;
    sum_sq += v * v;
    // (X, Y) lies in (t - c, t]^2 exactly for t in [max, min + c).
    const double start = std::max(s.x, s.y);
    const double stop = std::min(s.x, s.y) + c;
    if (stop > start) {
      events.emplace_back(start, +1);
      events.emplace_back(stop, -1);
    }
  }
  std::sort(events.begin(), events.end());
  double area = 0.0;
  long long active = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i > 0) area += static_cast<double>(active) * (events[i].first - events[i - 1].first);
    active += events[i].second;
  }
  const double dn = static_cast<double>(n);
  BandIdentity out;
  out.lhs = sum / dn;
  out.rhs = area / dn;
  const double var = n > 1 ? std::max(sum_sq / dn - out.lhs * out.lhs, 0.0) * dn / (dn - 1) : 0.0;
  out.std_error = std::sqrt(var / dn);
  return out;
}

std::vector<JointAtom> amr_joint_discrete(const AmrCoupling& c) {
  const auto& F = c.first();
  const auto& G = c.second();
  if (F.has_density() || G.has_density()) {
    throw DomainError("amr_joint_discrete requires purely atomic laws");
  }
  const double p = c.p();
  std::vector<double> cuts{0.0, 1.0, p};
  for (const auto* d : {&F, &G}) {
    for (const auto& a : d->atoms()) {
      cuts.push_back(c.gap(a.x));
      cuts.push_back(p + G.cdf(a.x));
      cuts.push_back(p + G.cdf_left(a.x));
      cuts.push_back(F.cdf(a.x));
    }
  }
  cuts.push_back(p + G.cdf_left(c.zeta()) + std::min(F.atom_at(c.zeta()), G.atom_at(c.zeta())));
  std::erase_if(cuts, [](double u) { return !(u >= 0.0 && u <= 1.0); });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::map<std::pair<double, double>, double> mass;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double w = cuts[i + 1] - cuts[i];
    if (!(w > 0.0)) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    if (!(mid > 0.0 && mid < 1.0)) continue;
    const auto s = c.sample(mid);
    mass[{s.x, s.y}] += w;
  }
  std::vector<JointAtom> out;
  for (const auto& [xy, m] : mass) out.push_back({xy.first, xy.second, m});
  return out;
}

// ---------------------------------------------------------------------------

ShiftCouplingCache::ShiftCouplingCache(Distribution1D law, InverseKind inverse, double quantum,
                                       std::size_t capacity)
    : law_(std::move(law)), inverse_(inverse), quantum_(quantum), capacity_(capacity) {}

double ShiftCouplingCache::quantize(double a) const {
  return static_cast<double>(std::llround(a / quantum_)) * quantum_;
}

const AmrCoupling& ShiftCouplingCache::get(double a) {
  const long long key = std::llround(a / quantum_);
  if (key <= 0) throw DomainError("shift coupling needs a positive separation");
  if (auto it = entries_.find(key); it != entries_.end()) return *it->second;
  if (entries_.size() >= capacity_) entries_.clear();
  const double aq = static_cast<double>(key) * quantum_;
  auto [it, inserted] =
      entries_.emplace(key, std::make_unique<AmrCoupling>(law_, shift(law_, aq), inverse_));
  return *it->second;
}

}  // namespace coupled_levy
