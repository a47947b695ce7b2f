#include "coupled_levy/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "coupled_levy/error.hpp"

namespace coupled_levy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mass of a family on (a, b], switching to the upper tail when both ends sit
// above the median so that right-tail masses keep their relative precision.
double family_mass(const DensityFamily& f, double a, double b) {
  if (!(b > a)) return 0.0;
  const double fa = family_cdf(f, a);
  if (fa > 0.5) return family_ccdf(f, a) - family_ccdf(f, b);
  return family_cdf(f, b) - fa;
}

}  // namespace

// ---------------------------------------------------------------------------
// DensityPiece

double DensityPiece::pdf(double x) const {
  if (x < lo || x >= hi) return 0.0;
  double v = 0.0;
  for (const auto& t : terms) v += t.weight * family_pdf(t.family, x);
  return std::max(v, 0.0);
}

double DensityPiece::mass_to(double x) const {
  x = std::min(x, hi);
  if (!(x > lo)) return 0.0;
  double m = 0.0;
  for (const auto& t : terms) m += t.weight * family_mass(t.family, lo, x);
  return m;
}

// ---------------------------------------------------------------------------
// Distribution1D

Distribution1D::Distribution1D(std::vector<Atom> atoms, std::vector<DensityPiece> pieces,
                               std::optional<double> expected_mass, double tolerance) {
  for (const auto& a : atoms) {
    if (!std::isfinite(a.x)) throw ConfigError("atom location must be finite");
    if (!(a.p >= -tolerance) || !std::isfinite(a.p)) {
      throw ConfigError("atom mass must be finite and nonnegative");
    }
  }
  std::erase_if(atoms, [](const Atom& a) { return a.p <= 0.0; });
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& l, const Atom& r) { return l.x < r.x; });
  for (const auto& a : atoms) {
    if (!atoms_.empty() && atoms_.back().x == a.x) {
      atoms_.back().p += a.p;
    } else {
      atoms_.push_back(a);
    }
  }

  for (auto& p : pieces) {
    if (std::isnan(p.lo) || std::isnan(p.hi) || !(p.lo < p.hi)) {
      throw ConfigError("density piece must satisfy lo < hi");
    }
    if (p.terms.empty()) continue;
    const double m = p.mass();
    if (!std::isfinite(m) || m < -tolerance) {
      throw ConfigError("density piece has negative or non-finite mass");
    }
    if (m > 0.0) pieces_.push_back(std::move(p));
  }
  std::sort(pieces_.begin(), pieces_.end(),
            [](const DensityPiece& l, const DensityPiece& r) { return l.lo < r.lo; });
  for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
    if (pieces_[i].hi > pieces_[i + 1].lo) {
      throw ConfigError("density pieces overlap");
    }
  }

  build_segments();
  total_mass_ = cum_after_.empty() ? 0.0 : cum_after_.back();
  if (expected_mass && std::abs(total_mass_ - *expected_mass) > tolerance) {
    std::ostringstream os;
    os << "total mass " << total_mass_ << " differs from " << *expected_mass;
    throw ConfigError(os.str());
  }
}

void Distribution1D::build_segments() {
  segments_.clear();
  std::size_t ai = 0;
  auto emit_atom = [&](std::size_t i) {
    Segment s;
    s.is_atom = true;
    s.lo = s.hi = atoms_[i].x;
    s.index = i;
    s.mass = atoms_[i].p;
    segments_.push_back(s);
  };
  auto emit_range = [&](std::size_t pi, double a, double b) {
    const auto& piece = pieces_[pi];
    Segment s;
    s.lo = a;
    s.hi = b;
    s.index = pi;
    s.sub_lo = a;
    s.base = piece.mass_to(a);
    s.mass = piece.mass_to(b) - s.base;
    if (s.mass > 0.0) segments_.push_back(s);
  };
  for (std::size_t pi = 0; pi < pieces_.size(); ++pi) {
    const auto& piece = pieces_[pi];
    while (ai < atoms_.size() && atoms_[ai].x <= piece.lo) emit_atom(ai++);
    double cur = piece.lo;
    while (ai < atoms_.size() && atoms_[ai].x < piece.hi) {
      emit_range(pi, cur, atoms_[ai].x);
      cur = atoms_[ai].x;
      emit_atom(ai++);
    }
    emit_range(pi, cur, piece.hi);
  }
  while (ai < atoms_.size()) emit_atom(ai++);

  cum_after_.resize(segments_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    acc += segments_[i].mass;
    cum_after_[i] = acc;
  }
}

Distribution1D Distribution1D::dirac(double x) { return from_atoms({Atom{x, 1.0}}); }

Distribution1D Distribution1D::from_atoms(std::vector<Atom> atoms) {
  return Distribution1D(std::move(atoms), {});
}

Distribution1D Distribution1D::from_family(const DensityFamily& family) {
  return mixture({}, family, 1.0);
}

Distribution1D Distribution1D::mixture(std::vector<Atom> atoms, const DensityFamily& family,
                                       double density_mass) {
  std::vector<DensityPiece> pieces;
  if (density_mass > 0.0) {
    const auto [lo, hi] = family_support(family);
    pieces.push_back(DensityPiece{lo, hi, {DensityTerm{density_mass, family}}});
  }
  return Distribution1D(std::move(atoms), std::move(pieces));
}

double Distribution1D::atom_mass() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.p;
  return m;
}

double Distribution1D::atom_at(double x) const {
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                                   [](const Atom& a, double v) { return a.x < v; });
  return (it != atoms_.end() && it->x == x) ? it->p : 0.0;
}

double Distribution1D::cdf(double x) const {
  if (std::isnan(x)) throw DomainError("cdf argument is NaN");
  const auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                                   [](double v, const Segment& s) { return v < s.lo; });
  if (it == segments_.begin()) return 0.0;
  const std::size_t i = static_cast<std::size_t>(it - segments_.begin()) - 1;
  const Segment& s = segments_[i];
  const double before = cum_after_[i] - s.mass;
  if (s.is_atom || x >= s.hi) return cum_after_[i];
  return before + std::clamp(pieces_[s.index].mass_to(x) - s.base, 0.0, s.mass);
}

double Distribution1D::cdf_left(double x) const {
  if (std::isnan(x)) throw DomainError("cdf argument is NaN");
  const auto it = std::lower_bound(segments_.begin(), segments_.end(), x,
                                   [](const Segment& s, double v) { return s.lo < v; });
  if (it == segments_.begin()) return 0.0;
  const std::size_t i = static_cast<std::size_t>(it - segments_.begin()) - 1;
  const Segment& s = segments_[i];
  const double before = cum_after_[i] - s.mass;
  if (s.is_atom || x >= s.hi) return cum_after_[i];
  return before + std::clamp(pieces_[s.index].mass_to(x) - s.base, 0.0, s.mass);
}

double Distribution1D::pdf(double x) const {
  const auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                                   [](double v, const DensityPiece& p) { return v < p.lo; });
  if (it == pieces_.begin()) return 0.0;
  return std::prev(it)->pdf(x);
}

double Distribution1D::quantile_plus(double z) const {
  if (!(z > 0.0 && z < 1.0)) throw DomainError("quantile level must lie in (0,1)");
  return quantile_impl(z, true);
}

double Distribution1D::quantile_minus(double z) const {
  if (!(z > 0.0 && z < 1.0)) throw DomainError("quantile level must lie in (0,1)");
  return quantile_impl(z, false);
}

double Distribution1D::quantile_impl(double z, bool plus) const {
  if (segments_.empty()) throw DomainError("quantile of an empty measure");
  const double target = z * total_mass_;
  const auto it = plus ? std::upper_bound(cum_after_.begin(), cum_after_.end(), target)
                       : std::lower_bound(cum_after_.begin(), cum_after_.end(), target);
  if (it == cum_after_.end()) return segments_.back().hi;
  const std::size_t i = static_cast<std::size_t>(it - cum_after_.begin());
  const Segment& s = segments_[i];
  if (s.is_atom) return s.lo;
  const double before = cum_after_[i] - s.mass;
  return solve_in_segment(s, std::clamp(target - before, 0.0, s.mass), plus);
}

double Distribution1D::solve_in_segment(const Segment& s, double target, bool plus) const {
  const DensityPiece& piece = pieces_[s.index];

  if (piece.terms.size() == 1 && piece.terms.front().weight > 0.0) {
    const auto& term = piece.terms.front();
    const double level = family_cdf(term.family, s.lo) + target / term.weight;
    if (level < 1.0) {
      const double x = family_quantile(term.family, level, plus);
      if (std::isfinite(x)) return std::clamp(x, s.lo, s.hi);
    }
  }

  double lo = s.lo;
  double hi = s.hi;
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    double elo = kInf;
    double ehi = -kInf;
    for (const auto& t : piece.terms) {
      const auto [a, b] = family_effective_range(t.family);
      elo = std::min(elo, a);
      ehi = std::max(ehi, b);
    }
    if (!std::isfinite(lo)) lo = elo;
    if (!std::isfinite(hi)) hi = ehi;
  }
  auto excess = [&](double x) { return piece.mass_to(x) - s.base - target; };
  // Invariant: excess(lo) is below the target and excess(hi) reaches it.
  auto reached = [plus](double e) { return plus ? e > 0.0 : e >= 0.0; };
  if (!reached(excess(hi))) return hi;
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double e = excess(x);
    if (reached(e)) {
      hi = x;
    } else {
      lo = x;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, std::max(std::abs(lo), std::abs(hi)))) {
      break;
    }
    const double dens = piece.pdf(x);
    double next = dens > 0.0 ? x - e / dens : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    // Newton lands on the root from one side; nudge so the bracket keeps shrinking.
    if (std::abs(e) <= 1e-17 * std::max(1.0, s.mass)) {
      return x;
    }
    x = next;
  }
  return hi;
}

double Distribution1D::support_lower() const {
  if (segments_.empty()) return kInf;
  return segments_.front().lo;
}

double Distribution1D::support_upper() const {
  if (segments_.empty()) return -kInf;
  return segments_.back().hi;
}

std::pair<double, double> Distribution1D::effective_range() const {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& a : atoms_) {
    lo = std::min(lo, a.x);
    hi = std::max(hi, a.x);
  }
  for (const auto& p : pieces_) {
    for (const auto& t : p.terms) {
      const auto [a, b] = family_effective_range(t.family);
      lo = std::min(lo, std::max(a, p.lo));
      hi = std::max(hi, std::min(b, p.hi));
    }
  }
  return {lo, hi};
}

std::vector<double> Distribution1D::breakpoints() const {
  std::vector<double> out;
  for (const auto& a : atoms_) out.push_back(a.x);
  for (const auto& p : pieces_) {
    if (std::isfinite(p.lo)) out.push_back(p.lo);
    if (std::isfinite(p.hi)) out.push_back(p.hi);
    for (const auto& t : p.terms) {
      for (double k : family_kinks(t.family)) {
        if (k > p.lo && k < p.hi && std::isfinite(k)) out.push_back(k);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Distribution1D Distribution1D::scaled(double factor) const {
  std::vector<Atom> atoms = atoms_;
  for (auto& a : atoms) a.p *= factor;
  std::vector<DensityPiece> pieces = pieces_;
  for (auto& p : pieces) {
    for (auto& t : p.terms) t.weight *= factor;
  }
  return Distribution1D(std::move(atoms), std::move(pieces), std::nullopt);
}

Distribution1D Distribution1D::normalized() const {
  if (!(total_mass_ > 0.0)) throw DomainError("cannot normalize a zero measure");
  auto out = scaled(1.0 / total_mass_);
  return out;
}

// ---------------------------------------------------------------------------
// Free operations

Distribution1D shift(const Distribution1D& d, double a) {
  std::vector<Atom> atoms(d.atoms().begin(), d.atoms().end());
  for (auto& at : atoms) at.x += a;
  std::vector<DensityPiece> pieces(d.pieces().begin(), d.pieces().end());
  for (auto& p : pieces) {
    p.lo += a;
    p.hi += a;
    for (auto& t : p.terms) t.family = family_shift(t.family, a);
  }
  return Distribution1D(std::move(atoms), std::move(pieces), std::nullopt);
}

Distribution1D mix_with_dirac(const Distribution1D& d, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw DomainError("mixing weight must lie in [0,1]");
  if (w == 0.0) return d;
  if (w == 1.0) return Distribution1D::dirac(0.0);
  std::vector<Atom> atoms(d.atoms().begin(), d.atoms().end());
  for (auto& a : atoms) a.p *= (1.0 - w);
  atoms.push_back(Atom{0.0, w});
  std::vector<DensityPiece> pieces(d.pieces().begin(), d.pieces().end());
  for (auto& p : pieces) {
    for (auto& t : p.terms) t.weight *= (1.0 - w);
  }
  return Distribution1D(std::move(atoms), std::move(pieces), std::nullopt);
}

double sample(const Distribution1D& d, double u) { return d.quantile_plus(u); }

UnimodalityReport check_unimodal(const Distribution1D& d, double tol, double center) {
  UnimodalityReport r;
  const double eps = 1e-12 * std::max(1.0, std::abs(center));
  double span = 0.0;
  if (is_lattice(d, &span)) {
    // Lattice laws: the mass function over consecutive lattice points, gaps
    // included, must rise up to the center and fall after it.
    const double base = d.atoms().front().x;
    const double kc = (center - base) / span;
    if (std::abs(kc - std::round(kc)) <= 1e-9) {
      const auto atoms = d.atoms();
      const auto last = std::llround((atoms.back().x - base) / span);
      const long long c = std::llround(kc);
      std::vector<double> pmf(static_cast<std::size_t>(std::max(last, c) + 1), 0.0);
      for (const auto& a : atoms) pmf[static_cast<std::size_t>(std::llround((a.x - base) / span))] += a.p;
      double run_max = 0.0;
      for (long long k = 0; k < c; ++k) {
        run_max = std::max(run_max, pmf[static_cast<std::size_t>(k)]);
        r.max_violation = std::max(r.max_violation, run_max - pmf[static_cast<std::size_t>(k)]);
      }
      double run_min = kInf;
      for (auto k = static_cast<std::size_t>(std::max(c, 0LL)); k < pmf.size(); ++k) {
        if (run_min < kInf) r.max_violation = std::max(r.max_violation, pmf[k] - run_min);
        run_min = std::min(run_min, pmf[k]);
      }
      if (c < 0) r.max_violation = std::max(r.max_violation, pmf.front());
      r.is_unimodal_at_zero = r.max_violation <= tol;
      return r;
    }
  }
  for (const auto& a : d.atoms()) {
    if (std::abs(a.x - center) > eps) r.atom_violation = true;
  }

  if (d.has_density()) {
    std::vector<double> xs;
    for (double b : d.breakpoints()) {
      const double h = 1e-9 * std::max(1.0, std::abs(b));
      xs.push_back(b - h);
      xs.push_back(b);
      xs.push_back(b + h);
    }
    const auto [lo, hi] = d.effective_range();
    // Dense scan over the bulk; monotone families only change shape at kinks.
    const double qlo = d.quantile_plus(1e-12);
    const double qhi = d.quantile_plus(1.0 - 1e-12);
    const double a = std::isfinite(qlo) ? qlo : lo;
    const double b = std::isfinite(qhi) ? qhi : hi;
    constexpr int kScan = 4096;
    for (int i = 0; i <= kScan; ++i) xs.push_back(a + (b - a) * i / kScan);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    double run_max = 0.0;
    double run_min = kInf;
    for (double x : xs) {
      if (x < center - eps) {
        const double f = d.pdf(x);
        run_max = std::max(run_max, f);
        r.max_violation = std::max(r.max_violation, run_max - f);
      } else if (x > center + eps) {
        const double f = d.pdf(x);
        if (run_min < kInf) r.max_violation = std::max(r.max_violation, f - run_min);
        run_min = std::min(run_min, f);
      }
    }
  }
  r.is_unimodal_at_zero = r.max_violation <= tol && !r.atom_violation;
  return r;
}

bool is_symmetric_about(const Distribution1D& d, double center, double tol) {
  for (const auto& a : d.atoms()) {
    if (std::abs(d.atom_at(2.0 * center - a.x) - a.p) > tol) {
      // Reflected location may differ by rounding; fall back to a window test.
      const double r = 2.0 * center - a.x;
      const double w = 1e-12 * std::max(1.0, std::abs(r));
      if (std::abs((d.cdf(r + w) - d.cdf_left(r - w)) - a.p) > tol) return false;
    }
  }
  const auto [lo, hi] = d.effective_range();
  const double span = std::max(std::abs(hi - center), std::abs(center - lo));
  if (!std::isfinite(span)) return false;
  constexpr int kGrid = 512;
  for (int i = 1; i <= kGrid; ++i) {
    const double s = span * i / kGrid + 1e-7 * span;
    const double left = d.cdf(center - s);
    const double right = d.total_mass() - d.cdf_left(center + s);
    if (std::abs(left - right) > tol) return false;
  }
  return true;
}

bool is_lattice(const Distribution1D& d, double* span, double tol) {
  if (d.has_density() || d.atoms().empty()) return false;
  const auto atoms = d.atoms();
  double step = kInf;
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    step = std::min(step, atoms[i].x - atoms[i - 1].x);
  }
  if (atoms.size() == 1) step = 1.0;
  for (const auto& a : atoms) {
    const double k = (a.x - atoms.front().x) / step;
    if (std::abs(k - std::round(k)) > tol) return false;
  }
  if (span) *span = step;
  return true;
}

double cdf_distance(const Distribution1D& a, const Distribution1D& b, std::size_t samples) {
  std::vector<double> xs = a.breakpoints();
  const auto bb = b.breakpoints();
  xs.insert(xs.end(), bb.begin(), bb.end());
  const auto [alo, ahi] = a.effective_range();
  const auto [blo, bhi] = b.effective_range();
  double lo = std::min(alo, blo);
  double hi = std::max(ahi, bhi);
  // Keep the uniform grid over the bulk, not over astronomically wide tails.
  if (a.total_mass() > 0.0 && b.total_mass() > 0.0) {
    lo = std::max(lo, std::min(a.quantile_plus(1e-13), b.quantile_plus(1e-13)) - 1.0);
    hi = std::min(hi, std::max(a.quantile_plus(1 - 1e-13), b.quantile_plus(1 - 1e-13)) + 1.0);
  }
  for (std::size_t i = 0; i <= samples; ++i) {
    xs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples));
  }
  double dist = 0.0;
  for (double x : xs) {
    if (!std::isfinite(x)) continue;
    dist = std::max(dist, std::abs(a.cdf(x) - b.cdf(x)));
    dist = std::max(dist, std::abs(a.cdf_left(x) - b.cdf_left(x)));
  }
  return dist;
}

std::string describe(const Distribution1D& d) {
  std::ostringstream os;
  os << "Distribution1D{atoms=" << d.atoms().size() << ", pieces=" << d.pieces().size()
     << ", mass=" << d.total_mass() << "}";
  return os.str();
}

}  // namespace coupled_levy
