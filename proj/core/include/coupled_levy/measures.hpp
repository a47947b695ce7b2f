#pragma once

// One-dimensional laws: finitely many atoms plus a density assembled from
// pieces. Each piece is an interval carrying a signed linear combination of
// normalized families (a plain law has a single piece with a single term;
// meets and Hahn-Jordan residuals produce selections and differences of
// terms). The combined density on a piece is nonnegative by construction.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coupled_levy/families.hpp"

namespace coupled_levy {

inline constexpr double kMassTolerance = 1e-12;
inline constexpr double kDerivedTolerance = 1e-9;

struct Atom {
  double x = 0.0;
  double p = 0.0;
};

struct DensityTerm {
  double weight = 1.0;
  DensityFamily family;
};

struct DensityPiece {
  double lo = 0.0;  // may be -inf
  double hi = 0.0;  // may be +inf
  std::vector<DensityTerm> terms;

  double pdf(double x) const;
  /// Mass of the piece restricted to (lo, x].
  double mass_to(double x) const;
  double mass() const { return mass_to(hi); }
};

class Distribution1D {
 public:
  /// Builds a measure from atoms and density pieces. Atoms at equal locations
  /// are merged; pieces must not overlap. When `expected_mass` is set the total
  /// mass must match it within `tolerance`.
  Distribution1D(std::vector<Atom> atoms, std::vector<DensityPiece> pieces,
                 std::optional<double> expected_mass = 1.0,
                 double tolerance = kMassTolerance);

  static Distribution1D dirac(double x);
  static Distribution1D from_atoms(std::vector<Atom> atoms);
  static Distribution1D from_family(const DensityFamily& family);
  /// `atoms` plus `density_mass` times `family`.
  static Distribution1D mixture(std::vector<Atom> atoms, const DensityFamily& family,
                                double density_mass);

  std::span<const Atom> atoms() const { return atoms_; }
  std::span<const DensityPiece> pieces() const { return pieces_; }

  double total_mass() const { return total_mass_; }
  double atom_mass() const;
  double density_mass() const { return total_mass_ - atom_mass(); }
  bool has_atoms() const { return !atoms_.empty(); }
  bool has_density() const { return !pieces_.empty(); }
  /// Mass of the atom located exactly at x (0 when none).
  double atom_at(double x) const;

  /// P[X <= x] (unnormalized for sub-probability measures).
  double cdf(double x) const;
  /// P[X < x].
  double cdf_left(double x) const;
  double pdf(double x) const;
  double mass_between(double a, double b) const { return cdf(b) - cdf(a); }

  /// inf{x : F(x) > z * total} with F the cumulative mass.
  double quantile_plus(double z) const;
  /// inf{x : F(x) >= z * total}.
  double quantile_minus(double z) const;
  double quantile(double z, bool plus) const {
    return plus ? quantile_plus(z) : quantile_minus(z);
  }

  double support_lower() const;
  double support_upper() const;
  /// Finite range holding all but a negligible part of the mass.
  std::pair<double, double> effective_range() const;
  /// Atom locations, piece ends and kinks of the families, sorted and unique.
  std::vector<double> breakpoints() const;

  Distribution1D scaled(double factor) const;
  Distribution1D normalized() const;

 private:
  struct Segment {
    bool is_atom = false;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t index = 0;  // into atoms_ or pieces_
    double sub_lo = 0.0;    // piece sub-range start (atoms split pieces)
    double base = 0.0;      // piece mass on (piece.lo, sub_lo]
    double mass = 0.0;
  };

  void build_segments();
  double solve_in_segment(const Segment& s, double target, bool plus) const;
  double quantile_impl(double z, bool plus) const;

  std::vector<Atom> atoms_;
  std::vector<DensityPiece> pieces_;
  std::vector<Segment> segments_;
  std::vector<double> cum_after_;
  double total_mass_ = 0.0;
};

/// Translate by `a`: cdf(shift(d,a), x) = cdf(d, x - a).
Distribution1D shift(const Distribution1D& d, double a);

/// w * delta_0 + (1 - w) * d.
Distribution1D mix_with_dirac(const Distribution1D& d, double w);

/// Inverse-transform draw: quantile_plus(d, u).
double sample(const Distribution1D& d, double u);

struct UnimodalityReport {
  bool is_unimodal_at_zero = false;
  double max_violation = 0.0;
  bool atom_violation = false;
};

/// Checks that d is a mixture of an atom at `center` and a density that is
/// nondecreasing left of `center` and nonincreasing right of it.
UnimodalityReport check_unimodal(const Distribution1D& d, double tol = 1e-9,
                                 double center = 0.0);

/// Numerical symmetry test about `center`: F(center - x) + F(center + x) - mass at
/// center + x == total for x on a grid covering the support.
bool is_symmetric_about(const Distribution1D& d, double center, double tol = 1e-9);

/// True when every atom lies on span * Z + offset and there is no density.
bool is_lattice(const Distribution1D& d, double* span = nullptr, double tol = 1e-9);

/// Sup-norm distance between the cdfs on the union of breakpoints and a
/// uniform grid of `samples` points over the effective range.
double cdf_distance(const Distribution1D& a, const Distribution1D& b,
                    std::size_t samples = 2000);

std::string describe(const Distribution1D& d);

}  // namespace coupled_levy
