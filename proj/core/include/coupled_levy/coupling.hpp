#pragma once

// Anti-monotonic rearrangement (AMR) coupling of two laws F >= G (first order
// stochastic domination) whose difference D = F - G has connected super-level
// sets. Under these conditions D is nondecreasing up to its peak zeta and
// nonincreasing afterwards, so mu1 - mu2 is nonnegative on (-inf, zeta) and
// nonpositive on (zeta, inf). Everything below is expressed through D.

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "coupled_levy/measures.hpp"

namespace coupled_levy {

enum class InverseKind { plus, minus };

struct CoupleSample {
  double x = 0.0;
  double y = 0.0;
  bool coupled = false;
};

/// mu1 ^ mu2: pointwise minimum of densities and of co-located atom masses.
/// The result is a sub-probability measure.
Distribution1D meet(const Distribution1D& d1, const Distribution1D& d2);

/// True when every super-level set {x : F(x) - G(x) >= l} is an interval on
/// the evaluation grid. Throws PreconditionError when F < G somewhere on it.
bool superlevel_connected(const Distribution1D& F, const Distribution1D& G,
                          std::size_t grid_resolution = 2048);

/// Sampler for the AMR coupling of (F, G), driven by a single uniform.
/// Construction assumes the structural preconditions and does not test them.
class AmrCoupling {
 public:
  AmrCoupling(Distribution1D first, Distribution1D second,
              InverseKind inverse = InverseKind::plus);

  const Distribution1D& first() const { return first_; }
  const Distribution1D& second() const { return second_; }
  InverseKind inverse() const { return inverse_; }

  /// Residual mass: 1 - mass of the meet.
  double p() const { return p_; }
  double zeta() const { return zeta_; }
  /// D(x) = F(x) - G(x).
  double gap(double x) const { return first_.cdf(x) - second_.cdf(x); }

  CoupleSample sample(double u) const;

  /// (G1)^{-1}(u / p): the first coordinate on the uncoupled branch.
  double residual_first(double u) const;
  /// (G2)^{-1}((p - u) / p): the second coordinate on the uncoupled branch.
  double residual_second(double u) const;
  /// (G*)^{-1}((u - p) / (1 - p)) for u >= p.
  double common(double u) const;

 private:
  void locate_peak();
  double search(const std::function<bool(double)>& reached, double lo, double hi) const;

  Distribution1D first_;
  Distribution1D second_;
  InverseKind inverse_;
  double p_ = 0.0;
  double zeta_ = 0.0;
  double second_before_zeta_ = 0.0;  // G(zeta-)
  double common_atom_ = 0.0;         // min of the atoms at zeta
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> snap_;  // atom locations of both laws and zeta
};

struct HahnJordanDecomposition {
  double p = 0.0;
  double zeta = 0.0;
  Distribution1D nu1;      // left residual; zero measure when p = 0
  Distribution1D nu2;      // right residual; zero measure when p = 0
  Distribution1D nu_star;  // normalized meet; zero measure when p = 1
  bool has_nu_star = true;
  std::shared_ptr<const AmrCoupling> coupling;
};

/// Checks domination and connected super-level sets (unless `check` is
/// false) and returns the explicit decomposition mu1 - mu2 = p nu1 - p nu2.
HahnJordanDecomposition hahn_jordan(const Distribution1D& F, const Distribution1D& G,
                                    InverseKind inverse = InverseKind::plus, bool check = true);

CoupleSample amr_sample(const HahnJordanDecomposition& dec, double u);

/// Anti-monotonic rearrangement map on C1 for atomless laws:
/// rho(x) = inf{y >= zeta : D(y) <= D(x)}.
double amr_density_map(const Distribution1D& F, const Distribution1D& G, double x);
double amr_density_map(const AmrCoupling& c, double x);

/// inf{y > zeta : D(x) >= D(y)}.
double amr_underline(const AmrCoupling& c, double x);

/// P[(X, Y) in (a, b]^2] under the AMR coupling. Endpoints must avoid atoms of
/// F and G.
double joint_square_prob(const AmrCoupling& c, double a, double b);

/// Integral of min{F(t) - F(t - c), G(t) - G(t - c)} dt, the largest value of
/// E[(c - |X - Y|)^+] over all couplings of F and G.
double band_payoff(const Distribution1D& F, const Distribution1D& G, double c);

struct BandIdentity {
  double lhs = 0.0;     // mean of (c - |X - Y|)^+
  double rhs = 0.0;     // integral over t of the empirical P[(X, Y) in (t - c, t]^2]
  double std_error = 0.0;
};

using PairSampler = std::function<CoupleSample(std::size_t index)>;

/// Draws `n` pairs from `sampler` and evaluates both sides of the band identity.
BandIdentity band_identity_check(const PairSampler& sampler, double c, std::size_t n);

struct JointAtom {
  double x = 0.0;
  double y = 0.0;
  double mass = 0.0;
};

/// Exact AMR joint law for purely atomic F and G.
std::vector<JointAtom> amr_joint_discrete(const AmrCoupling& c);

/// Per-worker cache of couplings between `law` and shift(law, a), keyed by a
/// quantized to `quantum`. The cache is cleared when it reaches `capacity`.
class ShiftCouplingCache {
 public:
  explicit ShiftCouplingCache(Distribution1D law, InverseKind inverse = InverseKind::plus,
                              double quantum = 1e-9, std::size_t capacity = 4096);

  double quantize(double a) const;
  /// Coupling of law and shift(law, quantize(a)); requires a > 0.
  const AmrCoupling& get(double a);
  const Distribution1D& law() const { return law_; }
  std::size_t size() const { return entries_.size(); }

 private:
  Distribution1D law_;
  InverseKind inverse_;
  double quantum_;
  std::size_t capacity_;
  std::unordered_map<long long, std::unique_ptr<AmrCoupling>> entries_;
};

}  // namespace coupled_levy
