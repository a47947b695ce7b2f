#include "coupled_levy/baselines.hpp"

#include "coupled_levy/error.hpp"

namespace coupled_levy {

CouplingKind parse_coupling_kind(std::string_view name) {
  if (name == "amr") return CouplingKind::amr;
  if (name == "sync" || name == "synchronous") return CouplingKind::synchronous;
  if (name == "indep" || name == "independent") return CouplingKind::independent;
  if (name == "reflect" || name == "reflection") return CouplingKind::reflection;
  if (name == "basic") return CouplingKind::basic;
  throw ConfigError("unknown coupling kind: " + std::string(name));
}

std::string to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::amr:
      return "amr";
    case CouplingKind::synchronous:
      return "sync";
    case CouplingKind::independent:
      return "indep";
    case CouplingKind::reflection:
      return "reflect";
    case CouplingKind::basic:
      return "basic";
  }
  return "unknown";
}

void require_symmetric(const Distribution1D& d) {
  // Midpoint of the median interval; the plus-median alone misses e.g. +-1.
  const double center = 0.5 * (d.quantile_minus(0.5) + d.quantile_plus(0.5));
  if (!is_symmetric_about(d, center, 1e-9)) {
    throw PreconditionError("reflection coupling requires a law symmetric about its median",
                            center);
  }
}

namespace {

CoupleSample make(double x, double y) { return {x, y, x == y}; }

CoupleSample simple_sample(CouplingKind kind, const Distribution1D& F, const Distribution1D& G,
                           double u1, double u2) {
  switch (kind) {
    case CouplingKind::synchronous:
      return make(F.quantile_plus(u1), G.quantile_plus(u1));
    case CouplingKind::independent:
      return make(F.quantile_plus(u1), G.quantile_plus(u2));
    case CouplingKind::reflection:
      return make(F.quantile_plus(u1), G.quantile_plus(1.0 - u1));
    default:
      break;
  }
  throw DomainError("not a simple baseline kind");
}

}  // namespace

CoupleSample baseline_sample(CouplingKind kind, const AmrCoupling& c, double u1, double u2) {
  if (!(u1 > 0.0 && u1 < 1.0 && u2 > 0.0 && u2 < 1.0)) {
    throw DomainError("uniform inputs must lie in (0,1)");
  }
  switch (kind) {
    case CouplingKind::amr:
      return c.sample(u1);
    case CouplingKind::basic: {
      const double p = c.p();
      const double m = 1.0 - p;
      if (u1 < m) {
        // Common part drawn from the normalized meet.
        const double x = c.common(p + u1);
        return {x, x, true};
      }
      const double s = (u1 - m) / p;  // level for nu1
      return make(c.residual_first(s * p), c.residual_second(p * (1.0 - u2)));
    }
    default:
      return simple_sample(kind, c.first(), c.second(), u1, u2);
  }
}

CoupleSample baseline_sample(CouplingKind kind, const Distribution1D& F, const Distribution1D& G,
                             double u1, double u2) {
  if (!(u1 > 0.0 && u1 < 1.0 && u2 > 0.0 && u2 < 1.0)) {
    throw DomainError("uniform inputs must lie in (0,1)");
  }
  if (kind == CouplingKind::reflection) require_symmetric(F);
  if (kind == CouplingKind::basic || kind == CouplingKind::amr) {
    return baseline_sample(kind, AmrCoupling(F, G), u1, u2);
  }
  return simple_sample(kind, F, G, u1, u2);
}

}  // namespace coupled_levy
