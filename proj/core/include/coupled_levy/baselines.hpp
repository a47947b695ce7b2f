#pragma once

// Reference couplings used to test the optimality of AMR: synchronous,
// independent, reflection (antithetic quantiles; symmetric laws only) and the
// basic coupling (maximal common mass, independent residuals).

#include <string>
#include <string_view>

#include "coupled_levy/coupling.hpp"

namespace coupled_levy {

enum class CouplingKind { amr, synchronous, independent, reflection, basic };

/// Accepts "amr", "sync"/"synchronous", "indep"/"independent",
/// "reflect"/"reflection", "basic".
CouplingKind parse_coupling_kind(std::string_view name);
std::string to_string(CouplingKind kind);

/// Baseline draw for the pair (F, G). For reflection F must be symmetric
/// about its median; the crossover rule lives in the process simulators.
CoupleSample baseline_sample(CouplingKind kind, const Distribution1D& F, const Distribution1D& G,
                             double u1, double u2);

/// Same draw reusing a prepared AMR coupling of (F, G); the basic coupling
/// reads its meet and residuals from it. Symmetry is not re-checked.
CoupleSample baseline_sample(CouplingKind kind, const AmrCoupling& c, double u1, double u2);

/// Throws PreconditionError unless d is symmetric about its median.
void require_symmetric(const Distribution1D& d);

}  // namespace coupled_levy
