#pragma once

#include <string>
#include <vector>

#include "krden/density.hpp"
#include "krden/lattice.hpp"

namespace krden {

// Result of an intersection-number evaluation: the exact value, the route
// that produced it, and a per-step trace of the recursion.
struct KRResult {
    Rat value;
    std::string route;  // "recursion", "interpolation" or "base-case"
    std::vector<std::string> trace;
};

// Derived density of H_0(p) against an integral anisotropic rank-3 target,
// by the difference recursion over the closed rank-2 forms.  Equals the
// interpolation route dden(DDenKind::H0p, L).
KRResult dden_h0p(const QuadLattice& L);

// Derived density of H_0(p)^dual against a rank-3 target whose p-rescaling
// is integral and anisotropic.  Equals dden(DDenKind::H0pDual, L).
KRResult dden_h0p_dual(const QuadLattice& L);

// Derived density of the self-dual rank-4 source against an anisotropic
// rank-3 target; the difference recursion steps through the split closed
// form only, with interpolated base values.  Non-integral targets give 0.
KRResult dden_hyperspecial(const QuadLattice& L);

// Intersection number of the special cycle Z(L): dden_h0p when L is
// integral and anisotropic, 0 otherwise.
KRResult int_Z(const QuadLattice& L);

// Intersection number of the dual cycle Y(L): dden_h0p_dual minus 1.
// Requires min fundamental invariant >= -1; throws below that.
KRResult int_Y(const QuadLattice& L);

// Quaternionic CM intersection number: dden_h0p of <1> + M for an
// anisotropic rank-2 M; throws when M is isotropic.
KRResult int_CM(const QuadLattice& M);

}  // namespace krden
