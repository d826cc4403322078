#pragma once

#include <string>
#include <vector>

#include "krden/lattice.hpp"

namespace krden {

// Exact local density Den(M, L): the stable value of
// #Rep(M, L; p^d) / p^{d(mn - n(n+1)/2)}.  Dispatches to the closed
// character-sum engine (target rank <= 2), the primitive stratification over
// two-scale sources (target rank 3), or the symmetric-space transform over
// unimodular sources (target rank 3).  Sources of negative valuation are
// handled by the scaling law and the anisotropic-block depth transfer.
Rat den_core(const QuadLattice& M, const QuadLattice& L);

// Den(M ⊥ H_{2k}^+, L): the density polynomial evaluated at p^{-k}.
Rat den_at(const QuadLattice& M, const QuadLattice& L, long k);

struct DensityPolynomial {
    std::vector<Rat> coefficients;  // ascending powers of X
    std::string provenance;         // "interpolated" or "closed-form"
    long degree_bound = 0;

    Rat value_at(const Rat& x) const;
    Rat derivative_at(const Rat& x) const;
    bool vanishes_at_one() const { return value_at(Rat(1)) == 0; }
};

// Exact interpolation of Den(X, M, L) through the nodes X = p^{-k},
// certified by agreement of two successive interpolants.
DensityPolynomial den_poly(const QuadLattice& M, const QuadLattice& L,
                           long degree_hint = -1);

// The four derived-density flavors.  Each tag carries a normalizer density
// and a leading factor (-2 for the rank-4 sources, -1 for the augmented
// rank-3 sources).
enum class DDenKind { H0p, H0pDual, AugSplit, AugScaled };

// Normalizer of a flavor: the source's density against its reference
// target, computed by the engine once per prime and cached.
Rat dden_normalizer(DDenKind kind, long p);

// Derived density -c d/dX|_{X=1} Den(X, source, L) / normalizer for the
// rank-4 sources (kind H0p or H0pDual; L of rank 3).  Throws when the
// polynomial fails to vanish at X = 1 (isotropic-style input).
Rat dden(DDenKind kind, const QuadLattice& L);

// Derived density for the augmented rank-3 sources <x>[-1] ⊥ H_2^+ (kind
// AugSplit) or <x>[-1] ⊥ H_2^+[p] (kind AugScaled) against a rank-2 target;
// qx is the norm of x.
Rat dden(DDenKind kind, const Rat& qx, const QuadLattice& Lflat);

// Closed forms for the augmented derived densities as functions of the
// invariant pair (a, b), a <= b.  AugScaled takes the fundamental
// invariants of the rank-2 target directly (a >= 0).  AugSplit takes the
// invariants of the p-rescaled target (so a >= 0 here corresponds to a
// target with invariants (a-1, b-1) >= -1); a = 0 encodes the non-integral
// targets, where the value is 0.
Rat dden_rank2_closed(DDenKind kind, long a, long b, long p);

namespace detail {

// Normalized count at one depth from the closed character-sum formula;
// target rank 1 or 2 given by its diagonal q-values, source by its
// diagonal q-values.  Exposed for cross-validation in tests.
Rat engine_normalized(long p, const std::vector<Rat>& source_diag,
                      const std::vector<Rat>& target_diag, long d);

// Same quantity summed literally over the symmetric character space
// (target rank 1, 2 or 3); exponentially slower in d, used as an oracle
// and as the route for rank-3 targets under unimodular sources.
Rat symspace_normalized(long p, const std::vector<Rat>& source_diag,
                        const std::vector<Rat>& target_diag, long d);

}  // namespace detail

}  // namespace krden
