#pragma once

#include "krden/lattice.hpp"

namespace krden {

// Solution count of the Gram congruence at a fixed depth, together with the
// normalization count / p^{d (mn - n(n+1)/2)} for source rank m and target
// rank n.  `depth` is the requested depth d; when a Gram matrix has entries
// of negative valuation the congruence is cleared by a common p-power first
// and the surplus scaling is divided back out of `normalized`.
struct RepCount {
    Int count;
    long depth = 0;
    Rat normalized;
    bool stabilized = false;
};

// Number of m x n matrices phi over Z/p^d with phi^T S_M phi = S_L mod p^d
// (half-integral Gram matrices on both sides; 2 is invertible mod p^d).
Int count_reps(const QuadLattice& M, const QuadLattice& L, long d);

// Same count restricted to phi whose reduction mod p has full column rank.
Int count_prim_reps(const QuadLattice& M, const QuadLattice& L, long d);

// Full-enumeration reference counter; only usable when p^{d m n} is tiny.
Int count_reps_naive(const QuadLattice& M, const QuadLattice& L, long d);

RepCount rep_count_at(const QuadLattice& M, const QuadLattice& L, long d,
                      bool primitive = false);

// Normalized count at the first depth where two consecutive depths agree.
RepCount density_brute(const QuadLattice& M, const QuadLattice& L,
                       bool primitive = false);

// Closed form for the primitive local density of a rank-1 lattice of norm s
// in the rank-k self-dual lattice of sign eps; extended by 0 when s has
// negative valuation or k = 0.
Rat pden_closed(long k, int eps, const Rat& s, long p);

// Local density of a rank-1 lattice of norm s in the rank-(n1+n2) lattice
// with a p-scaled self-dual part of rank n1 >= 2 and a self-dual part of
// rank n2 >= 2, via the primitive stratification.
Rat den_vertex_rank1(long n1, int eps1, long n2, int eps2, const Rat& s, long p);

// Node budget for the search, from KRDEN_BUDGET (default 50 million).
long long search_budget();

}  // namespace krden
