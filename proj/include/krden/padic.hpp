#pragma once

#include <limits>

#include "krden/rat.hpp"

namespace krden {

// Sentinel valuation of 0.
inline constexpr long VAL_INF = std::numeric_limits<long>::max() / 4;

long valuation(const Int& n, long p);  // VAL_INF for n == 0
long valuation(const Rat& r, long p);

// r * p^{-valuation(r)}; rejects r == 0.
Rat unit_part(const Rat& r, long p);

// Quadratic character of the square class of r in Q_p^x (p odd): +1 for
// squares, -1 for non-squares with even valuation, 0 when the valuation is
// odd.  Rejects r == 0.
int chi(const Rat& r, long p);

// Legendre symbol of an integer a coprime to p (p an odd prime).
int legendre(const Int& a, long p);

// Hilbert symbol (a,b)_v.  v is an odd prime, v == 2, or v == 0 for the
// real place.  Rejects a == 0 or b == 0.
int hilbert(const Rat& a, const Rat& b, long v);

Int mod_inverse(const Int& a, const Int& m);  // gcd(a, m) == 1

// Canonical representative of r modulo m = p^d in [0, m); requires
// valuation(r, p) >= 0 so the denominator is invertible.
Int rat_mod(const Rat& r, long p, const Int& m);

// Element of Z/p^depth for counting work at a fixed depth.
struct ResidueElement {
    long p = 0;
    long depth = 0;
    Int value;  // in [0, p^depth)
};

ResidueElement make_residue(long p, long depth, const Int& v);
ResidueElement make_residue(long p, long depth, const Rat& r);
ResidueElement res_add(const ResidueElement& a, const ResidueElement& b);
ResidueElement res_mul(const ResidueElement& a, const ResidueElement& b);

// Smallest positive quadratic non-residue mod p.
long default_nonresidue(long p);

bool is_odd_prime(long p);

}  // namespace krden
