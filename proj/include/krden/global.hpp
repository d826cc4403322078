#pragma once

#include <array>
#include <vector>

#include "krden/lattice.hpp"

namespace krden {

// Half-integral symmetric 3x3 matrix: integral diagonal, off-diagonal
// entries in (1/2)Z.
struct TMatrix {
    std::array<std::array<Rat, 3>, 3> t{};
    Rat det() const;
    bool positive_definite() const;
};

// All positive-definite half-integral T with the given diagonal.
std::vector<TMatrix> enumerate_T(long m1, long m2, long m3);

// Finite places where T is not represented by the split quaternary space
// (det form on 2x2 matrices); the archimedean place never appears for
// positive-definite T.  Computed from the dimension/discriminant/Hasse
// classification.
std::vector<long> diff_set(const TMatrix& T);

// Brute-force counterpart of the diff_set membership test at one odd
// prime: decides whether the split quaternary space represents T by a
// primitive-zero search on T + <det T> over the valuation-normalized
// diagonal.  Used to cross-validate diff_set.
bool represented_oracle(const TMatrix& T, long v);

// Local lattice of T at an odd prime v.
QuadLattice t_lattice(const TMatrix& T, long v);

enum class WhittakerLattice { SelfDual4, H0p, H0pDual };

// Nonarchimedean Whittaker value |det S|_v^{3/2} Den(Lambda + H_{2k}^+, L_T)
// for the chosen local lattice Lambda.
Rat whittaker_factor(const TMatrix& T, long v, long k,
                     WhittakerLattice lambda = WhittakerLattice::SelfDual4);

// The p-side local term of the intersection identity for T with
// Diff(T) = {p}: int_Z of the localized lattice for kind 'Z', the derived
// density int_Y + 1 for kind 'Y'.  Throws unless Diff(T) = {p}.
Rat kr_local_term(const TMatrix& T, long p, char kind);

}  // namespace krden
