#pragma once

#include <array>
#include <string>

#include "krden/rat.hpp"

namespace krden {

// 2x2 matrix over Q_p, row major: (e[0] e[1]; e[2] e[3]).
struct Mat2 {
    long p = 3;
    std::array<Rat, 4> e{};
};

enum class CosetType { Iplus, Iminus, IIplus, IIminus };

std::string coset_type_name(CosetType t);  // "I+", "I-", "II+", "II-"

// Double-coset class of a nonsingular matrix under two-sided translation
// by the subgroup of integral unit-determinant matrices with p-divisible
// lower-left entry.  Types I carry the diagonal representative
// diag(p^a, p^b), types II the antidiagonal one (0, p^a; p^b, 0); the
// exponents satisfy a <= b (I+), b < a (I-), a < b (II+), b <= a (II-)
// and always a + b = v_p(det).
struct CosetClass {
    CosetType type;
    long a;
    long b;
    bool operator==(const CosetClass&) const = default;
};

// Membership and primitivity in the order {(a b; pc d)}: integral entries
// with p | lower-left, and not every entry of (a, b, c/p, d) divisible
// by p.
bool in_order(const Mat2& x);
bool is_primitive(const Mat2& x);

// Classify by the bi-invariant minimum-valuation profile of x, xD,
// D^{-1}x, D^{-1}xD with D = diag(1, p).
CosetClass classify(const Mat2& x);

// Number of double cosets of primitive order elements with v_p(det) = n:
// 1, 3, 4 for n = 0, 1, >= 2.
long class_count(long n);

}  // namespace krden
