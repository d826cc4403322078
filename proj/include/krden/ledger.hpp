#pragma once

#include <string>
#include <vector>

#include "krden/rat.hpp"

namespace krden {

// Line-bundle class O(m, n) on the product of two projective lines.
struct PicClass {
    long m = 0;
    long n = 0;
    bool operator==(const PicClass&) const = default;
};

// Intersection number O(m1,n1) . O(m2,n2) = m1 n2 + m2 n1.
long pic_intersect(const PicClass& c1, const PicClass& c2);

// Class of the exceptional divisor: O(-1,-1).
PicClass exc_selfclass();

// Multiplicity of the exceptional divisor in the special divisor at
// norm-valuation n >= 1.
Rat exc_multiplicity(long n, long p);

// One strict-transform term of the special-divisor decomposition: the
// i-th difference divisor, carrying the valuation it was peeled at, its
// restriction class on the exceptional fiber, and its named strata.
struct DtildeTerm {
    long index;            // i, so the peeled valuation is n - 2i
    long peeled_valuation; // n - 2i
    PicClass restriction;  // O(1,0) / O(2,1) / O(2,2)
    std::vector<std::string> strata;
};

struct SpecialDecomposition {
    long n;
    long exc_coefficient;  // n + 1
    std::vector<DtildeTerm> terms;
    // Sum of the term restrictions as a single class, O(n+1, n).
    PicClass restriction_total() const;
};

// Decomposition of the special divisor Z(x) at n = v_p(q(x)) >= 0 into
// (n+1) copies of the exceptional divisor plus difference divisors.
SpecialDecomposition decompose_special(long n);

// The four strata contributions of one difference step against a rank-2
// integral target with invariants (a, b), under v_p(q(x)) >= max(b, 2).
// FF and VV carry the split closed form, FV and VF the scaled one.
struct GeometricDifference {
    Rat ff, vv, fv, vf;
    Rat sum() const { return ff + vv + fv + vf; }
};

GeometricDifference geometric_difference(long a, long b, long xval, long p);

}  // namespace krden
