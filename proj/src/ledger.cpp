#include "krden/ledger.hpp"

#include <stdexcept>

#include "krden/density.hpp"

namespace krden {

long pic_intersect(const PicClass& c1, const PicClass& c2) {
    return c1.m * c2.n + c2.m * c1.n;
}

PicClass exc_selfclass() { return PicClass{-1, -1}; }

Rat exc_multiplicity(long n, long p) {
    if (n <= 0) throw std::invalid_argument("exc_multiplicity needs n >= 1");
    Rat half = p_power(p, n / 2);
    return n % 2 == 0 ? half * (1 + Rat(1, p)) : 2 * half;
}

PicClass SpecialDecomposition::restriction_total() const {
    PicClass total{0, 0};
    for (const auto& term : terms) {
        total.m += term.restriction.m;
        total.n += term.restriction.n;
    }
    return total;
}

SpecialDecomposition decompose_special(long n) {
    if (n < 0) throw std::invalid_argument("decompose_special needs n >= 0");
    SpecialDecomposition dec;
    dec.n = n;
    dec.exc_coefficient = n + 1;
    for (long i = 0; 2 * i <= n; ++i) {
        DtildeTerm term;
        term.index = i;
        term.peeled_valuation = n - 2 * i;
        long v = term.peeled_valuation;
        if (v == 0) {
            term.restriction = PicClass{1, 0};
            term.strata = {"I+"};
        } else if (v == 1) {
            term.restriction = PicClass{2, 1};
            term.strata = {"I+", "I-", "II+"};
        } else {
            term.restriction = PicClass{2, 2};
            term.strata = {"I+", "I-", "II+", "II-"};
        }
        dec.terms.push_back(std::move(term));
    }
    return dec;
}

GeometricDifference geometric_difference(long a, long b, long xval, long p) {
    if (a < 0 || b < a)
        throw std::invalid_argument("geometric_difference needs 0 <= a <= b");
    if (xval < std::max(b, 2L))
        throw std::invalid_argument(
            "geometric_difference needs v_p(q(x)) >= max(b, 2)");
    GeometricDifference g;
    g.ff = g.vv = dden_rank2_closed(DDenKind::AugSplit, a + 1, b + 1, p);
    g.fv = g.vf = dden_rank2_closed(DDenKind::AugScaled, a, b, p);
    return g;
}

}  // namespace krden
