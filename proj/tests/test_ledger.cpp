#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "krden/density.hpp"
#include "krden/kr.hpp"
#include "krden/lattice.hpp"
#include "krden/ledger.hpp"

using namespace krden;

TEST_CASE("line-bundle pairing on the product of two lines") {
    CHECK(pic_intersect(PicClass{1, 0}, PicClass{0, 1}) == 1);
    CHECK(pic_intersect(PicClass{1, 0}, PicClass{1, 0}) == 0);
    CHECK(pic_intersect(PicClass{2, 3}, PicClass{4, 5}) == 22);
    CHECK(pic_intersect(PicClass{2, 3}, PicClass{4, 5}) ==
          pic_intersect(PicClass{4, 5}, PicClass{2, 3}));
    CHECK(exc_selfclass() == PicClass{-1, -1});
    CHECK(pic_intersect(exc_selfclass(), exc_selfclass()) == 2);
}

TEST_CASE("exceptional multiplicities step by the residue degree") {
    CHECK(exc_multiplicity(1, 3) == 2);
    CHECK(exc_multiplicity(2, 3) == 4);
    CHECK(exc_multiplicity(3, 3) == 6);
    CHECK(exc_multiplicity(4, 3) == 12);
    CHECK(exc_multiplicity(5, 3) == 18);
    CHECK(exc_multiplicity(2, 5) == 6);
    CHECK_THROWS(exc_multiplicity(0, 3));
}

TEST_CASE("special divisor decomposition closes up") {
    for (long n = 0; n <= 6; ++n) {
        SpecialDecomposition d = decompose_special(n);
        CHECK(d.exc_coefficient == n + 1);
        CHECK(d.terms.size() == static_cast<size_t>(n / 2 + 1));
        CHECK(d.restriction_total() == PicClass{n + 1, n});
        // Adding (n+1) exceptional classes to the restricted strict
        // transforms recovers the class O(0, -1).
        PicClass total = d.restriction_total();
        total.m += (n + 1) * exc_selfclass().m;
        total.n += (n + 1) * exc_selfclass().n;
        CHECK(total == PicClass{0, -1});
        for (const DtildeTerm& t : d.terms) {
            CHECK(t.peeled_valuation == n - 2 * t.index);
            CHECK(t.strata.size() == (t.peeled_valuation == 0   ? 1u
                                      : t.peeled_valuation == 1 ? 3u
                                                                : 4u));
        }
    }
    SpecialDecomposition d3 = decompose_special(3);
    CHECK(d3.terms[0].restriction == PicClass{2, 2});
    CHECK(d3.terms[1].restriction == PicClass{2, 1});
}

TEST_CASE("base-case ledger arithmetic") {
    // Two fibral components of self-pairing -1 plus one crossing point.
    long base = 2 * pic_intersect(exc_selfclass(), PicClass{1, 0}) + 1;
    CHECK(base == -1);
    CHECK(Rat(base) == int_Z(lat_diag(3, {Rat(1), Rat(1), Rat(3)})).value);
}

TEST_CASE("geometric difference strata match the closed forms") {
    for (long a = 0; a <= 2; ++a) {
        for (long b = a; b <= 3; ++b) {
            long xval = std::max(b, 2L);
            GeometricDifference g = geometric_difference(a, b, xval, 3);
            CHECK(g.ff == dden_rank2_closed(DDenKind::AugSplit, a + 1, b + 1, 3));
            CHECK(g.vv == g.ff);
            CHECK(g.fv == dden_rank2_closed(DDenKind::AugScaled, a, b, 3));
            CHECK(g.vf == g.fv);
        }
    }
    CHECK_THROWS(geometric_difference(1, 0, 5, 3));
    CHECK_THROWS(geometric_difference(0, 3, 2, 3));
}

TEST_CASE("geometric difference reproduces the analytic recursion step") {
    // One peel of the rank-3 recursion at invariants (a0, a1) removes
    // exactly the four strata contributions.
    for (auto [a0, a1] : std::initializer_list<std::pair<long, long>>{
             {0, 0}, {0, 1}, {1, 1}}) {
        Rat step = 2 * dden_rank2_closed(DDenKind::AugScaled, a0, a1, 3) +
                   2 * dden_rank2_closed(DDenKind::AugSplit, a0 + 1, a1 + 1, 3);
        CHECK(geometric_difference(a0, a1, std::max(a1, 2L), 3).sum() == step);
    }
}
