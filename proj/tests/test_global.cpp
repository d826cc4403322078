#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <vector>

#include "krden/density.hpp"
#include "krden/global.hpp"
#include "krden/kr.hpp"
#include "krden/lattice.hpp"
#include "krden/padic.hpp"

using namespace krden;

namespace {

TMatrix make_t(Rat t11, Rat t22, Rat t33, Rat t12, Rat t13, Rat t23) {
    TMatrix T;
    T.t[0][0] = t11;
    T.t[1][1] = t22;
    T.t[2][2] = t33;
    T.t[0][1] = T.t[1][0] = t12;
    T.t[0][2] = T.t[2][0] = t13;
    T.t[1][2] = T.t[2][1] = t23;
    return T;
}

TMatrix t_diag(long m1, long m2, long m3) {
    return make_t(Rat(m1), Rat(m2), Rat(m3), Rat(0), Rat(0), Rat(0));
}

bool contains(const std::vector<long>& v, long x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

TEST_CASE("determinant and definiteness of half-integral matrices") {
    CHECK(t_diag(1, 1, 1).det() == 1);
    CHECK(t_diag(1, 1, 1).positive_definite());
    CHECK(make_t(Rat(1), Rat(1), Rat(1), Rat(1, 2), Rat(1, 2), Rat(1, 2))
              .det() == Rat(1, 2));
    CHECK_FALSE(make_t(Rat(1), Rat(1), Rat(1), Rat(1), Rat(0), Rat(0))
                    .positive_definite());
    CHECK_FALSE(t_diag(1, 1, 1).det() == 0);
    TMatrix neg = t_diag(1, 1, 1);
    neg.t[0][0] = Rat(-1);
    CHECK_FALSE(neg.positive_definite());
}

TEST_CASE("enumeration of positive-definite completions of a diagonal") {
    // Off-diagonal doubles range over {-1, 0, 1}; the determinant
    // 1 - (s12^2 + s13^2 + s23^2)/4 + s12 s13 s23/4 is positive except
    // when all three are nonzero with negative product.
    std::vector<TMatrix> ts = enumerate_T(1, 1, 1);
    CHECK(ts.size() == 23);
    for (const TMatrix& T : ts) {
        CHECK(T.positive_definite());
        CHECK(T.t[0][0] == 1);
        CHECK(T.t[1][1] == 1);
        CHECK(T.t[2][2] == 1);
        CHECK(T.t[0][1] == T.t[1][0]);
        CHECK(valuation(T.t[0][1] * 2, 2) >= 0);
    }
    CHECK_THROWS_AS(enumerate_T(0, 1, 1), std::invalid_argument);
}

TEST_CASE("local failure places of the split quaternary form") {
    // The unit cube fails only at 2, the prototypical ramified place.
    CHECK(diff_set(t_diag(1, 1, 1)) == std::vector<long>{2});
    CHECK(diff_set(t_diag(1, 1, 3)) == std::vector<long>{3});
    // The odd part of det(2T) is 3, yet only 2 fails: the even-parity part
    // <2, 1> of the localized sum is already isotropic at 3.
    CHECK(diff_set(t_diag(2, 1, 3)) == std::vector<long>{2});
    for (const TMatrix& T : enumerate_T(1, 1, 1)) {
        CHECK(diff_set(T).size() % 2 == 1);
    }
    TMatrix singular = make_t(Rat(1), Rat(1), Rat(1), Rat(1), Rat(0), Rat(0));
    CHECK_THROWS_AS(diff_set(singular), std::invalid_argument);
}

TEST_CASE("isotropy oracle agrees with the invariant computation") {
    CHECK(represented_oracle(t_diag(1, 1, 1), 3));
    CHECK_FALSE(represented_oracle(t_diag(1, 1, 3), 3));
    for (const TMatrix& T : enumerate_T(1, 1, 1))
        for (long v : {3L, 5L}) {
            CHECK(represented_oracle(T, v) == !contains(diff_set(T), v));
        }
    for (const TMatrix& T : enumerate_T(1, 2, 3))
        for (long v : {3L, 5L, 7L}) {
            CHECK(represented_oracle(T, v) == !contains(diff_set(T), v));
        }
}

TEST_CASE("localized lattices carry the determinant valuation") {
    QuadLattice L = t_lattice(t_diag(1, 1, 3), 3);
    CHECK(gk_invariants(L) == std::vector<long>{0, 0, 1});
    CHECK(is_anisotropic(L));
    for (const TMatrix& T : enumerate_T(1, 1, 2)) {
        QuadLattice lt = t_lattice(T, 3);
        std::vector<long> gk = gk_invariants(lt);
        long total = std::accumulate(gk.begin(), gk.end(), 0L);
        CHECK(total == valuation(T.det(), 3));
        CHECK(std::is_sorted(gk.begin(), gk.end()));
    }
}

TEST_CASE("whittaker factors reduce to local densities") {
    TMatrix T = t_diag(1, 1, 3);
    QuadLattice L = t_lattice(T, 3);
    for (long k : {0L, 1L}) {
        CHECK(whittaker_factor(T, 3, k) ==
              den_at(lat_hyperbolic(3, 2), L, k));
        CHECK(whittaker_factor(T, 3, k, WhittakerLattice::H0p) ==
              Rat(1, 27) * den_at(lat_eichler(3), L, k));
        CHECK(whittaker_factor(T, 3, k, WhittakerLattice::H0pDual) ==
              Rat(27) * den_at(lat_eichler_dual(3), L, k));
    }
    // At a place outside Diff the self-dual factor is nonzero already at
    // k = 0; at the failing place it vanishes there.
    CHECK(whittaker_factor(T, 5, 0) != 0);
    CHECK(whittaker_factor(T, 3, 0) == 0);
}

TEST_CASE("local terms of the intersection identity") {
    TMatrix T = t_diag(1, 1, 3);
    QuadLattice L = t_lattice(T, 3);
    CHECK(kr_local_term(T, 3, 'Z') == -1);
    CHECK(kr_local_term(T, 3, 'Z') == int_Z(L).value);
    CHECK(kr_local_term(T, 3, 'Y') == int_Y(L).value + 1);
    CHECK(kr_local_term(T, 3, 'Y') == 33);

    TMatrix deep = t_diag(1, 1, 27);
    CHECK(kr_local_term(deep, 3, 'Z') == -1);

    // Diff must be exactly {p}.
    CHECK_THROWS_AS(kr_local_term(t_diag(1, 1, 1), 3, 'Z'),
                    std::invalid_argument);
    CHECK_THROWS_AS(kr_local_term(T, 5, 'Z'), std::invalid_argument);
    CHECK_THROWS_AS(kr_local_term(T, 3, 'X'), std::invalid_argument);
}
