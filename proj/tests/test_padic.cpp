#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "krden/padic.hpp"

using namespace krden;

TEST_CASE("valuation of integers and rationals") {
    CHECK(valuation(Int(1), 3) == 0);
    CHECK(valuation(Int(18), 3) == 2);
    CHECK(valuation(Int(-27), 3) == 3);
    CHECK(valuation(Int(0), 3) == VAL_INF);
    CHECK(valuation(Rat(1, 3), 3) == -1);
    CHECK(valuation(Rat(9, 2), 3) == 2);
    CHECK(valuation(Rat(10, 9), 3) == -2);
    CHECK(valuation(Rat(0), 5) == VAL_INF);
}

TEST_CASE("unit part recovers the p-free factor") {
    CHECK(unit_part(Rat(18), 3) == Rat(2));
    CHECK(unit_part(Rat(-5, 27), 3) == Rat(-5));
    CHECK(unit_part(Rat(7), 5) == Rat(7));
    CHECK_THROWS(unit_part(Rat(0), 3));
    for (long w : {1L, 2L, 4L, 5L}) {
        Rat r = Rat(w) * Rat(81) / Rat(2);
        CHECK(r == unit_part(r, 3) * Rat(81) / 1);
    }
}

TEST_CASE("quadratic character of square classes") {
    CHECK(chi(Rat(1), 3) == 1);
    CHECK(chi(Rat(4), 3) == 1);
    CHECK(chi(Rat(2), 3) == -1);
    CHECK(chi(Rat(-1), 3) == -1);
    CHECK(chi(Rat(3), 3) == 0);
    CHECK(chi(Rat(1, 3), 3) == 0);
    CHECK(chi(Rat(2, 9), 3) == -1);
    CHECK(chi(Rat(-1), 5) == 1);
    CHECK(chi(Rat(2), 5) == -1);
    CHECK_THROWS(chi(Rat(0), 3));
}

TEST_CASE("legendre symbol matches the Euler criterion") {
    for (long p : {3L, 5L, 7L, 11L}) {
        for (long a = 1; a < p; ++a) {
            long e = 1;
            for (long i = 0; i < (p - 1) / 2; ++i) e = e * a % p;
            long expected = e == 1 ? 1 : -1;
            CHECK(legendre(Int(a), p) == expected);
            CHECK(legendre(Int(a + 3 * p), p) == expected);
        }
    }
}

TEST_CASE("hilbert symbol at odd places") {
    long p = 3;
    long u = default_nonresidue(p);
    CHECK(hilbert(Rat(u), Rat(p), p) == -1);
    CHECK(hilbert(Rat(u), Rat(u), p) == 1);
    CHECK(hilbert(Rat(1), Rat(p), p) == 1);
    CHECK(hilbert(Rat(p), Rat(p), p) == chi(Rat(-1), p));
    // Symmetry and multiplicativity on a unit/prime sample.
    std::vector<Rat> sample = {Rat(1), Rat(u), Rat(p), Rat(u * p), Rat(-1), Rat(1, p)};
    for (const Rat& a : sample) {
        for (const Rat& b : sample) {
            CHECK(hilbert(a, b, p) == hilbert(b, a, p));
            for (const Rat& c : sample)
                CHECK(hilbert(a, b * c, p) == hilbert(a, b, p) * hilbert(a, c, p));
        }
    }
}

TEST_CASE("hilbert symbol at 2 and at the real place") {
    CHECK(hilbert(Rat(-1), Rat(-1), 0) == -1);
    CHECK(hilbert(Rat(1), Rat(-1), 0) == 1);
    CHECK(hilbert(Rat(-1), Rat(-1), 2) == -1);
    CHECK(hilbert(Rat(2), Rat(3), 2) == -1);
    CHECK(hilbert(Rat(3), Rat(3), 2) == -1);
    CHECK(hilbert(Rat(5), Rat(2), 2) == -1);
}

TEST_CASE("hilbert product formula over all places") {
    std::vector<std::pair<Rat, Rat>> pairs = {
        {Rat(3), Rat(5)},   {Rat(-2), Rat(15)}, {Rat(6), Rat(-10)},
        {Rat(7), Rat(7)},   {Rat(-1), Rat(30)}, {Rat(21), Rat(-5)},
    };
    for (const auto& [a, b] : pairs) {
        int prod = hilbert(a, b, 0) * hilbert(a, b, 2);
        for (long v : {3L, 5L, 7L, 11L, 13L}) prod *= hilbert(a, b, v);
        CHECK(prod == 1);
    }
}

TEST_CASE("modular inverse and rational reduction") {
    CHECK(mod_inverse(Int(2), Int(27)) == 14);
    CHECK(mod_inverse(Int(10), Int(27)) * 10 % 27 == 1);
    CHECK(rat_mod(Rat(5), 3, Int(27)) == 5);
    CHECK(rat_mod(Rat(-1), 3, Int(27)) == 26);
    CHECK(rat_mod(Rat(1, 2), 3, Int(27)) == 14);
    CHECK(rat_mod(Rat(5, 4), 3, Int(9)) * 4 % 9 == 5);
    CHECK_THROWS(rat_mod(Rat(1, 3), 3, Int(27)));
}

TEST_CASE("residue elements wrap at the depth") {
    ResidueElement a = make_residue(3, 2, Int(7));
    ResidueElement b = make_residue(3, 2, Int(5));
    CHECK(res_add(a, b).value == 3);
    CHECK(res_mul(a, b).value == 8);
    ResidueElement half = make_residue(3, 3, Rat(1, 2));
    CHECK(res_mul(half, make_residue(3, 3, Int(2))).value == 1);
}

TEST_CASE("smallest non-residues and primality") {
    CHECK(default_nonresidue(3) == 2);
    CHECK(default_nonresidue(5) == 2);
    CHECK(default_nonresidue(7) == 3);
    CHECK(default_nonresidue(11) == 2);
    CHECK(is_odd_prime(3));
    CHECK(is_odd_prime(5));
    CHECK(is_odd_prime(101));
    CHECK_FALSE(is_odd_prime(2));
    CHECK_FALSE(is_odd_prime(1));
    CHECK_FALSE(is_odd_prime(9));
    CHECK_FALSE(is_odd_prime(15));
}

TEST_CASE("rational string round trip") {
    CHECK(rat_to_string(Rat(5)) == "5");
    CHECK(rat_to_string(Rat(-2, 3)) == "-2/3");
    CHECK(rat_from_string("22/7") == Rat(22, 7));
    CHECK(rat_from_string("-9") == Rat(-9));
    for (const Rat& r : {Rat(0), Rat(17, 25), Rat(-81, 2)})
        CHECK(rat_from_string(rat_to_string(r)) == r);
}
