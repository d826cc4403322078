#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>

#include "krden/lattice.hpp"
#include "krden/rep_count.hpp"

using namespace krden;

TEST_CASE("search counter agrees with full enumeration") {
    std::vector<QuadLattice> sources = {
        lat_diag(3, {Rat(1)}), lat_diag(3, {Rat(1), Rat(2)}),
        lat_selfdual(3, 2, 1), lat_diag(3, {Rat(1), Rat(3)}),
        make_lattice(3, {{Rat(1), Rat(1)}, {Rat(1), Rat(2)}})};
    std::vector<QuadLattice> targets = {lat_diag(3, {Rat(1)}), lat_diag(3, {Rat(2)}),
                                        lat_diag(3, {Rat(3)}),
                                        lat_diag(3, {Rat(1), Rat(2)})};
    for (const QuadLattice& M : sources) {
        for (const QuadLattice& L : targets) {
            if (L.rank() > M.rank()) continue;
            for (long d : {1L, 2L}) {
                CHECK(count_reps(M, L, d) == count_reps_naive(M, L, d));
            }
            CHECK(count_prim_reps(M, L, 1) <= count_reps(M, L, 1));
        }
    }
    CHECK(count_reps(lat_diag(5, {Rat(1), Rat(1)}), lat_diag(5, {Rat(1)}), 1) ==
          count_reps_naive(lat_diag(5, {Rat(1), Rat(1)}), lat_diag(5, {Rat(1)}), 1));
}

TEST_CASE("hand-counted solutions at depth one") {
    // x^2 = 1 mod 3 has solutions 1, 2; primitivity excludes nothing.
    QuadLattice one = lat_diag(3, {Rat(1)});
    CHECK(count_reps(one, one, 1) == 2);
    CHECK(count_prim_reps(one, one, 1) == 2);
    // x^2 = 3 mod 3: x = 0 only, and it is imprimitive.
    CHECK(count_reps(one, lat_diag(3, {Rat(3)}), 1) == 1);
    CHECK(count_prim_reps(one, lat_diag(3, {Rat(3)}), 1) == 0);
    // x^2 = 2 mod 3 has no solution.
    CHECK(count_reps(one, lat_diag(3, {Rat(2)}), 1) == 0);
}

TEST_CASE("normalization and stabilization of known densities") {
    RepCount rc = density_brute(lat_selfdual(3, 2, 1), lat_diag(3, {Rat(1)}));
    CHECK(rc.stabilized);
    CHECK(rc.normalized == Rat(2, 3));
    CHECK(density_brute(lat_selfdual(5, 2, 1), lat_diag(5, {Rat(1)})).normalized ==
          Rat(4, 5));
    // Square case m = n = 1: the normalizing exponent is zero, so the value
    // is the plain solution count of x^2 = 1, which is 2 at every depth.
    CHECK(density_brute(lat_diag(3, {Rat(1)}), lat_diag(3, {Rat(1)})).normalized == 2);
}

TEST_CASE("negative-valuation entries are cleared consistently") {
    // Scaling both sides by p^{-1} multiplies the density by p^{-n(n+1)/2}.
    Rat base = density_brute(lat_diag(3, {Rat(1), Rat(2)}), lat_diag(3, {Rat(1)}))
                   .normalized;
    Rat scaled = density_brute(lat_diag(3, {Rat(1, 3), Rat(2, 3)}),
                               lat_diag(3, {Rat(1, 3)}))
                     .normalized;
    CHECK(scaled == base / 3);
    RepCount rc = rep_count_at(lat_diag(3, {Rat(1, 3)}), lat_diag(3, {Rat(1, 3)}), 2);
    CHECK(rc.normalized == Rat(2, 3));
}

TEST_CASE("primitive closed form against the brute counter") {
    for (long p : {3L, 5L}) {
        for (long k = 1; k <= 3; ++k) {
            for (int eps : {1, -1}) {
                QuadLattice S = lat_selfdual(p, static_cast<int>(k), eps);
                for (long w : {1L, default_nonresidue(p)}) {
                    for (long nu = 0; nu <= 1; ++nu) {
                        Rat s = Rat(w) * p_power(p, nu);
                        Rat brute =
                            density_brute(S, lat_diag(p, {s}), true).normalized;
                        CHECK(pden_closed(k, eps, s, p) == brute);
                    }
                }
            }
        }
        CHECK(pden_closed(0, 1, Rat(1), p) == 0);
        CHECK(pden_closed(2, 1, Rat(1, p), p) == 0);
        CHECK(pden_closed(3, -1, Rat(2, p * p), p) == 0);
    }
    // Spot values of the closed form itself.
    CHECK(pden_closed(1, 1, Rat(1), 3) == 2);
    CHECK(pden_closed(1, 1, Rat(2), 3) == 0);
    CHECK(pden_closed(2, 1, Rat(3), 3) == Rat(4, 3));
    CHECK(pden_closed(2, -1, Rat(3), 3) == 0);
    CHECK(pden_closed(3, 1, Rat(3), 3) == Rat(8, 9));
}

TEST_CASE("vertex rank-1 density equals the stabilized search") {
    for (int e1 : {1, -1}) {
        for (int e2 : {1, -1}) {
            QuadLattice M =
                orthosum(rescale(lat_selfdual(3, 2, e1), 1), lat_selfdual(3, 2, e2));
            for (long w : {1L, 2L}) {
                for (long nu = 0; nu <= 1; ++nu) {
                    Rat s = Rat(w) * p_power(3, nu);
                    CHECK(den_vertex_rank1(2, e1, 2, e2, s, 3) ==
                          density_brute(M, lat_diag(3, {s})).normalized);
                }
            }
        }
    }
}

TEST_CASE("node budget interrupts the search") {
    CHECK(search_budget() == 50000000);
    setenv("KRDEN_BUDGET", "5", 1);
    CHECK(search_budget() == 5);
    CHECK_THROWS_AS(count_reps(lat_selfdual(3, 2, 1), lat_diag(3, {Rat(1)}), 2),
                    budget_exceeded);
    unsetenv("KRDEN_BUDGET");
    CHECK(search_budget() == 50000000);
}

TEST_CASE("depth bound rejects overflow-prone requests") {
    CHECK_THROWS(count_reps(lat_diag(3, {Rat(1)}), lat_diag(3, {Rat(1)}), 25));
}
