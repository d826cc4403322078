#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "krden/density.hpp"
#include "krden/lattice.hpp"
#include "krden/rep_count.hpp"

using namespace krden;

TEST_CASE("engine equals the stabilized search on rank <= 2 targets") {
    std::vector<QuadLattice> sources = {
        lat_selfdual(3, 2, 1),     lat_selfdual(3, 2, -1),
        rescale(lat_selfdual(3, 2, 1), 1), lat_eichler(3),
        lat_diag(3, {Rat(1), Rat(3)}),     lat_selfdual(3, 3, 1)};
    std::vector<std::vector<Rat>> targets = {
        {Rat(1)}, {Rat(2)}, {Rat(3)}, {Rat(6)},
        {Rat(1), Rat(1)}, {Rat(1), Rat(3)}, {Rat(2), Rat(6)}};
    for (const QuadLattice& M : sources) {
        for (const auto& tdiag : targets) {
            QuadLattice L = lat_diag(3, tdiag);
            if (L.rank() > M.rank()) continue;
            CHECK(den_core(M, L) == density_brute(M, L).normalized);
        }
    }
}

TEST_CASE("engine equals the stabilized search on rank-3 targets") {
    // Two-scale source, handled by the primitive stratification.
    QuadLattice h0 = lat_eichler(3);
    for (const auto& tdiag : std::vector<std::vector<Rat>>{
             {Rat(1), Rat(1), Rat(3)}, {Rat(1), Rat(2), Rat(3)},
             {Rat(1), Rat(1), Rat(1)}}) {
        QuadLattice L = lat_diag(3, tdiag);
        CHECK(den_core(h0, L) == density_brute(h0, L).normalized);
    }
    // Unimodular source, handled by the symmetric-space transform.
    CHECK(den_core(lat_selfdual(3, 4, 1), lat_diag(3, {Rat(1), Rat(1), Rat(1)})) ==
          density_brute(lat_selfdual(3, 4, 1), lat_diag(3, {Rat(1), Rat(1), Rat(1)}))
              .normalized);
    CHECK(den_core(lat_selfdual(3, 4, -1), lat_diag(3, {Rat(1), Rat(2), Rat(3)})) ==
          density_brute(lat_selfdual(3, 4, -1), lat_diag(3, {Rat(1), Rat(2), Rat(3)}))
              .normalized);
}

TEST_CASE("negative-valuation sources go through the depth transfer") {
    QuadLattice obd = lat_quat_order_dual(3);
    QuadLattice companion = lat_diag(3, {Rat(1), Rat(-2), Rat(-3), Rat(6)});
    for (const auto& tdiag : std::vector<std::vector<Rat>>{
             {Rat(1), Rat(1), Rat(3)}, {Rat(1), Rat(1), Rat(6)}}) {
        QuadLattice L = lat_diag(3, tdiag);
        CHECK(den_core(obd, L) == p_power(3, -6) * den_core(companion, L));
    }
    CHECK(den_core(obd, lat_diag(3, {Rat(1), Rat(1), Rat(3)})) ==
          2 * Rat(16) / pow_int(3, 7));
}

TEST_CASE("den_at matches the engine on an isometric augmented source") {
    QuadLattice M = lat_selfdual(3, 2, -1);
    QuadLattice L = lat_diag(3, {Rat(1), Rat(3)});
    for (long k = 1; k <= 3; ++k) {
        CHECK(den_at(M, L, k) ==
              den_core(orthosum(M, lat_hyperbolic(3, static_cast<int>(k))), L));
    }
    CHECK(den_at(M, L, 0) == den_core(M, L));
}

TEST_CASE("density polynomial certifies itself beyond its nodes") {
    QuadLattice M = lat_eichler(3);
    QuadLattice L = lat_diag(3, {Rat(1), Rat(1), Rat(3)});
    DensityPolynomial P = den_poly(M, L);
    CHECK(P.provenance == "interpolated");
    CHECK(P.vanishes_at_one());
    for (long k = P.degree_bound + 2; k <= P.degree_bound + 4; ++k)
        CHECK(P.value_at(p_power(3, -k)) == den_at(M, L, k));

    QuadLattice iso = lat_diag(3, {Rat(1), Rat(2), Rat(3)});
    CHECK_FALSE(den_poly(M, iso).vanishes_at_one());
    CHECK_THROWS(dden(DDenKind::H0p, iso));
}

TEST_CASE("augmented derived densities match their closed forms") {
    const long p = 3;
    for (long a = 0; a <= 2; ++a) {
        for (long b = a; b <= 2; ++b) {
            for (long w1 : {1L, 2L}) {
                for (long w2 : {1L, 2L}) {
                    QuadLattice Lf = lat_diag(
                        p, {Rat(w1) * p_power(p, a), Rat(w2) * p_power(p, b)});
                    long c0 = std::max(b, 2L);
                    for (long c : {c0, c0 + 1}) {
                        for (long w : {1L, 2L}) {
                            Rat qx = Rat(w) * p_power(p, c);
                            CHECK(dden(DDenKind::AugScaled, qx, Lf) ==
                                  dden_rank2_closed(DDenKind::AugScaled, a, b, p));
                            CHECK(dden(DDenKind::AugSplit, qx, Lf) ==
                                  dden_rank2_closed(DDenKind::AugSplit, a + 1, b + 1, p));
                        }
                    }
                }
            }
        }
    }
    // Non-integral targets of the split flavor evaluate to zero.
    CHECK(dden_rank2_closed(DDenKind::AugSplit, 0, 2, p) == 0);
    CHECK(dden(DDenKind::AugSplit, Rat(9), lat_diag(p, {Rat(1, 3), Rat(3)})) == 0);
}

TEST_CASE("closed-form spot values") {
    CHECK(dden_rank2_closed(DDenKind::AugScaled, 0, 0, 3) == -1);
    CHECK(dden_rank2_closed(DDenKind::AugScaled, 1, 1, 3) == 8);
    CHECK(dden_rank2_closed(DDenKind::AugSplit, 1, 1, 3) == 1);
    CHECK(dden_rank2_closed(DDenKind::AugScaled, 1, 2, 3) ==
          9 * dden_rank2_closed(DDenKind::AugSplit, 1, 2, 3) - 1);
}

TEST_CASE("rank-4 derived densities at two primes") {
    CHECK(dden(DDenKind::H0p, lat_diag(3, {Rat(1), Rat(1), Rat(3)})) == -1);
    CHECK(dden(DDenKind::H0p, lat_diag(5, {Rat(1), Rat(2), Rat(5)})) == -1);
    CHECK(dden(DDenKind::H0pDual, lat_diag(3, {Rat(1, 3), Rat(1), Rat(1)})) == 1);
}

TEST_CASE("normalizers are cached and consistent") {
    for (DDenKind kind : {DDenKind::H0p, DDenKind::H0pDual, DDenKind::AugSplit,
                          DDenKind::AugScaled}) {
        Rat first = dden_normalizer(kind, 3);
        CHECK(first != 0);
        CHECK(dden_normalizer(kind, 3) == first);
    }
}

TEST_CASE("character-sum engine agrees with the symmetric-space sum") {
    std::vector<Rat> src = {Rat(1), Rat(-2), Rat(3), Rat(-6)};
    for (const auto& tgt : std::vector<std::vector<Rat>>{
             {Rat(1)}, {Rat(3)}, {Rat(1), Rat(2)}, {Rat(1), Rat(3)}}) {
        for (long d = 2; d <= 3; ++d) {
            CHECK(detail::engine_normalized(3, src, tgt, d) ==
                  detail::symspace_normalized(3, src, tgt, d));
        }
    }
}
