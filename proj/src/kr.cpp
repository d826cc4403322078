#include "krden/kr.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

namespace krden {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

std::string inv_str(const std::vector<long>& a) {
    std::ostringstream os;
    os << '(';
    for (size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
    os << ')';
    return os.str();
}

void push_step(KRResult& res, const std::vector<long>& a, const Rat& step) {
    res.trace.push_back("difference step at " + inv_str(a) + ": " +
                        rat_to_string(step));
}

void check_integer(const Rat& v, const char* who) {
    if (denominator(v) != 1)
        throw std::logic_error(std::string(who) + ": non-integer value " +
                               rat_to_string(v));
}

// Scale factor turning -P'(1) of den_poly(H_4^+, L) into the derived
// density of the self-dual rank-4 source.  Determined per prime by the
// difference identity dDen(H, Lflat+<x>) - dDen(H, Lflat+<x/p>) =
// dDen(AugSplit, q(x), Lflat) evaluated at a rank-1 target pair where both
// densities come from the closed character-sum engine.
Rat hyper_scale(long p) {
    static std::map<long, Rat> cache;
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;

    long u = default_nonresidue(p);
    long w = chi(Rat(-1), p) == 1 ? u : 1;  // chi(-w) = -1, so both targets
                                            // below are anisotropic
    Rat qx = Rat(w) * p * p;
    QuadLattice H4 = lat_hyperbolic(p, 2);
    DensityPolynomial P1 = den_poly(H4, lat_diag(p, {Rat(1), qx}));
    DensityPolynomial P2 = den_poly(H4, lat_diag(p, {Rat(1), Rat(w)}));
    if (!P1.vanishes_at_one() || !P2.vanishes_at_one())
        throw std::logic_error("hyper_scale: reference polynomial does not vanish at 1");
    Rat rhs = dden(DDenKind::AugSplit, qx, lat_diag(p, {Rat(1)}));
    Rat denom = P2.derivative_at(1) - P1.derivative_at(1);
    if (denom == 0) throw std::logic_error("hyper_scale: degenerate fit instance");
    Rat scale = rhs / denom;
    cache[p] = scale;
    return scale;
}

// Interpolated base values of the self-dual recursion at the two
// anisotropic terminal patterns (0,0,1) and (0,1,1).
Rat hyper_base(long p, bool pattern_011) {
    static std::map<std::pair<long, bool>, Rat> cache;
    auto key = std::make_pair(p, pattern_011);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    QuadLattice base =
        pattern_011
            ? orthosum(lat_diag(p, {Rat(1)}), rescale(lat_selfdual(p, 2, -1), 1))
            : orthosum(lat_selfdual(p, 2, -1), lat_diag(p, {Rat(p)}));
    DensityPolynomial P = den_poly(lat_hyperbolic(p, 2), base);
    if (!P.vanishes_at_one())
        throw std::logic_error("hyper_base: polynomial does not vanish at 1");
    Rat value = hyper_scale(p) * -P.derivative_at(1);
    cache[key] = value;
    return value;
}

}  // namespace

KRResult dden_h0p(const QuadLattice& L) {
    require(L.rank() == 3, "dden_h0p: rank-3 lattice required");
    require(is_integral(L), "dden_h0p: integral lattice required");
    require(is_anisotropic(L), "dden_h0p: anisotropic lattice required");
    long p = L.p;
    std::vector<long> a = fundamental_invariants(L);
    KRResult res;
    res.value = 0;
    long steps = 0;
    while (a[2] >= 2) {
        Rat step =
            2 * dden_rank2_closed(DDenKind::AugScaled, a[0], a[1], p) +
            2 * dden_rank2_closed(DDenKind::AugSplit, a[0] + 1, a[1] + 1, p);
        res.value += step;
        push_step(res, a, step);
        a[2] -= 2;
        std::sort(a.begin(), a.end());
        ++steps;
    }
    if (a == std::vector<long>{0, 0, 1}) {
        res.value += -1;
        res.trace.push_back("base (0,0,1): -1");
    } else if (a == std::vector<long>{0, 1, 1}) {
        res.trace.push_back("base (0,1,1): 0");
    } else {
        throw std::logic_error("dden_h0p: terminal " + inv_str(a) +
                               " is isotropic-only and cannot be reached");
    }
    res.route = steps ? "recursion" : "base-case";
    check_integer(res.value, "dden_h0p");
    return res;
}

KRResult dden_h0p_dual(const QuadLattice& L) {
    require(L.rank() == 3, "dden_h0p_dual: rank-3 lattice required");
    require(min_val(L) >= -1, "dden_h0p_dual: L[p] must be integral");
    require(is_anisotropic(L), "dden_h0p_dual: anisotropic lattice required");
    long p = L.p;
    std::vector<long> a = fundamental_invariants(L);
    KRResult res;
    res.value = 0;
    long steps = 0;
    while (a[2] >= 1) {
        Rat step =
            2 * dden_rank2_closed(DDenKind::AugScaled, a[0] + 1, a[1] + 1, p) +
            2 * dden_rank2_closed(DDenKind::AugSplit, a[0] + 2, a[1] + 2, p);
        res.value += step;
        push_step(res, a, step);
        a[2] -= 2;
        std::sort(a.begin(), a.end());
        ++steps;
    }
    if (a == std::vector<long>{-1, -1, 0}) {
        res.trace.push_back("base (-1,-1,0): 0");
    } else if (a == std::vector<long>{-1, 0, 0}) {
        res.value += 1;
        res.trace.push_back("base (-1,0,0): 1");
    } else {
        throw std::logic_error("dden_h0p_dual: terminal " + inv_str(a) +
                               " is isotropic-only and cannot be reached");
    }
    res.route = steps ? "recursion" : "base-case";
    check_integer(res.value, "dden_h0p_dual");
    return res;
}

KRResult dden_hyperspecial(const QuadLattice& L) {
    require(L.rank() == 3, "dden_hyperspecial: rank-3 lattice required");
    require(is_anisotropic(L), "dden_hyperspecial: anisotropic lattice required");
    long p = L.p;
    KRResult res;
    res.value = 0;
    if (!is_integral(L)) {
        res.route = "base-case";
        res.trace.push_back("non-integral: 0");
        return res;
    }
    std::vector<long> a = fundamental_invariants(L);
    long steps = 0;
    while (a[2] >= 2) {
        Rat step = dden_rank2_closed(DDenKind::AugSplit, a[0] + 1, a[1] + 1, p);
        res.value += step;
        push_step(res, a, step);
        a[2] -= 2;
        std::sort(a.begin(), a.end());
        ++steps;
    }
    if (a == std::vector<long>{0, 0, 1}) {
        Rat b = hyper_base(p, false);
        res.value += b;
        res.trace.push_back("interpolated base (0,0,1): " + rat_to_string(b));
    } else if (a == std::vector<long>{0, 1, 1}) {
        Rat b = hyper_base(p, true);
        res.value += b;
        res.trace.push_back("interpolated base (0,1,1): " + rat_to_string(b));
    } else {
        throw std::logic_error("dden_hyperspecial: terminal " + inv_str(a) +
                               " is isotropic-only and cannot be reached");
    }
    res.route = steps ? "recursion" : "interpolation";
    check_integer(res.value, "dden_hyperspecial");
    return res;
}

KRResult int_Z(const QuadLattice& L) {
    require(L.rank() == 3, "int_Z: rank-3 lattice required");
    if (!is_integral(L)) {
        KRResult res;
        res.value = 0;
        res.route = "base-case";
        res.trace.push_back("non-integral: empty cycle");
        return res;
    }
    if (!is_anisotropic(L)) {
        KRResult res;
        res.value = 0;
        res.route = "base-case";
        res.trace.push_back("isotropic: 0");
        return res;
    }
    return dden_h0p(L);
}

KRResult int_Y(const QuadLattice& L) {
    KRResult res = dden_h0p_dual(L);
    res.value -= 1;
    res.trace.push_back("exceptional correction: -1");
    return res;
}

KRResult int_CM(const QuadLattice& M) {
    require(M.rank() == 2, "int_CM: rank-2 lattice required");
    require(is_integral(M), "int_CM: integral lattice required");
    require(is_anisotropic(M), "int_CM: anisotropic lattice required");
    QuadLattice L = orthosum(lat_diag(M.p, {Rat(1)}), M);
    require(is_anisotropic(L),
            "int_CM: <1> + M must be anisotropic (M must embed in the "
            "trace-zero quaternions)");
    KRResult res = dden_h0p(L);
    res.trace.insert(res.trace.begin(), "augment to <1> + M");
    return res;
}

}  // namespace krden
