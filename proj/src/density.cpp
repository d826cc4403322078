#include "krden/density.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "krden/rep_count.hpp"

namespace krden {

namespace {

using i64 = long long;

// Element a + b*g of Q[g], g^2 = chi(-1) p (the quadratic Gauss sum).
struct Gp {
    Rat a, b;
};

Gp operator+(const Gp& x, const Gp& y) { return {x.a + y.a, x.b + y.b}; }
Gp operator-(const Gp& x, const Gp& y) { return {x.a - y.a, x.b - y.b}; }
Gp scale(const Rat& c, const Gp& x) { return {c * x.a, c * x.b}; }

// Valuation/character data of a target value.
struct TInfo {
    long v;    // exact valuation, VAL_INF for zero
    int cneg;  // chi of minus the unit part
};

// Per-depth context for the closed character-sum assembly over a
// diagonalized integral source.
struct EngineCtx {
    long p;
    long d;
    long m;
    int chim1;
    Rat gsq;                 // g^2 = chi(-1) p
    std::vector<long> aval;  // valuations of source q-values
    std::vector<int> achi;   // chi of their unit parts
    // P[sidx][A] = product over the source values of the depth-d quadratic
    // sums at scale p^A and unit class s.
    std::array<std::vector<Gp>, 2> P;

    Gp mul(const Gp& x, const Gp& y) const {
        return {x.a * y.a + x.b * y.b * gsq, x.a * y.b + x.b * y.a};
    }

    Rat ppow(long e) const { return p_power(p, e); }

    Rat phi(long e) const { return ppow(e) - ppow(e - 1); }  // #units mod p^e

    // Full quadratic sum sum_{c mod p^e} e_e(A c^2) for A of effective
    // valuation v and unit class cls.
    Gp gfull(long v, int cls, long e) const {
        if (v >= e) return {ppow(e), 0};
        long f = e - v;
        if (f % 2 == 0) return {ppow(v + f / 2), 0};
        return {0, Rat(cls) * ppow(v + (f - 1) / 2)};
    }

    // Same sum restricted to units c, f >= 1.
    Gp gu(long v, int cls, long f) const {
        if (f == 1) return gfull(v, cls, 1) - Gp{1, 0};
        return gfull(v, cls, f) - scale(Rat(p), gfull(v, cls, f - 2));
    }

    // Phase sum E(A, s; t) over the x of valuation A and unit class s.
    Gp esum(long A, int s, const TInfo& t) const {
        long e = d - A;
        Rat r = 0;
        if (t.v >= e) r += ppow(e);
        if (t.v >= e - 1) r -= ppow(e - 1);
        Gp out{r / 2, 0};
        if (t.v == e - 1) out.b = Rat(s * t.cneg) * ppow(e - 1) / 2;
        return out;
    }

    // Gauss sum sum_{b mod p^{d-A}} e_{d-A}(-t u_s^{-1} b^2).
    Gp gval(const TInfo& t, long A, int s) const {
        long e = d - A;
        return gfull(std::min(t.v, e), t.cneg * s, e);
    }

    void build(long p_, long d_, const std::vector<Rat>& src) {
        p = p_;
        d = d_;
        m = static_cast<long>(src.size());
        chim1 = chi(Rat(-1), p);
        gsq = Rat(chim1) * p;
        aval.clear();
        achi.clear();
        for (const Rat& a : src) {
            if (a == 0 || valuation(a, p) < 0)
                throw std::invalid_argument("engine: source values must be nonzero and integral");
            aval.push_back(valuation(a, p));
            achi.push_back(chi(unit_part(a, p), p));
        }
        for (int sidx = 0; sidx < 2; ++sidx) {
            int s = sidx == 0 ? 1 : -1;
            P[sidx].assign(d, Gp{1, 0});
            for (long A = 0; A < d; ++A) {
                Gp prod{1, 0};
                for (long r = 0; r < m; ++r)
                    prod = mul(prod, gfull(std::min(aval[r] + A, d), achi[r] * s, d));
                P[sidx][A] = prod;
            }
        }
    }

    TInfo tinfo(const Rat& t) const {
        if (t == 0) return {VAL_INF, 0};
        if (valuation(t, p) < 0)
            throw std::invalid_argument("engine: target values must be integral");
        int cu = chi(unit_part(t, p), p);
        return {valuation(t, p), chim1 * cu};
    }

    // K(t): the full-line sum of e_d(-t x) times the source products.
    Gp ksum(const TInfo& t) const {
        Gp out{ppow(d * m), 0};
        for (long A = 0; A < d; ++A)
            for (int sidx = 0; sidx < 2; ++sidx)
                out = out + mul(P[sidx][A], esum(A, sidx == 0 ? 1 : -1, t));
        return out;
    }

    // Suffix sums T(l; t) over the sub-line of valuation >= l.
    std::vector<Gp> tsuffix(const TInfo& t) const {
        std::vector<Gp> T(d + 1);
        T[d] = {ppow(d * m), 0};
        for (long l = d - 1; l >= 0; --l) {
            Gp acc = T[l + 1];
            for (int sidx = 0; sidx < 2; ++sidx)
                acc = acc + mul(P[sidx][l], esum(l, sidx == 0 ? 1 : -1, t));
            T[l] = acc;
        }
        return T;
    }

    // Unnormalized rank-1 sum.
    Gp z1(const Rat& t1r) const { return ksum(tinfo(t1r)); }

    // Unnormalized rank-2 sum over the symmetric character space, split by
    // the pivot structure of the matrix (alpha beta / beta gamma): the
    // alpha-pivot stratum (with gamma resummed freely), the gamma-pivot
    // strata with v(beta) at or above v(gamma), and the shear stratum where
    // beta is strictly minimal.
    Gp z2(const Rat& t1r, const Rat& t2r) const {
        TInfo t1 = tinfo(t1r), t2 = tinfo(t2r);
        TInfo t12 = tinfo(t1r + t2r);
        // v(alpha) <= v(beta):
        Gp bracket{ppow(d * m), 0};
        for (long A = 0; A < d; ++A) {
            for (int sidx = 0; sidx < 2; ++sidx) {
                int s = sidx == 0 ? 1 : -1;
                bracket = bracket + mul(P[sidx][A], mul(gval(t2, A, s), esum(A, s, t1)));
            }
        }
        Gp total = mul(ksum(t2), bracket);
        // v(gamma) = v(beta) = B < v(alpha):
        for (long B = 0; B < d; ++B) {
            if (t1.v < d - B - 1) continue;
            Gp inner{0, 0};
            for (int sidx = 0; sidx < 2; ++sidx) {
                int s = sidx == 0 ? 1 : -1;
                int negidx = chim1 * s == 1 ? 0 : 1;
                inner = inner + mul(P[sidx][B], mul(P[negidx][B], esum(B, s, t2)));
            }
            total = total + scale(ppow(d - B - 1) * phi(d - B), inner);
        }
        // v(gamma) = C < v(beta) = B < v(alpha):
        std::vector<Gp> T1 = tsuffix(t1);
        for (long C = 0; C + 1 < d; ++C) {
            for (long B = C + 1; B < d; ++B) {
                long f = d - 2 * B + C;
                for (int sidx = 0; sidx < 2; ++sidx) {
                    int s = sidx == 0 ? 1 : -1;
                    Gp sbeta = f <= 0 ? Gp{phi(d - B), 0}
                                      : scale(ppow(d - B - f),
                                              gu(std::min(t1.v, f), t1.cneg * s, f));
                    total = total +
                            mul(P[sidx][C], mul(esum(C, s, t2), mul(sbeta, T1[B + 1])));
                }
            }
        }
        // v(beta) = B strictly below v(alpha) and v(gamma):
        for (long B = 0; B < d; ++B) {
            if (t1.v < d - B - 1 || t12.v < d - B - 1) continue;
            Gp inner{0, 0};
            for (int sidx = 0; sidx < 2; ++sidx) {
                int s = sidx == 0 ? 1 : -1;
                int negidx = chim1 * s == 1 ? 0 : 1;
                inner = inner + mul(P[sidx][B], P[negidx][B]);
            }
            total = total + scale(ppow(2 * (d - B - 1)) * phi(d - B) / 2, inner);
        }
        return total;
    }
};

// ---------------------------------------------------------------------------
// Literal summation over the symmetric character space, with histogram
// accumulation in Z[zeta_{p^d}, g] and a final rationalization.

struct SymBrute {
    long p, d, n, m;
    i64 pd;
    int chim1;
    std::vector<long> aval;
    std::vector<int> achi;
    std::vector<i64> tmod;   // target values mod p^d
    std::vector<long> vtab;  // valuation of x in [0, p^d), d for 0
    std::vector<int> ctab;   // chi of the unit part, 0 for x = 0
    std::vector<i64> itab;   // inverse mod p^d for units, 0 otherwise
    std::vector<i64> ppows;
    long kmax;
    std::vector<i64> hist;  // [phase][K][gbit]

    void init(long p_, long d_, const std::vector<Rat>& src, const std::vector<Rat>& tgt) {
        p = p_;
        d = d_;
        n = static_cast<long>(tgt.size());
        m = static_cast<long>(src.size());
        chim1 = chi(Rat(-1), p);
        Int pdi = pow_int(p, d);
        if (pdi > 2'000'000) throw budget_exceeded("symspace: depth too large");
        pd = static_cast<i64>(pdi);
        double iters = std::pow(static_cast<double>(pd), n * (n + 1) / 2.0);
        if (iters > 6e8) throw budget_exceeded("symspace: character space too large");
        aval.clear();
        achi.clear();
        for (const Rat& a : src) {
            if (a == 0 || valuation(a, p) < 0)
                throw std::invalid_argument("symspace: source values must be nonzero, integral");
            aval.push_back(valuation(a, p));
            achi.push_back(chi(unit_part(a, p), p));
        }
        tmod.clear();
        for (const Rat& t : tgt) {
            if (valuation(t, p) < 0)
                throw std::invalid_argument("symspace: non-integral target");
            tmod.push_back(static_cast<i64>(rat_mod(t, p, pdi)));
        }
        ppows.assign(d + 1, 1);
        for (long e = 1; e <= d; ++e) ppows[e] = ppows[e - 1] * p;
        vtab.assign(pd, 0);
        ctab.assign(pd, 0);
        itab.assign(pd, 0);
        for (i64 x = 1; x < pd; ++x) {
            i64 y = x;
            long v = 0;
            while (y % p == 0) {
                y /= p;
                ++v;
            }
            vtab[x] = v;
            ctab[x] = legendre(Int(y % p), p) == 1 ? 1 : -1;
            if (v == 0) itab[x] = static_cast<i64>(mod_inverse(Int(x), pdi));
        }
        vtab[0] = d;
        kmax = (n + 1) * d * m + d + 2;
        hist.assign(static_cast<size_t>(pd) * (kmax + 1) * 2, 0);
    }

    i64 mod(i64 x) const {
        x %= pd;
        return x < 0 ? x + pd : x;
    }

    void accumulate(i64 phase, const long* dv, const int* dc) {
        long K = 0;
        int sign = 1;
        int gcount = 0;
        for (long r = 0; r < m; ++r) {
            for (long i = 0; i < n; ++i) {
                long v = std::min(aval[r] + dv[i], d);
                long f = d - v;
                if (f == 0) {
                    K += d;
                    continue;
                }
                K += v + (f - (f & 1)) / 2;
                if (f & 1) {
                    ++gcount;
                    sign *= dc[i] * achi[r];
                }
            }
        }
        K += gcount / 2;
        if ((gcount / 2) % 2 == 1 && chim1 == -1) sign = -sign;
        hist[(static_cast<size_t>(phase) * (kmax + 1) + K) * 2 + gcount % 2] += sign;
    }

    // Congruence-diagonalize a symmetric matrix mod p^d.
    void smalldiag(std::array<std::array<i64, 3>, 3> M, long nn, long* dv, int* dc) {
        for (long step = 0; step < nn; ++step) {
            long best_diag = d + 1, bd = -1;
            for (long r = step; r < nn; ++r) {
                if (vtab[M[r][r]] < best_diag) {
                    best_diag = vtab[M[r][r]];
                    bd = r;
                }
            }
            long best_off = d + 1, orow = -1, ocol = -1;
            for (long r = step; r < nn; ++r) {
                for (long c = r + 1; c < nn; ++c) {
                    if (vtab[M[r][c]] < best_off) {
                        best_off = vtab[M[r][c]];
                        orow = r;
                        ocol = c;
                    }
                }
            }
            long piv;
            if (best_diag <= best_off) {
                if (best_diag >= d) {
                    for (long r = step; r < nn; ++r) {
                        dv[r] = d;
                        dc[r] = 0;
                    }
                    return;
                }
                piv = bd;
            } else {
                // Merge column ocol into orow; the cross term dominates.
                for (long k = 0; k < nn; ++k) M[orow][k] = mod(M[orow][k] + M[ocol][k]);
                for (long k = 0; k < nn; ++k) M[k][orow] = mod(M[k][orow] + M[k][ocol]);
                piv = orow;
            }
            if (piv != step) {
                for (long k = 0; k < nn; ++k) std::swap(M[piv][k], M[step][k]);
                for (long k = 0; k < nn; ++k) std::swap(M[k][piv], M[k][step]);
            }
            i64 a = M[step][step];
            long va = vtab[a];
            dv[step] = va;
            dc[step] = ctab[a];
            i64 uinv = itab[a / ppows[va]];
            for (long j = step + 1; j < nn; ++j) {
                i64 mj = M[step][j];
                if (mj == 0) continue;
                i64 f = mod((mj / ppows[va]) * uinv);
                for (long k = 0; k < nn; ++k) M[j][k] = mod(M[j][k] - f * M[step][k]);
                for (long k = 0; k < nn; ++k) M[k][j] = mod(M[k][j] - f * M[k][step]);
            }
        }
    }

    // Expand g into Gauss-sum form, reduce modulo the cyclotomic relation,
    // and extract the rational coordinate.
    Rat fold() const {
        i64 c = pd / p;
        std::vector<Rat> A(pd, Rat(0));
        for (i64 phase = 0; phase < pd; ++phase) {
            for (long K = 0; K <= kmax; ++K) {
                for (int gbit = 0; gbit < 2; ++gbit) {
                    i64 cnt = hist[(static_cast<size_t>(phase) * (kmax + 1) + K) * 2 + gbit];
                    if (cnt == 0) continue;
                    Rat v = Rat(cnt) * p_power(p, K);
                    if (gbit == 0) {
                        A[phase] += v;
                    } else {
                        for (i64 x = 1; x < p; ++x) {
                            int cx = legendre(Int(x), p) == 1 ? 1 : -1;
                            A[(phase + x * c) % pd] += Rat(cx) * v;
                        }
                    }
                }
            }
        }
        for (i64 idx = pd - 1; idx >= c * (p - 1); --idx) {
            if (A[idx] == 0) continue;
            Rat v = A[idx];
            A[idx] = 0;
            i64 r = idx - c * (p - 1);
            for (i64 j = 0; j + 1 < p; ++j) A[r + j * c] -= v;
        }
        for (i64 i = 1; i < c * (p - 1); ++i) {
            if (A[i] != 0) throw std::logic_error("symspace: sum failed to rationalize");
        }
        return A[0];
    }
};

// Unnormalized sums: the count at depth d is raw / p^{d n(n+1)/2} and the
// normalized density is raw / p^{d n m}.

Rat engine_raw(long p, const std::vector<Rat>& src, const std::vector<Rat>& tgt, long d) {
    EngineCtx ctx;
    ctx.build(p, d, src);
    long n = static_cast<long>(tgt.size());
    Gp z;
    if (n == 1) {
        z = ctx.z1(tgt[0]);
    } else if (n == 2) {
        z = ctx.z2(tgt[0], tgt[1]);
    } else {
        throw std::invalid_argument("engine: target rank must be 1 or 2");
    }
    if (z.b != 0) throw std::logic_error("engine: irrational assembled value");
    return z.a;
}

Rat symspace_raw(long p, long d, const std::vector<Rat>& src, const std::vector<Rat>& tgt) {
    SymBrute sb;
    sb.init(p, d, src, tgt);
    long n = sb.n;
    i64 pd = sb.pd;
    long dv[3];
    int dc[3];
    Rat extra = 0;
    if (n == 1) {
        for (i64 a = 0; a < pd; ++a) {
            dv[0] = sb.vtab[a];
            dc[0] = sb.ctab[a];
            sb.accumulate(sb.mod(-sb.tmod[0] * a), dv, dc);
        }
    } else if (n == 2) {
        for (i64 al = 0; al < pd; ++al) {
            for (i64 be = 0; be < pd; ++be) {
                for (i64 ga = 0; ga < pd; ++ga) {
                    std::array<std::array<i64, 3>, 3> M{};
                    M[0][0] = al;
                    M[0][1] = M[1][0] = be;
                    M[1][1] = ga;
                    sb.smalldiag(M, 2, dv, dc);
                    sb.accumulate(sb.mod(-sb.tmod[0] * al - sb.tmod[1] * ga), dv, dc);
                }
            }
        }
    } else {
        // The stratum where alpha divides its whole row collapses through
        // the Schur complement to the rank-2 assembly; the complement is
        // summed literally.
        EngineCtx ctx;
        ctx.build(p, d, src);
        TInfo t1 = ctx.tinfo(tgt[0]);
        TInfo t2 = ctx.tinfo(tgt[1]);
        TInfo t3 = ctx.tinfo(tgt[2]);
        Gp bracket{ctx.ppow(d * ctx.m), 0};
        for (long A = 0; A < d; ++A) {
            for (int sidx = 0; sidx < 2; ++sidx) {
                int s = sidx == 0 ? 1 : -1;
                Gp w = ctx.mul(ctx.gval(t2, A, s), ctx.gval(t3, A, s));
                bracket = bracket + ctx.mul(ctx.P[sidx][A], ctx.mul(w, ctx.esum(A, s, t1)));
            }
        }
        Gp apart = ctx.mul(ctx.z2(tgt[1], tgt[2]), bracket);
        if (apart.b != 0) throw std::logic_error("symspace: irrational collapsed stratum");
        extra = apart.a;
        for (i64 al = 0; al < pd; ++al) {
            long va = sb.vtab[al];
            for (i64 b1 = 0; b1 < pd; ++b1) {
                long vb = sb.vtab[b1];
                for (i64 b2 = 0; b2 < pd; ++b2) {
                    if (std::min(vb, sb.vtab[b2]) >= va) continue;
                    i64 ph0 = sb.mod(-sb.tmod[0] * al);
                    for (i64 g1v = 0; g1v < pd; ++g1v) {
                        i64 ph1 = sb.mod(ph0 - sb.tmod[1] * g1v);
                        for (i64 g2v = 0; g2v < pd; ++g2v) {
                            i64 ph = sb.mod(ph1 - sb.tmod[2] * g2v);
                            for (i64 cc = 0; cc < pd; ++cc) {
                                std::array<std::array<i64, 3>, 3> M{};
                                M[0][0] = al;
                                M[0][1] = M[1][0] = b1;
                                M[0][2] = M[2][0] = b2;
                                M[1][1] = g1v;
                                M[1][2] = M[2][1] = cc;
                                M[2][2] = g2v;
                                sb.smalldiag(M, 3, dv, dc);
                                sb.accumulate(ph, dv, dc);
                            }
                        }
                    }
                }
            }
        }
    }
    return extra + sb.fold();
}

long stabilization_start(long p, const std::vector<Rat>& tgt) {
    long mx = 0;
    for (const Rat& t : tgt) mx = std::max(mx, valuation(t, p));
    return std::max(1L, mx + 1);
}

Rat stabilize(const std::function<Rat(long)>& at, long d0, long cap, const char* what) {
    Rat prev = at(d0);
    for (long d = d0; d <= cap; ++d) {
        Rat next = at(d + 1);
        if (next == prev) return prev;
        prev = next;
    }
    throw not_stabilized(std::string(what) + ": no two consecutive depths agree by depth " +
                         std::to_string(cap + 1));
}

// Canonical diagonal q-values of the self-dual lattice of rank k, sign eps.
std::vector<Rat> selfdual_values(long p, long k, int eps) {
    if (k == 0) {
        if (eps != 1)
            throw std::invalid_argument("selfdual_values: rank 0 carries sign +1");
        return {};
    }
    QuadLattice H = lat_selfdual(p, static_cast<int>(k), eps);
    std::vector<Rat> v;
    for (int i = 0; i < H.rank(); ++i) v.push_back(H.gram[i][i]);
    return v;
}

// Orthogonal complement of a primitive norm-s vector inside H_n^eps.  For
// n >= 3 split off a hyperbolic plane through the vector; for n = 2 the
// complement is the single value completing the discriminant class.
std::vector<Rat> peel_complement(long p, long n, int eps, const Rat& s) {
    if (n == 2) {
        Rat t = -s;
        if (eps == -1) t *= default_nonresidue(p);
        return {t};
    }
    std::vector<Rat> v = selfdual_values(p, n - 2, eps);
    v.push_back(-s);
    return v;
}

std::string memo_key(const QuadLattice& M, const QuadLattice& L) {
    std::ostringstream os;
    os << M.p;
    for (const auto& b : jordan(M)) os << "|" << b.exponent << "," << b.rank << "," << b.eps;
    os << ";";
    for (const auto& b : jordan(L)) os << "|" << b.exponent << "," << b.rank << "," << b.eps;
    return os.str();
}

QuadLattice lattice_from_jordan(long p, const std::vector<JordanBlock>& blocks) {
    std::vector<Rat> diag;
    for (const auto& b : blocks) {
        Rat sc = p_power(p, b.exponent);
        for (const Rat& v : selfdual_values(p, b.rank, b.eps)) diag.push_back(sc * v);
    }
    return lat_diag(p, diag);
}

Rat den_core_impl(const QuadLattice& M, const QuadLattice& L);

// Peel the largest-valuation target value off a rank-3 target over a
// two-scale source H_{n1}^{e1}[p] + H_{n2}^{e2}, summing the primitive
// strata of both source parts across the depth ladder.
Rat den_rank3_vertex(const QuadLattice& M, const std::vector<Rat>& tdiag, long p) {
    auto jb = jordan(M);
    long n2 = jb[0].rank;
    int eps2 = jb[0].eps;
    long n1 = jb[1].rank;
    int eps1 = jb[1].eps;
    if (n1 < 2 || n2 < 2)
        throw std::invalid_argument("den_core: two-scale source needs both parts of rank >= 2");
    std::vector<Rat> sorted = tdiag;
    std::sort(sorted.begin(), sorted.end(), [p](const Rat& x, const Rat& y) {
        return valuation(x, p) < valuation(y, p);
    });
    Rat tau = sorted.back();
    std::vector<Rat> flat(sorted.begin(), sorted.end() - 1);
    QuadLattice Lflat = lat_diag(p, flat);
    long nu = valuation(tau, p);
    long m = static_cast<long>(flat.size());
    Rat total = 0;
    for (long i = 0; 2 * i <= nu; ++i) {
        Rat scaled = tau * p_power(p, -2 * i);
        Rat pd1 = pden_closed(n1, eps1, scaled / p, p);
        Rat pd2 = pden_closed(n2, eps2, scaled, p);
        Rat term = 0;
        if (pd1 != 0) {
            std::vector<Rat> src1;
            for (const Rat& v : peel_complement(p, n1, eps1, scaled / p))
                src1.push_back(v * p);
            for (const Rat& v : selfdual_values(p, n2, eps2)) src1.push_back(v);
            term += p_power(p, m + 1 - n2) * den_core_impl(lat_diag(p, src1), Lflat) * pd1;
        }
        if (pd2 != 0) {
            std::vector<Rat> src2;
            for (const Rat& v : selfdual_values(p, n1, eps1)) src2.push_back(v * p);
            for (const Rat& v : peel_complement(p, n2, eps2, scaled))
                src2.push_back(v);
            term += den_core_impl(lat_diag(p, src2), Lflat) * pd2;
        }
        total += p_power(p, i * (m + 2 - n1 - n2)) * term;
    }
    return total;
}

Rat den_core_impl(const QuadLattice& M, const QuadLattice& L) {
    static std::map<std::string, Rat> memo;
    long p = M.p;
    long n = L.rank();
    long m = M.rank();
    if (n == 0) return 1;
    if (m == 0) return 0;
    std::string key = memo_key(M, L);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Rat value;
    if (!is_integral(M)) {
        auto jb = jordan(M);
        bool transferable = jb.front().exponent == -1 && jb.size() <= 2 &&
                            (jb.size() == 1 || jb.back().exponent == 0) &&
                            jb.front().rank <= 2 &&
                            (jb.front().rank == 1 || jb.front().eps == -1) && is_integral(L);
        if (transferable) {
            // Depth transfer: an anisotropic unimodular block at scale -1
            // flips to scale +1 at the cost of p^{-rank * n}.
            auto flipped = jb;
            flipped.front().exponent = 1;
            std::sort(flipped.begin(), flipped.end(),
                      [](const JordanBlock& a, const JordanBlock& b) {
                          return a.exponent < b.exponent;
                      });
            value = p_power(p, -jb.front().rank * n) *
                    den_core_impl(lattice_from_jordan(p, flipped), L);
        } else {
            long e = -min_val(M);
            value = p_power(p, -e * n * (n + 1) / 2) *
                    den_core_impl(rescale(M, e), rescale(L, e));
        }
    } else if (!is_integral(L)) {
        value = 0;
    } else {
        std::vector<Rat> src = diagonalize(M);
        std::vector<Rat> tgt = diagonalize(L);
        long d0 = stabilization_start(p, tgt);
        if (n <= 2) {
            value = stabilize(
                [&](long dd) { return engine_raw(p, src, tgt, dd) * p_power(p, -dd * n * m); },
                d0, d0 + 10, "den_core(engine)");
        } else if (n == 3) {
            auto jb = jordan(M);
            bool vertex = jb.size() == 2 && jb[0].exponent == 0 && jb[1].exponent == 1;
            bool unimod = jb.size() == 1 && jb[0].exponent == 0;
            if (vertex) {
                value = den_rank3_vertex(M, tgt, p);
            } else if (unimod) {
                value = stabilize(
                    [&](long dd) {
                        return symspace_raw(p, dd, src, tgt) * p_power(p, -dd * n * m);
                    },
                    d0, d0 + 2, "den_core(symspace)");
            } else {
                throw std::invalid_argument(
                    "den_core: unsupported source shape for a rank-3 target");
            }
        } else {
            throw std::invalid_argument("den_core: target rank > 3 unsupported");
        }
    }
    memo.emplace(std::move(key), value);
    return value;
}

}  // namespace

namespace detail {

Rat engine_normalized(long p, const std::vector<Rat>& source_diag,
                      const std::vector<Rat>& target_diag, long d) {
    long n = static_cast<long>(target_diag.size());
    long m = static_cast<long>(source_diag.size());
    return engine_raw(p, source_diag, target_diag, d) * p_power(p, -d * n * m);
}

Rat symspace_normalized(long p, const std::vector<Rat>& source_diag,
                        const std::vector<Rat>& target_diag, long d) {
    long n = static_cast<long>(target_diag.size());
    long m = static_cast<long>(source_diag.size());
    return symspace_raw(p, d, source_diag, target_diag) * p_power(p, -d * n * m);
}

}  // namespace detail

Rat den_core(const QuadLattice& M, const QuadLattice& L) {
    if (M.p != L.p) throw std::invalid_argument("den_core: mismatched primes");
    return den_core_impl(M, L);
}

Rat den_at(const QuadLattice& M, const QuadLattice& L, long k) {
    if (k < 0) throw std::invalid_argument("den_at: k must be >= 0");
    return den_core(orthosum(M, lat_hyperbolic(M.p, static_cast<int>(k))), L);
}

Rat DensityPolynomial::value_at(const Rat& x) const {
    Rat acc = 0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Rat DensityPolynomial::derivative_at(const Rat& x) const {
    Rat acc = 0;
    for (size_t i = coefficients.size(); i-- > 1;)
        acc = acc * x + Rat(static_cast<long>(i)) * coefficients[i];
    return acc;
}

namespace {

std::vector<Rat> interpolate_monomial(const std::vector<Rat>& xs, const std::vector<Rat>& ys) {
    size_t n = xs.size();
    std::vector<Rat> dd = ys;  // Newton divided differences, in place
    for (size_t level = 1; level < n; ++level) {
        for (size_t i = n - 1; i >= level; --i) {
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level]);
            if (i == level) break;
        }
    }
    std::vector<Rat> coeffs(n, 0);
    // Expanding product (x - x_0)...(x - x_{k-1}); one slot past n for the
    // leading term produced on the final expansion, which is never read.
    std::vector<Rat> basis(n + 1, 0);
    basis[0] = 1;
    size_t blen = 1;
    for (size_t k = 0; k < n; ++k) {
        for (size_t i = 0; i < blen; ++i) coeffs[i] += dd[k] * basis[i];
        for (size_t i = blen; i-- > 0;) {
            basis[i + 1] += basis[i];
            basis[i] *= -xs[k];
        }
        ++blen;
    }
    while (coeffs.size() > 1 && coeffs.back() == 0) coeffs.pop_back();
    return coeffs;
}

std::string coeffs_to_string(const std::vector<Rat>& c) {
    std::string s = "[";
    for (size_t i = 0; i < c.size(); ++i) {
        if (i) s += ", ";
        s += rat_to_string(c[i]);
    }
    return s + "]";
}

}  // namespace

DensityPolynomial den_poly(const QuadLattice& M, const QuadLattice& L, long degree_hint) {
    long p = M.p;
    std::vector<Rat> xs, ys;
    auto extend_to = [&](long k) {
        while (static_cast<long>(xs.size()) <= k) {
            long kk = static_cast<long>(xs.size());
            xs.push_back(p_power(p, -kk));
            ys.push_back(den_at(M, L, kk));
        }
    };
    long D = std::max(1L, degree_hint);
    const long max_degree = 24;
    extend_to(D + 1);
    std::vector<Rat> prev =
        interpolate_monomial({xs.begin(), xs.begin() + D + 1}, {ys.begin(), ys.begin() + D + 1});
    for (; D < max_degree; ++D) {
        extend_to(D + 2);
        std::vector<Rat> next = interpolate_monomial({xs.begin(), xs.begin() + D + 2},
                                                     {ys.begin(), ys.begin() + D + 2});
        if (next == prev) {
            DensityPolynomial poly;
            poly.coefficients = prev;
            poly.provenance = "interpolated";
            poly.degree_bound = D;
            return poly;
        }
        prev = std::move(next);
    }
    throw not_stabilized("den_poly: interpolants kept changing through degree " +
                         std::to_string(max_degree) + "; last candidate " +
                         coeffs_to_string(prev));
}

namespace {

QuadLattice dden_source(DDenKind kind, long p, const Rat& qx) {
    switch (kind) {
        case DDenKind::H0p:
            return lat_eichler(p);
        case DDenKind::H0pDual:
            return lat_eichler_dual(p);
        case DDenKind::AugSplit:
            return orthosum(lat_diag(p, {-qx}), lat_hyperbolic(p, 1));
        case DDenKind::AugScaled:
            return orthosum(lat_diag(p, {-qx}), rescale(lat_hyperbolic(p, 1), 1));
    }
    throw std::invalid_argument("dden: unknown kind");
}

}  // namespace

Rat dden_normalizer(DDenKind kind, long p) {
    static std::map<std::pair<int, long>, Rat> cache;
    auto key = std::make_pair(static_cast<int>(kind), p);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Rat value;
    switch (kind) {
        case DDenKind::H0p:
            value = den_core(lat_eichler(p),
                             orthosum(lat_hyperbolic(p, 1), lat_diag(p, {Rat(p)})));
            break;
        case DDenKind::H0pDual:
            value = den_core(lat_eichler_dual(p),
                             orthosum(lat_hyperbolic(p, 1), lat_diag(p, {Rat(1, p)})));
            break;
        case DDenKind::AugSplit:
            value = den_core(lat_hyperbolic(p, 1), lat_diag(p, {Rat(1)}));
            break;
        case DDenKind::AugScaled:
            value = den_core(rescale(lat_hyperbolic(p, 1), 1), lat_diag(p, {Rat(p)}));
            break;
    }
    if (value == 0) throw std::logic_error("dden_normalizer: vanishing normalizer");
    cache.emplace(key, value);
    return value;
}

Rat dden(DDenKind kind, const QuadLattice& L) {
    if (kind != DDenKind::H0p && kind != DDenKind::H0pDual)
        throw std::invalid_argument("dden: this overload serves the rank-4 sources");
    if (L.rank() != 3) throw std::invalid_argument("dden: target must have rank 3");
    long p = L.p;
    DensityPolynomial poly = den_poly(dden_source(kind, p, 0), L);
    if (!poly.vanishes_at_one())
        throw std::invalid_argument("dden: density polynomial does not vanish at X = 1");
    return Rat(-2) * poly.derivative_at(Rat(1)) / dden_normalizer(kind, p);
}

Rat dden(DDenKind kind, const Rat& qx, const QuadLattice& Lflat) {
    if (kind != DDenKind::AugSplit && kind != DDenKind::AugScaled)
        throw std::invalid_argument("dden: this overload serves the augmented sources");
    if (qx == 0) throw std::invalid_argument("dden: x must have nonzero norm");
    if (Lflat.rank() < 1 || Lflat.rank() > 2)
        throw std::invalid_argument("dden: augmented kinds take targets of rank 1 or 2");
    long p = Lflat.p;
    DensityPolynomial poly = den_poly(dden_source(kind, p, qx), Lflat);
    return Rat(-1) * poly.derivative_at(Rat(1)) / dden_normalizer(kind, p);
}

Rat dden_rank2_closed(DDenKind kind, long a, long b, long p) {
    if (a > b || a < 0) throw std::invalid_argument("dden_rank2_closed: need 0 <= a <= b");
    Rat q(p);
    Rat denom = (q - 1) * (q - 1);
    bool even = ((a + b) % 2) == 0;
    if (kind == DDenKind::AugScaled) {
        long hi = even ? (a + b + 6) / 2 : (a + b + 5) / 2;
        long lo = even ? (a + b + 2) / 2 : (a + b + 3) / 2;
        return (Rat(a) * p_power(p, hi) - Rat(a) * p_power(p, lo) - 2 * p_power(p, a + 2) +
                q * q + 2 * q - 1) /
               denom;
    }
    if (kind == DDenKind::AugSplit) {
        if (a == 0) return 0;
        long hi = even ? (a + b + 2) / 2 : (a + b + 1) / 2;
        long lo = even ? (a + b - 2) / 2 : (a + b - 1) / 2;
        return (Rat(a) * p_power(p, hi) - Rat(a) * p_power(p, lo) - 2 * p_power(p, a) + 2) /
               denom;
    }
    throw std::invalid_argument("dden_rank2_closed: kind must be AugScaled or AugSplit");
}

}  // namespace krden
