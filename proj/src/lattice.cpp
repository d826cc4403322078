#include "krden/lattice.hpp"

#include <algorithm>
#include <map>

namespace krden {

namespace {

using boost::multiprecision::denominator;

// Denominators of Gram entries may only involve p and 2.
bool denominator_supported(const Rat& r, long p) {
    Int d = denominator(r);
    while (d % 2 == 0) d /= 2;
    while (d % p == 0) d /= p;
    return d == 1;
}

std::vector<std::vector<Rat>> rat_inverse(const std::vector<std::vector<Rat>>& m) {
    int n = static_cast<int>(m.size());
    auto a = m;
    std::vector<std::vector<Rat>> inv(n, std::vector<Rat>(n, 0));
    for (int i = 0; i < n; ++i) inv[i][i] = 1;
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r) {
            if (a[r][col] != 0) {
                piv = r;
                break;
            }
        }
        if (piv < 0) throw std::invalid_argument("matrix not invertible");
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        Rat d = a[col][col];
        for (int c = 0; c < n; ++c) {
            a[col][c] /= d;
            inv[col][c] /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rat f = a[r][col];
            for (int c = 0; c < n; ++c) {
                a[r][c] -= f * a[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return inv;
}

}  // namespace

QuadLattice make_lattice(long p, std::vector<std::vector<Rat>> gram) {
    if (!is_odd_prime(p)) throw std::invalid_argument("make_lattice: p must be an odd prime");
    size_t n = gram.size();
    for (const auto& row : gram) {
        if (row.size() != n) throw std::invalid_argument("make_lattice: not square");
    }
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (gram[i][j] != gram[j][i])
                throw std::invalid_argument("make_lattice: not symmetric");
            if (!denominator_supported(gram[i][j], p))
                throw std::invalid_argument("make_lattice: denominator not supported at p");
        }
    }
    QuadLattice L{p, std::move(gram)};
    if (n > 0 && gram_det(L) == 0)
        throw std::invalid_argument("make_lattice: degenerate form");
    return L;
}

QuadLattice lat_diag(long p, const std::vector<Rat>& d) {
    std::vector<std::vector<Rat>> g(d.size(), std::vector<Rat>(d.size(), 0));
    for (size_t i = 0; i < d.size(); ++i) {
        if (d[i] == 0) throw std::invalid_argument("lat_diag: zero diagonal entry");
        g[i][i] = d[i];
    }
    return make_lattice(p, std::move(g));
}

QuadLattice lat_selfdual(long p, int k, int eps, long u) {
    if (k < 1) throw std::invalid_argument("lat_selfdual: rank must be >= 1");
    if (eps != 1 && eps != -1) throw std::invalid_argument("lat_selfdual: eps must be +-1");
    if (u == 0) u = default_nonresidue(p);
    if (valuation(Int(u), p) != 0 || legendre(Int(u), p) != -1)
        throw std::invalid_argument("lat_selfdual: u must be a unit non-residue");
    long half = (static_cast<long>(k) * (k - 1) / 2) % 2;
    int base = half ? chi(Rat(-1), p) : 1;
    std::vector<Rat> d(k, 1);
    if (base != eps) d[k - 1] = u;
    return lat_diag(p, d);
}

QuadLattice lat_hyperbolic(long p, int k) {
    if (k < 0) throw std::invalid_argument("lat_hyperbolic: k < 0");
    int n = 2 * k;
    std::vector<std::vector<Rat>> g(n, std::vector<Rat>(n, 0));
    for (int i = 0; i < k; ++i) {
        g[2 * i][2 * i + 1] = Rat(1, 2);
        g[2 * i + 1][2 * i] = Rat(1, 2);
    }
    if (n == 0) {
        QuadLattice L{p, {}};
        if (!is_odd_prime(p)) throw std::invalid_argument("lat_hyperbolic: bad p");
        return L;
    }
    return make_lattice(p, std::move(g));
}

QuadLattice lat_eichler(long p) {
    return orthosum(rescale(lat_hyperbolic(p, 1), 1), lat_hyperbolic(p, 1));
}

QuadLattice lat_eichler_dual(long p) {
    return orthosum(rescale(lat_hyperbolic(p, 1), -1), lat_hyperbolic(p, 1));
}

QuadLattice lat_quat_order(long p, long u) {
    if (u == 0) u = default_nonresidue(p);
    return lat_diag(p, {Rat(1), Rat(-u), Rat(-p), Rat(u) * p});
}

QuadLattice lat_quat_order_dual(long p, long u) {
    return dual(lat_quat_order(p, u));
}

QuadLattice lat_trace_zero(long p) {
    std::vector<std::vector<Rat>> g(3, std::vector<Rat>(3, 0));
    g[0][0] = -1;
    g[1][2] = Rat(-1, 2);
    g[2][1] = Rat(-1, 2);
    return make_lattice(p, std::move(g));
}

QuadLattice rescale(const QuadLattice& L, long e) {
    QuadLattice R = L;
    Rat f = p_power(L.p, e);
    for (auto& row : R.gram) {
        for (auto& v : row) v *= f;
    }
    return R;
}

QuadLattice orthosum(const QuadLattice& A, const QuadLattice& B) {
    if (A.p != B.p) throw std::invalid_argument("orthosum: mismatched primes");
    int n = A.rank() + B.rank();
    std::vector<std::vector<Rat>> g(n, std::vector<Rat>(n, 0));
    for (int i = 0; i < A.rank(); ++i) {
        for (int j = 0; j < A.rank(); ++j) g[i][j] = A.gram[i][j];
    }
    for (int i = 0; i < B.rank(); ++i) {
        for (int j = 0; j < B.rank(); ++j) g[A.rank() + i][A.rank() + j] = B.gram[i][j];
    }
    QuadLattice L{A.p, std::move(g)};
    return L;
}

QuadLattice dual(const QuadLattice& L) {
    if (L.rank() == 0) return L;
    auto inv = rat_inverse(L.gram);
    for (auto& row : inv) {
        for (auto& v : row) v *= Rat(1, 4);
    }
    return make_lattice(L.p, std::move(inv));
}

std::vector<Rat> diagonalize(const QuadLattice& L) {
    int n = L.rank();
    auto G = L.gram;
    long p = L.p;
    std::vector<Rat> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        long best_diag = VAL_INF;
        int bd = -1;
        for (int r = i; r < n; ++r) {
            long v = valuation(G[r][r], p);
            if (v < best_diag) {
                best_diag = v;
                bd = r;
            }
        }
        long best_off = VAL_INF;
        int orow = -1, ocol = -1;
        for (int r = i; r < n; ++r) {
            for (int c = r + 1; c < n; ++c) {
                long v = valuation(G[r][c], p);
                if (v < best_off) {
                    best_off = v;
                    orow = r;
                    ocol = c;
                }
            }
        }
        int piv;
        if (bd >= 0 && best_diag <= best_off) {
            piv = bd;
        } else {
            // Merge the basis vector at ocol into the one at orow; with p odd
            // the cross term 2*G[orow][ocol] has strictly minimal valuation,
            // so the new diagonal entry attains it.
            for (int k = 0; k < n; ++k) G[orow][k] += G[ocol][k];
            for (int k = 0; k < n; ++k) G[k][orow] += G[k][ocol];
            piv = orow;
        }
        if (G[piv][piv] == 0) throw std::invalid_argument("diagonalize: degenerate form");
        if (piv != i) {
            std::swap(G[piv], G[i]);
            for (int k = 0; k < n; ++k) std::swap(G[k][piv], G[k][i]);
        }
        for (int j = i + 1; j < n; ++j) {
            if (G[i][j] == 0) continue;
            Rat f = G[i][j] / G[i][i];
            for (int k = 0; k < n; ++k) G[j][k] -= f * G[i][k];
            for (int k = 0; k < n; ++k) G[k][j] -= f * G[k][i];
        }
        out.push_back(G[i][i]);
    }
    return out;
}

std::vector<long> fundamental_invariants(const QuadLattice& L) {
    std::vector<long> v;
    for (const Rat& d : diagonalize(L)) v.push_back(valuation(d, L.p));
    std::sort(v.begin(), v.end());
    return v;
}

std::vector<long> gk_invariants(const QuadLattice& L) { return fundamental_invariants(L); }

std::vector<JordanBlock> jordan(const QuadLattice& L) {
    auto diag = diagonalize(L);
    std::map<long, std::vector<Rat>> groups;
    for (const Rat& d : diag) groups[valuation(d, L.p)].push_back(unit_part(d, L.p));
    std::vector<JordanBlock> blocks;
    for (auto& [e, units] : groups) {
        int r = static_cast<int>(units.size());
        Rat disc = ((static_cast<long>(r) * (r - 1) / 2) % 2) ? Rat(-1) : Rat(1);
        for (const Rat& u : units) disc *= u;
        blocks.push_back({e, r, chi(disc, L.p)});
    }
    return blocks;
}

SpaceClass invariants(const QuadLattice& L) {
    auto diag = diagonalize(L);
    int n = L.rank();
    SpaceClass c;
    c.rank = n;
    Rat det = 1;
    for (const Rat& d : diag) det *= d;
    int hasse = 1;
    for (size_t i = 0; i < diag.size(); ++i) {
        for (size_t j = i + 1; j < diag.size(); ++j) {
            hasse *= hilbert(diag[i], diag[j], L.p);
        }
    }
    c.hasse = hasse;
    if (n > 0) {
        c.det_val_parity = static_cast<int>(((valuation(det, L.p) % 2) + 2) % 2);
        c.det_chi = chi(unit_part(det, L.p), L.p);
        Rat disc = ((static_cast<long>(n) * (n - 1) / 2) % 2) ? -det : det;
        c.disc_chi = chi(disc, L.p);
    }
    return c;
}

Rat gram_det(const QuadLattice& L) {
    int n = L.rank();
    if (n == 0) return 1;
    auto a = L.gram;
    Rat det = 1;
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r) {
            if (a[r][col] != 0) {
                piv = r;
                break;
            }
        }
        if (piv < 0) return 0;
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (int r = col + 1; r < n; ++r) {
            if (a[r][col] == 0) continue;
            Rat f = a[r][col] / a[col][col];
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return det;
}

Rat q_value(const QuadLattice& L, const std::vector<Rat>& x) {
    if (static_cast<int>(x.size()) != L.rank())
        throw std::invalid_argument("q_value: dimension mismatch");
    Rat s = 0;
    for (int i = 0; i < L.rank(); ++i) {
        for (int j = 0; j < L.rank(); ++j) s += x[i] * L.gram[i][j] * x[j];
    }
    return s;
}

bool is_integral(const QuadLattice& L) {
    for (const auto& row : L.gram) {
        for (const Rat& v : row) {
            if (v != 0 && valuation(v, L.p) < 0) return false;
        }
    }
    return true;
}

long min_val(const QuadLattice& L) {
    auto inv = fundamental_invariants(L);
    if (inv.empty()) throw std::invalid_argument("min_val: rank 0");
    return inv.front();
}

long max_val(const QuadLattice& L) {
    auto inv = fundamental_invariants(L);
    if (inv.empty()) throw std::invalid_argument("max_val: rank 0");
    return inv.back();
}

bool is_anisotropic(const QuadLattice& L) {
    int n = L.rank();
    if (n == 0) return true;
    if (n >= 5) return false;
    long p = L.p;
    Rat det = 1;
    for (const Rat& d : diagonalize(L)) det *= d;
    if (n == 1) return true;
    if (n == 2) return chi(-det, p) != 1;
    SpaceClass c = invariants(L);
    if (n == 3) return hilbert(Rat(-1), -det, p) != c.hasse;
    return c.det_chi == 1 && c.det_val_parity == 0 &&
           c.hasse != hilbert(Rat(-1), Rat(-1), p);
}

bool is_isometric(const QuadLattice& A, const QuadLattice& B) {
    if (A.p != B.p || A.rank() != B.rank()) return false;
    auto ja = jordan(A);
    auto jb = jordan(B);
    if (ja.size() != jb.size()) return false;
    for (size_t i = 0; i < ja.size(); ++i) {
        if (ja[i].exponent != jb[i].exponent || ja[i].rank != jb[i].rank ||
            ja[i].eps != jb[i].eps)
            return false;
    }
    return true;
}

QuadLattice ortho_complement(const QuadLattice& L, const std::vector<Rat>& x) {
    int n = L.rank();
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("ortho_complement: dimension mismatch");
    if (n < 2) throw std::invalid_argument("ortho_complement: rank too small");
    long p = L.p;
    long mn = VAL_INF;
    for (const Rat& c : x) {
        if (c != 0) mn = std::min(mn, valuation(c, p));
    }
    if (mn == VAL_INF || mn != 0)
        throw std::invalid_argument("ortho_complement: x must be primitive");
    for (const Rat& c : x) {
        if (c != 0 && valuation(c, p) < 0)
            throw std::invalid_argument("ortho_complement: x must be integral");
    }
    // Pairing values r_j = (x, b_j).
    std::vector<Rat> r(n, 0);
    long m = VAL_INF;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) r[j] += 2 * L.gram[j][k] * x[k];
        if (r[j] != 0) m = std::min(m, valuation(r[j], p));
    }
    if (m == VAL_INF) throw std::invalid_argument("ortho_complement: x is in the radical");
    Rat scale = p_power(p, -m);
    int jstar = -1;
    for (int j = 0; j < n; ++j) {
        r[j] *= scale;
        if (jstar < 0 && r[j] != 0 && valuation(r[j], p) == 0) jstar = j;
    }
    std::vector<std::vector<Rat>> basis;
    for (int i = 0; i < n; ++i) {
        if (i == jstar) continue;
        std::vector<Rat> v(n, 0);
        v[i] = 1;
        v[jstar] = -r[i] / r[jstar];
        basis.push_back(std::move(v));
    }
    int k = n - 1;
    std::vector<std::vector<Rat>> g(k, std::vector<Rat>(k, 0));
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            Rat s = 0;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) s += basis[a][i] * L.gram[i][j] * basis[b][j];
            }
            g[a][b] = s;
        }
    }
    return make_lattice(p, std::move(g));
}

QuadLattice apply_basis(const QuadLattice& L, const std::vector<std::vector<Int>>& B) {
    int n = L.rank();
    if (static_cast<int>(B.size()) != n)
        throw std::invalid_argument("apply_basis: dimension mismatch");
    std::vector<std::vector<Rat>> g(n, std::vector<Rat>(n, 0));
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            Rat s = 0;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) s += Rat(B[i][a]) * L.gram[i][j] * Rat(B[j][b]);
            }
            g[a][b] = s;
        }
    }
    QuadLattice R = make_lattice(L.p, std::move(g));
    Rat db = gram_det(R) / gram_det(L);
    if (valuation(db, L.p) != 0)
        throw std::invalid_argument("apply_basis: matrix not invertible over Z_p");
    return R;
}

}  // namespace krden
