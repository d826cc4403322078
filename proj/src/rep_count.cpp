#include "krden/rep_count.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace krden {

namespace {

using i64 = long long;

struct SystemData {
    long p = 0;
    long D = 0;  // working depth d + e
    long e = 0;  // clearing exponent
    int m = 0, n = 0;
    i64 pD = 0;
    std::vector<i64> A;  // m x m, symmetric, entries mod p^D
    std::vector<i64> T;  // n x n, symmetric, entries mod p^D
};

long min_entry_val(const QuadLattice& L) {
    long mv = 0;
    for (const auto& row : L.gram) {
        for (const Rat& v : row) {
            if (v != 0) mv = std::min(mv, valuation(v, L.p));
        }
    }
    return mv;
}

SystemData build_system(const QuadLattice& M, const QuadLattice& L, long d) {
    if (M.p != L.p) throw std::invalid_argument("count_reps: mismatched primes");
    if (d < 1) throw std::invalid_argument("count_reps: depth must be >= 1");
    SystemData s;
    s.p = M.p;
    s.e = std::max(0L, -std::min(min_entry_val(M), min_entry_val(L)));
    s.D = d + s.e;
    s.m = M.rank();
    s.n = L.rank();
    Int pD = pow_int(s.p, s.D);
    if (pD >= (Int(1) << 31))
        throw std::invalid_argument("count_reps: depth too large for fixed-width arithmetic");
    s.pD = static_cast<i64>(pD);
    Rat clear = 2 * p_power(s.p, s.e);
    s.A.assign(static_cast<size_t>(s.m) * s.m, 0);
    for (int i = 0; i < s.m; ++i) {
        for (int j = 0; j < s.m; ++j) {
            s.A[i * s.m + j] = static_cast<i64>(rat_mod(clear * M.gram[i][j], s.p, pD));
        }
    }
    s.T.assign(static_cast<size_t>(s.n) * s.n, 0);
    for (int i = 0; i < s.n; ++i) {
        for (int j = 0; j < s.n; ++j) {
            s.T[i * s.n + j] = static_cast<i64>(rat_mod(clear * L.gram[i][j], s.p, pD));
        }
    }
    return s;
}

int rank_mod_p(std::vector<i64> a, int rows, int cols, long p) {
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int piv = -1;
        for (int r = rank; r < rows; ++r) {
            if (a[r * cols + c] % p != 0) {
                piv = r;
                break;
            }
        }
        if (piv < 0) continue;
        for (int k = 0; k < cols; ++k) std::swap(a[piv * cols + k], a[rank * cols + k]);
        i64 inv = 1;
        i64 lead = ((a[rank * cols + c] % p) + p) % p;
        for (i64 t = 1; t < p; ++t) {
            if (t * lead % p == 1) {
                inv = t;
                break;
            }
        }
        for (int k = 0; k < cols; ++k) a[rank * cols + k] = a[rank * cols + k] * inv % p;
        for (int r = 0; r < rows; ++r) {
            if (r == rank) continue;
            i64 f = ((a[r * cols + c] % p) + p) % p;
            if (f == 0) continue;
            for (int k = 0; k < cols; ++k)
                a[r * cols + k] = ((a[r * cols + k] - f * a[rank * cols + k]) % p + p) % p;
        }
        ++rank;
    }
    return rank;
}

struct Dfs {
    const SystemData& S;
    bool primitive;
    i64 budget;
    i64 nodes = 0;
    Int total = 0;
    std::vector<i64> X;   // m x n, entries mod p^D
    std::vector<i64> Y0;  // m x n, layer-0 digits
    std::vector<i64> W0;  // m x n, A * Y0 mod p

    explicit Dfs(const SystemData& s, bool prim, i64 b) : S(s), primitive(prim), budget(b) {}

    void bump() {
        if (++nodes > budget) throw budget_exceeded("count_reps: node budget exceeded");
    }

    void run() {
        X.assign(static_cast<size_t>(S.m) * S.n, 0);
        Y0.assign(X.size(), 0);
        W0.assign(X.size(), 0);
        if (S.n == 0) {
            total = 1;
            return;
        }
        layer0_column(0);
    }

    void layer0_column(int c) {
        if (c == S.n) {
            finish_layer0();
            return;
        }
        digits(c, 0);
    }

    void digits(int c, int row) {
        const int m = S.m, n = S.n;
        const long p = S.p;
        if (row == m) {
            bump();
            for (int i = 0; i < m; ++i) {
                i64 acc = 0;
                for (int j = 0; j < m; ++j) acc += S.A[i * m + j] % p * Y0[j * n + c];
                W0[i * n + c] = acc % p;
            }
            for (int i = 0; i <= c; ++i) {
                i64 dot = 0;
                for (int k = 0; k < m; ++k) dot += Y0[k * n + i] * W0[k * n + c];
                if (((dot - S.T[i * n + c]) % p + p) % p != 0) return;
            }
            layer0_column(c + 1);
            return;
        }
        for (i64 dig = 0; dig < p; ++dig) {
            Y0[row * n + c] = dig;
            digits(c, row + 1);
        }
        Y0[row * n + c] = 0;
    }

    void finish_layer0() {
        if (primitive && rank_mod_p(Y0, S.m, S.n, S.p) < S.n) return;
        X = Y0;
        descend(1);
    }

    void descend(long level) {
        if (level == S.D) {
            total += 1;
            return;
        }
        const int m = S.m, n = S.n;
        const int mn = m * n;
        const long p = S.p;
        // P = A X mod p^D; F = X^T P.
        std::vector<i64> P(static_cast<size_t>(m) * n, 0);
        for (int i = 0; i < m; ++i) {
            for (int c = 0; c < n; ++c) {
                i64 acc = 0;
                for (int k = 0; k < m; ++k) acc = (acc + S.A[i * m + k] * X[k * n + c]) % S.pD;
                P[i * n + c] = acc;
            }
        }
        i64 pl = 1;
        for (long t = 0; t < level; ++t) pl *= p;
        int N = n * (n + 1) / 2;
        std::vector<i64> rhs(N, 0);
        {
            int row = 0;
            for (int i = 0; i < n; ++i) {
                for (int j = i; j < n; ++j, ++row) {
                    i64 acc = 0;
                    for (int k = 0; k < m; ++k) acc = (acc + X[k * n + i] * P[k * n + j]) % S.pD;
                    i64 r = ((S.T[i * n + j] - acc) % S.pD + S.pD) % S.pD;
                    if (r % pl != 0)
                        throw std::logic_error("count_reps: residual not divisible at layer");
                    rhs[row] = r / pl % p;
                }
            }
        }
        // Linear layer system over F_p in the digit matrix Y: for i <= j,
        // y_i . (A x_j) + y_j . (A x_i) = rhs(i,j), with A x mod p = P mod p.
        std::vector<i64> mat(static_cast<size_t>(N) * (mn + 1), 0);
        {
            int row = 0;
            for (int i = 0; i < n; ++i) {
                for (int j = i; j < n; ++j, ++row) {
                    for (int k = 0; k < m; ++k) {
                        i64 cj = P[k * n + j] % p;
                        i64 ci = P[k * n + i] % p;
                        if (i == j) {
                            mat[row * (mn + 1) + k * n + i] =
                                (mat[row * (mn + 1) + k * n + i] + 2 * cj) % p;
                        } else {
                            mat[row * (mn + 1) + k * n + i] =
                                (mat[row * (mn + 1) + k * n + i] + cj) % p;
                            mat[row * (mn + 1) + k * n + j] =
                                (mat[row * (mn + 1) + k * n + j] + ci) % p;
                        }
                    }
                    mat[row * (mn + 1) + mn] = rhs[row];
                }
            }
        }
        // Row reduce.
        int rank = 0;
        std::vector<int> pivot_col;
        for (int c = 0; c < mn && rank < N; ++c) {
            int piv = -1;
            for (int r = rank; r < N; ++r) {
                if (mat[r * (mn + 1) + c] % p != 0) {
                    piv = r;
                    break;
                }
            }
            if (piv < 0) continue;
            for (int k = 0; k <= mn; ++k)
                std::swap(mat[piv * (mn + 1) + k], mat[rank * (mn + 1) + k]);
            i64 lead = ((mat[rank * (mn + 1) + c] % p) + p) % p;
            i64 inv = 1;
            for (i64 t = 1; t < p; ++t) {
                if (t * lead % p == 1) {
                    inv = t;
                    break;
                }
            }
            for (int k = 0; k <= mn; ++k)
                mat[rank * (mn + 1) + k] = ((mat[rank * (mn + 1) + k] % p) + p) % p * inv % p;
            for (int r = 0; r < N; ++r) {
                if (r == rank) continue;
                i64 f = ((mat[r * (mn + 1) + c] % p) + p) % p;
                if (f == 0) continue;
                for (int k = 0; k <= mn; ++k)
                    mat[r * (mn + 1) + k] =
                        ((mat[r * (mn + 1) + k] - f * mat[rank * (mn + 1) + k]) % p + p) % p;
            }
            pivot_col.push_back(c);
            ++rank;
        }
        for (int r = rank; r < N; ++r) {
            if (mat[r * (mn + 1) + mn] % p != 0) return;  // inconsistent
        }
        int freedom = mn - rank;
        if (rank == N) {
            // Full row rank persists at every deeper layer (it only depends
            // on X mod p), so each contributes exactly p^{mn - N} digits.
            Int block = 1;
            Int step = pow_int(p, freedom);
            for (long t = level; t < S.D; ++t) block *= step;
            total += block;
            return;
        }
        if (level + 1 == S.D) {
            // The terminal level imposes no further condition, so every
            // solution of the layer system is a full solution.
            total += pow_int(p, freedom);
            return;
        }
        // Enumerate the affine solution set.
        std::vector<int> free_cols;
        {
            size_t pi = 0;
            for (int c = 0; c < mn; ++c) {
                if (pi < pivot_col.size() && pivot_col[pi] == c) {
                    ++pi;
                } else {
                    free_cols.push_back(c);
                }
            }
        }
        std::vector<i64> y(mn, 0), freev(freedom, 0);
        while (true) {
            bump();
            for (int c = 0; c < mn; ++c) y[c] = 0;
            for (int f = 0; f < freedom; ++f) y[free_cols[f]] = freev[f];
            for (int r = 0; r < rank; ++r) {
                i64 acc = mat[r * (mn + 1) + mn];
                for (int f = 0; f < freedom; ++f) {
                    acc -= mat[r * (mn + 1) + free_cols[f]] * freev[f];
                }
                y[pivot_col[r]] = (acc % p + p) % p;
            }
            for (int k = 0; k < mn; ++k) X[k] += pl * y[k];
            descend(level + 1);
            for (int k = 0; k < mn; ++k) X[k] -= pl * y[k];
            int pos = 0;
            while (pos < freedom) {
                if (++freev[pos] < p) break;
                freev[pos] = 0;
                ++pos;
            }
            if (pos == freedom) break;
        }
    }
};

Int run_count(const QuadLattice& M, const QuadLattice& L, long d, bool primitive) {
    SystemData s = build_system(M, L, d);
    Dfs dfs(s, primitive, search_budget());
    dfs.run();
    return dfs.total;
}

}  // namespace

Int count_reps(const QuadLattice& M, const QuadLattice& L, long d) {
    return run_count(M, L, d, false);
}

Int count_prim_reps(const QuadLattice& M, const QuadLattice& L, long d) {
    return run_count(M, L, d, true);
}

Int count_reps_naive(const QuadLattice& M, const QuadLattice& L, long d) {
    SystemData s = build_system(M, L, d);
    double size = std::pow(static_cast<double>(s.pD), s.m * s.n);
    if (size > 2e7) throw std::invalid_argument("count_reps_naive: search space too large");
    int m = s.m, n = s.n, mn = m * n;
    std::vector<i64> X(mn, 0);
    Int total = 0;
    while (true) {
        bool good = true;
        for (int i = 0; i < n && good; ++i) {
            for (int j = i; j < n && good; ++j) {
                i64 acc = 0;
                for (int k = 0; k < m; ++k) {
                    i64 row = 0;
                    for (int l = 0; l < m; ++l) row = (row + s.A[k * m + l] * X[l * n + j]) % s.pD;
                    acc = (acc + X[k * n + i] * row) % s.pD;
                }
                if (((acc - s.T[i * n + j]) % s.pD + s.pD) % s.pD != 0) good = false;
            }
        }
        if (good) total += 1;
        int pos = 0;
        while (pos < mn) {
            if (++X[pos] < s.pD) break;
            X[pos] = 0;
            ++pos;
        }
        if (pos == mn) break;
    }
    return total;
}

RepCount rep_count_at(const QuadLattice& M, const QuadLattice& L, long d, bool primitive) {
    SystemData s = build_system(M, L, d);
    Dfs dfs(s, primitive, search_budget());
    dfs.run();
    RepCount rc;
    rc.count = dfs.total;
    rc.depth = d;
    long n = L.rank();
    long dim = static_cast<long>(M.rank()) * n - n * (n + 1) / 2;
    rc.normalized = Rat(dfs.total) * p_power(M.p, -(d * dim + s.e * M.rank() * n));
    rc.stabilized = false;
    return rc;
}

RepCount density_brute(const QuadLattice& M, const QuadLattice& L, bool primitive) {
    long d0 = 1;
    if (L.rank() > 0) d0 = std::max(1L, max_val(L) + 1);
    RepCount prev = rep_count_at(M, L, d0, primitive);
    for (long d = d0; d <= d0 + 8; ++d) {
        RepCount next = rep_count_at(M, L, d + 1, primitive);
        if (prev.normalized == next.normalized) {
            prev.stabilized = true;
            return prev;
        }
        prev = next;
    }
    throw not_stabilized("density_brute: no agreement up to depth " + std::to_string(d0 + 9) +
                         " (last values " + rat_to_string(prev.normalized) + ")");
}

Rat pden_closed(long k, int eps, const Rat& s, long p) {
    if (eps != 1 && eps != -1) throw std::invalid_argument("pden_closed: eps must be +-1");
    if (s == 0) throw std::invalid_argument("pden_closed: target norm must be nonzero");
    if (k < 0) throw std::invalid_argument("pden_closed: negative rank");
    if (k == 0) return 0;
    long nu = valuation(s, p);
    if (nu < 0) return 0;
    if (k % 2 == 1) {
        if (nu >= 1) return 1 - p_power(p, 1 - k);
        return 1 + Rat(eps * chi(s, p)) * p_power(p, (1 - k) / 2);
    }
    if (nu >= 1) return (1 - Rat(eps) * p_power(p, -k / 2)) * (1 + Rat(eps) * p_power(p, 1 - k / 2));
    return 1 - Rat(eps) * p_power(p, -k / 2);
}

Rat den_vertex_rank1(long n1, int eps1, long n2, int eps2, const Rat& s, long p) {
    if (n1 < 2 || n2 < 2)
        throw std::invalid_argument("den_vertex_rank1: both ranks must be >= 2");
    if (s == 0) throw std::invalid_argument("den_vertex_rank1: target norm must be nonzero");
    long nu = valuation(s, p);
    if (nu < 0) return 0;
    Rat sum = 0;
    for (long i = 0; 2 * i <= nu; ++i) {
        Rat scaled = s * p_power(p, -2 * i);
        Rat term = p_power(p, 1 - n2) * pden_closed(n1, eps1, scaled / p, p) +
                   pden_closed(n2, eps2, scaled, p);
        sum += p_power(p, i * (2 - n1 - n2)) * term;
    }
    return sum;
}

long long search_budget() {
    const char* env = std::getenv("KRDEN_BUDGET");
    if (env == nullptr) return 50'000'000LL;
    char* end = nullptr;
    long long v = std::strtoll(env, &end, 10);
    if (end == env || v <= 0) throw std::invalid_argument("KRDEN_BUDGET: not a positive integer");
    return v;
}

}  // namespace krden
