#include "krden/global.hpp"

#include <algorithm>
#include <stdexcept>

#include "krden/density.hpp"
#include "krden/kr.hpp"

namespace krden {

namespace {

long isqrt_floor(long n) {
    long r = 0;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

std::vector<std::vector<Rat>> to_gram(const TMatrix& T) {
    std::vector<std::vector<Rat>> g(3, std::vector<Rat>(3));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g[i][j] = T.t[i][j];
    return g;
}

// Rational congruence diagonalization; the lattice layer's pivoting choices
// do not affect the Hasse computation below.
std::vector<Rat> t_diagonal(const TMatrix& T) {
    return diagonalize(make_lattice(3, to_gram(T)));
}

// Witt index of T + (-V_v) is 3, i.e. the split quaternary space V_v
// represents T: the rank-7 sum has anisotropic kernel of rank 1 exactly
// when its Hasse invariant matches the split chain's.
bool represented_by_split(const TMatrix& T, long v) {
    std::vector<Rat> diag = t_diagonal(T);
    diag.insert(diag.end(), {Rat(-1), Rat(1), Rat(-1), Rat(1)});
    int hasse = 1;
    Rat det(1);
    for (size_t i = 0; i < diag.size(); ++i) {
        for (size_t j = i + 1; j < diag.size(); ++j)
            hasse *= hilbert(diag[i], diag[j], v);
        det *= diag[i];
    }
    return hasse == hilbert(Rat(-1), Rat(-1), v) * hilbert(Rat(-1), -det, v);
}

}  // namespace

Rat TMatrix::det() const {
    return t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
           t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
           t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
}

bool TMatrix::positive_definite() const {
    if (t[0][0] <= 0) return false;
    if (t[0][0] * t[1][1] - t[0][1] * t[1][0] <= 0) return false;
    return det() > 0;
}

std::vector<TMatrix> enumerate_T(long m1, long m2, long m3) {
    if (m1 < 1 || m2 < 1 || m3 < 1)
        throw std::invalid_argument("enumerate_T needs a positive diagonal");
    std::vector<TMatrix> out;
    long b12 = isqrt_floor(4 * m1 * m2 - 1);
    long b13 = isqrt_floor(4 * m1 * m3 - 1);
    long b23 = isqrt_floor(4 * m2 * m3 - 1);
    for (long s12 = -b12; s12 <= b12; ++s12)
        for (long s13 = -b13; s13 <= b13; ++s13)
            for (long s23 = -b23; s23 <= b23; ++s23) {
                TMatrix T;
                T.t[0][0] = m1;
                T.t[1][1] = m2;
                T.t[2][2] = m3;
                T.t[0][1] = T.t[1][0] = Rat(s12, 2);
                T.t[0][2] = T.t[2][0] = Rat(s13, 2);
                T.t[1][2] = T.t[2][1] = Rat(s23, 2);
                if (T.det() > 0) out.push_back(T);
            }
    return out;
}

std::vector<long> diff_set(const TMatrix& T) {
    if (T.det() == 0) throw std::invalid_argument("diff_set: singular T");
    Int det2t = numerator(T.det() * 8);
    if (det2t < 0) det2t = -det2t;
    std::vector<long> out;
    if (!represented_by_split(T, 2)) out.push_back(2);
    Int rest = det2t;
    while (rest % 2 == 0) rest /= 2;
    for (Int f = 3; f * f <= rest; f += 2) {
        if (rest % f != 0) continue;
        if (!represented_by_split(T, static_cast<long>(f)))
            out.push_back(static_cast<long>(f));
        while (rest % f == 0) rest /= f;
    }
    if (rest > 1 && !represented_by_split(T, static_cast<long>(rest)))
        out.push_back(static_cast<long>(rest));
    std::sort(out.begin(), out.end());
    return out;
}

QuadLattice t_lattice(const TMatrix& T, long v) {
    return make_lattice(v, to_gram(T));
}

namespace {

// Searches for a nontrivial zero of a unit diagonal form modulo v.  For v
// odd this decides Z_v-isotropy of the form: a zero mod v has a unit
// coordinate, so its gradient is a unit and the zero lifts, while any exact
// zero scales to a primitive one and reduces mod v.  Only the first three
// units matter (a unit ternary always has a zero mod v).
bool unit_zero_search(const std::vector<long>& units, long v) {
    size_t n = std::min<size_t>(units.size(), 3);
    if (n < 2) return false;
    std::vector<long> x(n, 0);
    while (true) {
        size_t pos = 0;
        while (pos < n && ++x[pos] == v) x[pos++] = 0;
        if (pos == n) return false;
        long acc = 0;
        for (size_t i = 0; i < n; ++i) acc = (acc + units[i] * x[i] * x[i]) % v;
        if (acc == 0) return true;
    }
}

}  // namespace

bool represented_oracle(const TMatrix& T, long v) {
    // T embeds in the split quaternary space over Q_v iff T + <det T> is
    // isotropic (a rank-4 form of square discriminant is either split or the
    // quaternion norm form).  Normalize the diagonal to valuations 0 and 1;
    // the two parity parts take values of disjoint valuation parity, so the
    // sum is isotropic exactly when one part is.
    std::vector<Rat> diag = t_diagonal(T);
    diag.push_back(diag[0] * diag[1] * diag[2]);
    std::vector<long> even_units, odd_units;
    for (const Rat& c : diag) {
        Rat u = unit_part(c, v);
        long residue = static_cast<long>(rat_mod(u, v, Int(v)));
        (valuation(c, v) % 2 == 0 ? even_units : odd_units).push_back(residue);
    }
    return unit_zero_search(even_units, v) || unit_zero_search(odd_units, v);
}

Rat whittaker_factor(const TMatrix& T, long v, long k, WhittakerLattice lambda) {
    QuadLattice Lam = lambda == WhittakerLattice::SelfDual4 ? lat_hyperbolic(v, 2)
                      : lambda == WhittakerLattice::H0p     ? lat_eichler(v)
                                                            : lat_eichler_dual(v);
    long dval = valuation(gram_det(Lam), v);
    if (dval % 2 != 0)
        throw std::logic_error("whittaker_factor: odd determinant valuation");
    return pow_rat(p_power(v, -dval / 2), 3) * den_at(Lam, t_lattice(T, v), k);
}

Rat kr_local_term(const TMatrix& T, long p, char kind) {
    std::vector<long> diff = diff_set(T);
    if (diff.size() != 1 || diff[0] != p)
        throw std::invalid_argument("kr_local_term needs Diff(T) = {p}");
    QuadLattice L = t_lattice(T, p);
    if (kind == 'Z') return int_Z(L).value;
    if (kind == 'Y') return int_Y(L).value + 1;
    throw std::invalid_argument("kr_local_term kind must be Z or Y");
}

}  // namespace krden
