#pragma once

#include <vector>

#include "krden/padic.hpp"

namespace krden {

// Quadratic lattice over Z_p presented by a half-integral Gram matrix:
// gram[i][j] = (x_i, x_j)/2 where (x, y) = q(x+y) - q(x) - q(y), so the
// diagonal entries are the values q(x_i).  Entries are rationals whose
// denominators are supported at p and 2; the matrix must be symmetric and
// non-degenerate.
struct QuadLattice {
    long p = 3;
    std::vector<std::vector<Rat>> gram;

    int rank() const { return static_cast<int>(gram.size()); }
};

struct JordanBlock {
    long exponent;  // scale valuation of the block
    int rank;
    int eps;  // chi of the block's normalized discriminant
};

// Isometry invariants of the ambient quadratic space Q_p x L.
struct SpaceClass {
    int rank = 0;
    int det_val_parity = 0;  // v_p(det) mod 2
    int det_chi = 0;         // chi of the unit part of det
    int hasse = 1;           // product of Hilbert symbols over a diagonalization
    int disc_chi = 0;        // chi((-1)^{n(n-1)/2} det); 0 when v_p(det) is odd
};

// Validates symmetry, p-supported denominators and non-degeneracy.
QuadLattice make_lattice(long p, std::vector<std::vector<Rat>> gram);
QuadLattice lat_diag(long p, const std::vector<Rat>& d);

// Rank-k self-dual lattice with eps = chi of its normalized discriminant
// (k >= 1).  u overrides the default non-residue used for eps = -1.
QuadLattice lat_selfdual(long p, int k, int eps, long u = 0);
// Orthogonal sum of k hyperbolic planes [[0,1/2],[1/2,0]]; rank 2k, eps +1.
QuadLattice lat_hyperbolic(long p, int k);
// Rank-4 lattices attached to the quaternion orders: the Eichler order of
// level p and its dual, and the maximal order of the division algebra with
// its dual.
QuadLattice lat_eichler(long p);
QuadLattice lat_eichler_dual(long p);
QuadLattice lat_quat_order(long p, long u = 0);
QuadLattice lat_quat_order_dual(long p, long u = 0);
// Trace-zero elements of the split quaternions with the determinant form:
// q(a, b, c) = -a^2 - bc.
QuadLattice lat_trace_zero(long p);

QuadLattice rescale(const QuadLattice& L, long e);  // scale form by p^e
QuadLattice orthosum(const QuadLattice& A, const QuadLattice& B);
QuadLattice dual(const QuadLattice& L);

// Values q(b_i) of an orthogonal basis, in the order found.
std::vector<Rat> diagonalize(const QuadLattice& L);
// Sorted valuations of a diagonalization.
std::vector<long> fundamental_invariants(const QuadLattice& L);
std::vector<long> gk_invariants(const QuadLattice& L);
std::vector<JordanBlock> jordan(const QuadLattice& L);
SpaceClass invariants(const QuadLattice& L);

Rat gram_det(const QuadLattice& L);
Rat q_value(const QuadLattice& L, const std::vector<Rat>& x);
bool is_integral(const QuadLattice& L);
long min_val(const QuadLattice& L);
long max_val(const QuadLattice& L);

bool is_anisotropic(const QuadLattice& L);
bool is_isometric(const QuadLattice& A, const QuadLattice& B);

// Orthogonal complement of a primitive vector x with q(x) != 0 in L,
// presented on a basis of the sublattice {y : (y, x) = 0}.
QuadLattice ortho_complement(const QuadLattice& L, const std::vector<Rat>& x);

// Gram matrix after the basis change with integer matrix B (columns are the
// new basis vectors); B must be invertible over Z_p.
QuadLattice apply_basis(const QuadLattice& L, const std::vector<std::vector<Int>>& B);

}  // namespace krden
