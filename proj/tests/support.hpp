#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the elimination or update code it is used to check.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "algmatch/linalg.hpp"

namespace testsupport {

using namespace algmatch;

/// Modular inverse by the extended Euclidean algorithm.
inline std::uint64_t euclid_inverse(std::uint64_t a, std::uint64_t p) {
    __int128 t = 0, new_t = 1;
    __int128 r = p, new_r = a % p;
    while (new_r != 0) {
        __int128 q = r / new_r;
        __int128 tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (t < 0) t += p;
    return static_cast<std::uint64_t>(t);
}

/// Determinant by the Leibniz permutation sum (n <= 8).
inline Scalar leibniz_det(const Matrix& m) {
    const auto& f = m.field();
    const Index n = m.rows();
    std::vector<Index> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Scalar total = f.zero();
    do {
        int inversions = 0;
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        Scalar term = f.one();
        for (Index i = 0; i < n && !term.is_zero(); ++i) term = f.mul(term, m(i, perm[i]));
        total = (inversions % 2) ? f.sub(total, term) : f.add(total, term);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

/// Inverse via the adjugate with Leibniz cofactors (n <= 7). Returns false if
/// singular.
inline bool adjugate_inverse(const Matrix& m, Matrix& out) {
    const auto& f = m.field();
    const Index n = m.rows();
    Scalar det = leibniz_det(m);
    if (det.is_zero()) return false;
    Scalar dinv{euclid_inverse(det.v, f.modulus())};
    out = Matrix(f, n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const Index dr[] = {j};
            const Index dc[] = {i};
            Scalar cof = n == 1 ? f.one() : leibniz_det(m.minor(dr, dc));
            if ((i + j) % 2) cof = f.neg(cof);
            out(i, j) = f.mul(cof, dinv);
        }
    }
    return true;
}

/// Schoolbook product with no blocking, dispatch or bulk accumulation.
inline Matrix naive_product(const Matrix& a, const Matrix& b) {
    const auto& f = a.field();
    Matrix c(f, a.rows(), b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < b.cols(); ++j) {
            Scalar s = f.zero();
            for (Index k = 0; k < a.cols(); ++k) s = f.add(s, f.mul(a(i, k), b(k, j)));
            c(i, j) = s;
        }
    return c;
}

/// X ⊗ Y by its defining recursion X^{(i)} = X^{(i-1)} + X^{(i-1)}_{*,i} Y_{i,*}.
inline Matrix iterate_sequential(Matrix x, const Matrix& y) {
    const auto& f = x.field();
    for (Index i = 0; i < y.rows(); ++i) {
        std::vector<Scalar> col = x.column(i);
        for (Index r = 0; r < x.rows(); ++r)
            for (Index c = 0; c < x.cols(); ++c) x(r, c) = f.add(x(r, c), f.mul(col[r], y(i, c)));
    }
    return x;
}

/// Rank by exhaustive search for the largest nonsingular square minor
/// (small matrices only).
inline Index minor_search_rank(const Matrix& m) {
    const Index nr = m.rows(), nc = m.cols();
    for (Index k = std::min(nr, nc); k > 0; --k) {
        std::vector<bool> rsel(nr, false), csel(nc, false);
        std::fill(rsel.begin(), rsel.begin() + k, true);
        do {
            IndexList rows;
            for (Index i = 0; i < nr; ++i)
                if (rsel[i]) rows.push_back(i);
            std::fill(csel.begin(), csel.end(), false);
            std::fill(csel.begin(), csel.begin() + k, true);
            do {
                IndexList cols;
                for (Index j = 0; j < nc; ++j)
                    if (csel[j]) cols.push_back(j);
                if (!leibniz_det(m.submatrix(rows, cols)).is_zero()) return k;
            } while (std::prev_permutation(csel.begin(), csel.end()));
        } while (std::prev_permutation(rsel.begin(), rsel.end()));
    }
    return 0;
}

/// Row reduction written out longhand: returns the rank and, when the
/// matrix is square and nonsingular, its inverse in `inv`.
inline Index longhand_reduce(const Matrix& m, Matrix* inv = nullptr) {
    const auto& f = m.field();
    const std::uint64_t p = f.modulus();
    const Index nr = m.rows(), nc = m.cols();
    auto mm = [p](std::uint64_t a, std::uint64_t b) {
        return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
    };
    // Augment with the identity when an inverse is wanted.
    const Index w = inv ? nc + nr : nc;
    std::vector<std::vector<std::uint64_t>> a(nr, std::vector<std::uint64_t>(w, 0));
    for (Index i = 0; i < nr; ++i) {
        for (Index j = 0; j < nc; ++j) a[i][j] = m(i, j).v;
        if (inv) a[i][nc + i] = 1;
    }
    Index rank = 0;
    for (Index c = 0; c < nc && rank < nr; ++c) {
        Index piv = nr;
        for (Index i = rank; i < nr; ++i)
            if (a[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv == nr) continue;
        std::swap(a[piv], a[rank]);
        const std::uint64_t s = euclid_inverse(a[rank][c], p);
        for (auto& x : a[rank]) x = mm(x, s);
        for (Index i = 0; i < nr; ++i) {
            if (i == rank || a[i][c] == 0) continue;
            const std::uint64_t t = a[i][c];
            for (Index j = 0; j < w; ++j) a[i][j] = (a[i][j] + p - mm(t, a[rank][j])) % p;
        }
        ++rank;
    }
    if (inv && rank == nr && nr == nc) {
        *inv = Matrix(f, nr, nr);
        for (Index i = 0; i < nr; ++i)
            for (Index j = 0; j < nr; ++j) (*inv)(i, j) = Scalar{a[i][nc + j]};
    }
    return rank;
}

inline Matrix random_strict_upper(const PrimeField& f, Index n, Rng& rng) {
    Matrix y(f, n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) y(i, j) = f.sample(rng);
    return y;
}

/// Random nonsingular matrix (resampled until the determinant is nonzero).
inline Matrix random_nonsingular(const PrimeField& f, Index n, Rng& rng) {
    for (;;) {
        Matrix m = Matrix::random(f, n, n, rng);
        if (n <= 7 ? !leibniz_det(m).is_zero() : invert(m).has_value()) return m;
    }
}

}  // namespace testsupport
