#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "algmatch/field.hpp"

namespace algmatch {

using Index = std::size_t;
using IndexList = std::vector<Index>;

/// Dense row-major matrix over one prime field.
class Matrix {
public:
    Matrix(PrimeField field, Index rows, Index cols);

    static Matrix identity(PrimeField field, Index n);
    /// Builds from signed integers, reducing each entry mod p.
    static Matrix from_rows(PrimeField field, const std::vector<std::vector<std::int64_t>>& rows);
    static Matrix random(PrimeField field, Index rows, Index cols, Rng& rng);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    const PrimeField& field() const noexcept { return field_; }
    bool square() const noexcept { return rows_ == cols_; }

    Scalar operator()(Index i, Index j) const noexcept { return data_[i * cols_ + j]; }
    Scalar& operator()(Index i, Index j) noexcept { return data_[i * cols_ + j]; }

    std::span<Scalar> row(Index i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const Scalar> row(Index i) const noexcept { return {data_.data() + i * cols_, cols_}; }
    std::vector<Scalar> column(Index j) const;

    /// M[S,T] in the order given.
    Matrix submatrix(std::span<const Index> rows, std::span<const Index> cols) const;
    /// Contiguous block M_{r0:r0+nr, c0:c0+nc}.
    Matrix block(Index r0, Index c0, Index nr, Index nc) const;
    /// Writes `src` into M[S,T].
    void scatter(std::span<const Index> rows, std::span<const Index> cols, const Matrix& src);
    void set_block(Index r0, Index c0, const Matrix& src);
    /// M with the listed rows and columns removed.
    Matrix minor(std::span<const Index> drop_rows, std::span<const Index> drop_cols) const;

    Matrix transpose() const;
    bool is_zero() const noexcept;

    friend bool operator==(const Matrix& a, const Matrix& b) noexcept;

private:
    PrimeField field_;
    Index rows_;
    Index cols_;
    std::vector<Scalar> data_;
};

struct MulOptions {
    /// Strassen recursion is used while every dimension is at least this large.
    Index strassen_crossover = 128;
    /// Classical kernel only.
    bool naive = false;
};

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, Scalar c);

/// Exact product; Strassen above the crossover, classical below.
Matrix mul(const Matrix& a, const Matrix& b, const MulOptions& opts = {});
/// Classical cubic kernel regardless of size.
Matrix mul_classical(const Matrix& a, const Matrix& b);

/// Gauss-Jordan inverse; nullopt iff singular.
std::optional<Matrix> invert(const Matrix& a);
Scalar determinant(const Matrix& a);

struct RankProfile {
    Index rank = 0;
    IndexList row_basis;  // ascending
    IndexList col_basis;  // ascending
};

/// Elimination with first-nonzero pivoting: columns scanned in index order,
/// pivot row is the first unused row (in index order) with a nonzero entry.
RankProfile rank_profile(const Matrix& a);
/// Same as rank_profile, but scanning rows and columns in the given orders.
/// Every index must appear exactly once in each order.
RankProfile rank_profile(const Matrix& a, std::span<const Index> row_order,
                         std::span<const Index> col_order);

/// Index set A with forced ⊆ A, |A| = rank(Z) and Z[A,A] nonsingular.
/// Z is expected to be skew-symmetric or symmetric, where a row basis always
/// yields a nonsingular principal block.
IndexList max_rank_principal_submatrix(const Matrix& z, std::span<const Index> forced = {});

/// M[R̄,C̄] - M[R̄,C] M[R,C]^{-1} M[R,C̄], with R̄ and C̄ in ascending order.
Matrix schur_complement(const Matrix& m, std::span<const Index> pivot_rows,
                        std::span<const Index> pivot_cols);

/// (M + c u vᵀ)^{-1} from Minv = M^{-1}. Returns Minv unchanged when c = 0 and
/// nullopt when the updated matrix is singular.
std::optional<Matrix> rank1_inverse_update(const Matrix& minv, std::span<const Scalar> u,
                                           std::span<const Scalar> v, Scalar c);

/// Given N = Z^{-1} with N(j,i) != 0, returns the inverse of Z with row i and
/// column j deleted: (N - N[*,i] N(j,i)^{-1} N[j,*]) without row j, column i.
Matrix eliminate_pair_inverse(const Matrix& n, Index i, Index j);

/// Given N = Z^{-1} with N[{i,j},{i,j}] nonsingular, returns the inverse of Z
/// with rows and columns {i,j} deleted.
Matrix eliminate_quad_inverse(const Matrix& n, Index i, Index j);

/// One rank-1 piece of an unfurled 2x2 update: u_which · c · v_whichᵀ, where
/// `u` and `v` select the first (0) or second (1) vector of the pair.
struct UnfurledTerm {
    int u;
    Scalar c;
    int v;
    friend bool operator==(const UnfurledTerm&, const UnfurledTerm&) = default;
};

/// (u1|u2)·C·(v1;v2) as four rank-1 pieces, columns ordered u1,u2,u2,u1 and
/// rows v1,v2,v1,v2: (u1,c11,v1), (u2,c22,v2), (u2,c21,v1), (u1,c12,v2).
std::array<UnfurledTerm, 4> unfurl_rank2(const Matrix& c);

/// X ⊗ Y = X (I - Y)^{-1} for strictly upper triangular Y.
Matrix sequential_update(const Matrix& x, const Matrix& y, const MulOptions& opts = {});

/// Inverse of I - Y for strictly upper triangular Y, by back substitution.
Matrix unit_upper_inverse(const Matrix& y);

}  // namespace algmatch
