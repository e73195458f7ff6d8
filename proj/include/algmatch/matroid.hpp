#pragma once

#include <cstdint>
#include <vector>

#include "algmatch/linalg.hpp"
#include "algmatch/pathmatch.hpp"

namespace algmatch {

/// Two linear matroids on the ground set [0,n): M1 is represented by the
/// columns of Q1 (r1 x n), M2 by the rows of Q2 (n x r2). Ranks need not be
/// full or equal.
struct MatroidPair {
    Matrix q1;
    Matrix q2;

    Index ground() const noexcept { return q1.cols(); }
    const PrimeField& field() const noexcept { return q1.field(); }
    void validate() const;

    /// Both matroids given by columns of r x n matrices.
    static MatroidPair from_columns(const Matrix& a1, const Matrix& a2);
};

/// Nonzero diagonal of X.
std::vector<Scalar> sample_z(const PrimeField& f, Index n, Rng& rng);

/// Y = -Q1 diag(z)^{-1} Q2, the Schur complement of X in Z.
Matrix build_Y(const MatroidPair& pair, std::span<const Scalar> z, const MulOptions& opts = {});

/// rank Y for random z: the maximum intersection size whp.
Index max_intersection_size(const MatroidPair& pair, std::uint64_t seed);

/// Whether J is independent in both matroids.
bool common_independent(const MatroidPair& pair, const IndexList& j);

/// Intersection state over the full-rank restriction of a pair: Q1 and Q2 are
/// cut down to the rows and columns of a maximal nonsingular block of Y, so
/// the restricted Y is k x k and invertible.
class MatroidState {
public:
    MatroidState(const MatroidPair& pair, Rng& rng, const MulOptions& opts = {});

    Index rank() const noexcept { return q1_.rows(); }
    Index ground() const noexcept { return q1_.cols(); }
    const IndexList& J() const noexcept { return j_; }
    bool in_J(Index i) const noexcept { return in_j_[i]; }
    const std::vector<Scalar>& z() const noexcept { return z_; }
    const std::vector<Scalar>& z_inv() const noexcept { return zinv_; }
    const Matrix& ycal() const noexcept { return ycal_; }
    const Matrix& q1() const noexcept { return q1_; }
    const Matrix& q2() const noexcept { return q2_; }
    const MulOptions& mul_options() const noexcept { return opts_; }

    /// v 𝒴 u for element i; zero exactly when i is not allowed.
    Scalar pivot(Index i) const;

    /// (Z(J)^{-1})[rows, cols] on the X block, for rows and cols outside J,
    /// from the current 𝒴.
    Matrix block(std::span<const Index> rows, std::span<const Index> cols) const;

    /// Caches the diagonal block [lo, hi) of Z(J)^{-1}.
    void load_block(Index lo, Index hi);
    Index block_lo() const noexcept { return lo_; }
    Index block_hi() const noexcept { return hi_; }
    const Matrix& cached_block() const noexcept { return cache_; }

    /// Diagonal test against the cached block. Throws StaleBlock if i is not
    /// in it.
    bool allowed_element(Index i) const;

    /// Adds i to J: rank-1 updates of 𝒴 and of the cached block (if it holds
    /// i). Throws NotAllowed if v 𝒴 u = 0; the state is then unchanged.
    void y_rank1_update(Index i);

private:
    MulOptions opts_;
    Matrix q1_, q2_, ycal_;
    std::vector<Scalar> z_, zinv_;
    IndexList j_;
    std::vector<bool> in_j_;
    Index lo_ = 0, hi_ = 0;
    Matrix cache_;
};

struct IntersectConfig {
    std::uint64_t seed = 0;
    int retries = 3;
    MulOptions mul{};
};

struct LevelAudit {
    Index level = 0;
    Index max_rows = 0;  // largest |V2| for which a partial block was built
    Index max_cols = 0;  // largest number of update columns in it
    std::uint64_t blocks = 0;
};

struct IntersectResult {
    IndexList elements;  // ascending
    Index rank_y = 0;    // size bound from rank Y(∅)
    std::uint64_t attempts = 0;
    std::vector<LevelAudit> levels;  // Algorithm I only
};

/// Diagonal scan in r x r blocks with rank-1 updates of 𝒴.
IntersectResult intersect_alg2(const MatroidPair& pair, const IntersectConfig& cfg = {});

/// Halving recursion with lazily applied updates; N is built on demand.
IntersectResult intersect_alg1(const MatroidPair& pair, const IntersectConfig& cfg = {});

}  // namespace algmatch
