#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "algmatch/linalg.hpp"

namespace algmatch {

/// A set of rows and columns of the tracked matrix.
struct Region {
    IndexList rows;
    IndexList cols;

    static Region square(IndexList idx) { return Region{idx, std::move(idx)}; }
};

/// One recorded low-rank correction N -= u·c·v, where u = N[*,cols] and
/// v = N[rows,*] are taken at the moment of recording.
struct RecordedUpdate {
    IndexList cols;  // columns of U (and of C)
    IndexList rows;  // rows of V (and of C)
    Matrix c;        // arity x arity block stored at C[cols, rows]
    // Indices where U[*,cols] (resp. V[rows,*]) holds its true value.
    std::vector<bool> u_known;
    std::vector<bool> v_known;

    Index arity() const noexcept { return cols.size(); }
};

/// Pending-update ledger for an n x n tracked inverse N.
///
/// Cleanliness is tracked per entry of N as the number of recorded updates
/// already applied there; an entry is clean when that count equals size().
/// Updates always reach an entry in recording order, so a single count per
/// entry describes its state exactly.
class UpdateLedger {
public:
    UpdateLedger(PrimeField field, Index n);

    Index order() const noexcept { return n_; }
    std::size_t size() const noexcept { return updates_.size(); }
    const std::vector<RecordedUpdate>& updates() const noexcept { return updates_; }

    const Matrix& U() const noexcept { return u_; }
    const Matrix& C() const noexcept { return c_; }
    const Matrix& V() const noexcept { return v_; }

    struct Tag {
        Index index;
        Index arity;
        friend bool operator==(const Tag&, const Tag&) = default;
    };
    /// Column (row) indices of every update in recording order, tagged with
    /// the arity of the update they belong to.
    std::vector<Tag> pi_c() const;
    std::vector<Tag> pi_r() const;

    /// Records the update with parameters read from `n` over `scope`
    /// (u = N[scope, cols], v = N[rows, scope]). N itself is not modified;
    /// N[scope, scope] must be clean. Throws IndexReuse if any row or column
    /// already belongs to a recorded update.
    void record(std::span<const Index> cols, const Matrix& c, std::span<const Index> rows,
                const Matrix& n, std::span<const Index> scope);

    /// Brings N[target] to the value it would have if every recorded update
    /// had been applied eagerly. Pending updates must share a region W where
    /// their U rows and V columns are known and N[W,W] is uniformly stale or
    /// clean; the rest of the target is reached through W by the sequential
    /// update lemma. Throws DirtyParameters otherwise.
    void flush(Matrix& n, const Region& target, const MulOptions& opts = {});

    std::uint32_t applied(Index r, Index c) const noexcept { return applied_[r * n_ + c]; }
    bool is_clean(const Region& region) const noexcept;
    void require_clean(const Region& region) const;

    // Building blocks shared with solvers that never materialize N in full.
    // Updates [first, last) are addressed by recording index.

    /// Given X = N[rows, cols of updates first..last) as it stood before
    /// update `first`, returns (and stores into U) each update's u over
    /// `rows`. Requires V[rows_k, cols_l] known for first <= k < l < last.
    Matrix materialize_u(std::size_t first, std::size_t last, std::span<const Index> rows,
                         const Matrix& x, const MulOptions& opts = {});
    /// Row counterpart: X = N[rows of updates, cols] before update `first`.
    Matrix materialize_v(std::size_t first, std::size_t last, std::span<const Index> cols,
                         const Matrix& x, const MulOptions& opts = {});
    /// U[rows, K] · C_K · V[K, cols] for K = [first, last); the U rows and V
    /// columns involved must be known.
    Matrix correction(std::size_t first, std::size_t last, std::span<const Index> rows,
                      std::span<const Index> cols, const MulOptions& opts = {}) const;

    /// N[rows, cols] -= correction(first, last, rows, cols) for a block that
    /// holds exactly the first `first` updates; the block is then marked as
    /// holding `last`.
    void apply(Matrix& n, std::span<const Index> rows, std::span<const Index> cols, std::size_t first,
               std::size_t last, const MulOptions& opts = {});

    IndexList update_cols(std::size_t first, std::size_t last) const;
    IndexList update_rows(std::size_t first, std::size_t last) const;

private:
    void mark(std::span<const Index> rows, std::span<const Index> cols, std::uint32_t value);
    void require_uniform(std::span<const Index> rows, std::span<const Index> cols, std::uint32_t value,
                         const char* what) const;
    // Stale rows (columns) of a block grouped by applied count; each row
    // (column) must be uniform across the block.
    std::map<std::uint32_t, IndexList> stale_rows(std::span<const Index> rows, std::span<const Index> cols,
                                                  const char* what) const;
    std::map<std::uint32_t, IndexList> stale_cols(std::span<const Index> rows, std::span<const Index> cols,
                                                  const char* what) const;

    PrimeField field_;
    Index n_;
    Matrix u_, c_, v_;
    std::vector<RecordedUpdate> updates_;
    std::vector<bool> col_used_, row_used_;
    std::vector<std::uint32_t> applied_;
};

}  // namespace algmatch
