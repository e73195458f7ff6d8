#pragma once

#include <map>

#include "algmatch/matroid.hpp"
#include "algmatch/pathmatch.hpp"

namespace algmatch {

/// Exact ranks of column subsets of a fixed matrix, memoized.
class RankOracle {
public:
    explicit RankOracle(Matrix columns, std::size_t cache_limit = 1 << 16);

    Index ground() const noexcept { return m_.cols(); }
    Index rank(IndexList subset);
    bool independent(IndexList subset) { return rank(subset) == subset.size(); }

private:
    Matrix m_;
    std::size_t limit_;
    std::map<IndexList, Index> memo_;
};

/// Maximum matching size by memoized search over vertex subsets (n <= 24).
Index oracle_max_matching(const Graph& g);

/// Maximum common independent set by shortest augmenting paths in the
/// exchange graph.
IndexList oracle_matroid_intersection(const MatroidPair& pair);

/// Exact bpm existence by enumerating bases, path systems and matchings of
/// the leftover S vertices (|S| <= 8, t1, t2 <= 3).
bool oracle_bpm_exists(const PathMatchingInstance& inst);

}  // namespace algmatch
