#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "algmatch/linalg.hpp"
#include "algmatch/updates.hpp"

namespace algmatch {

/// Undirected edge, stored with u < v.
struct Edge {
    Index u;
    Index v;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};
using EdgeList = std::vector<Edge>;

inline Edge make_edge(Index a, Index b) { return a < b ? Edge{a, b} : Edge{b, a}; }

/// Simple undirected graph. Self-loops are dropped and parallel edges
/// collapsed on insertion.
class Graph {
public:
    explicit Graph(Index n = 0);

    void add_edge(Index a, Index b);
    Index size() const noexcept { return n_; }
    const EdgeList& edges() const noexcept { return edges_; }
    bool adjacent(Index a, Index b) const noexcept { return adj_[a * n_ + b]; }
    /// G[keep], relabelled 0..|keep|-1 in the order given.
    Graph induced(std::span<const Index> keep) const;

private:
    Index n_;
    EdgeList edges_;
    std::vector<bool> adj_;
};

enum class Side { T1, T2, S };

/// Vertices are numbered T1 = [0,t1), T2 = [t1,t1+t2), S = [t1+t2, n).
/// Q1 (r x t1) represents M1 by columns, Q2 (t2 x r) represents M2 by rows.
struct PathMatchingInstance {
    PathMatchingInstance(PrimeField field, Index t1, Index t2, Index s, Index r);

    Index t1, t2, s;
    Matrix q1;
    Matrix q2;
    EdgeList edges;

    Index order() const noexcept { return t1 + t2 + s; }
    Index rank() const noexcept { return q1.rows(); }
    const PrimeField& field() const noexcept { return q1.field(); }
    Side side(Index v) const noexcept { return v < t1 ? Side::T1 : v < t1 + t2 ? Side::T2 : Side::S; }

    void add_edge(Index a, Index b);
    /// Throws InvalidInstance for malformed edges and, with full_rank set,
    /// RankDeficientMatroid if either representation has rank below r.
    void validate(bool full_rank = true) const;

    /// Matching instance: every vertex of g in S, no matroids.
    static PathMatchingInstance matching(const Graph& g, PrimeField field);
};

/// Randomly substituted Z with its vertex maps. Rows are laid out as
/// [Q1 rows | T2 rows | T1 rows | S rows] and columns as
/// [Q2 cols | T1 cols | T2 cols | S cols]; the X block of a vertex is its
/// T1/S row and its T2/S column.
struct ZMatrix {
    Matrix z;
    std::vector<std::int64_t> xrow;  // vertex -> Z row of its X row, or -1
    std::vector<std::int64_t> xcol;  // vertex -> Z column of its X column, or -1
};

ZMatrix build_Z(const PathMatchingInstance& inst, Rng& rng);

/// Decides existence of a bpm by testing Z for singularity.
bool bpm_exists(const PathMatchingInstance& inst, std::uint64_t seed);

/// Deterministic check that `m` is a bpm of `inst`: edges of the instance,
/// vertex-disjoint T1-T2 paths through S plus a matching covering the rest
/// of S, and path endpoints forming bases of both matroids.
bool validate_bpm(const PathMatchingInstance& inst, const EdgeList& m);

enum class LedgerMode {
    Lazy,   // record updates and flush them region by region
    Eager,  // apply every update to all of N at once
    Audit,  // lazy, checked entrywise against an eager copy at every leaf
};

struct SolverConfig {
    Index alpha = 4;
    MulOptions mul{};
    std::uint64_t seed = 0;
    int retries = 3;
    bool verify = true;
    LedgerMode mode = LedgerMode::Lazy;
};

struct SolveStats {
    std::uint64_t attempts = 0;
    std::uint64_t subproblems = 0;
    std::uint64_t dedup_skips = 0;
    std::uint64_t leaves = 0;
    std::uint64_t edge_tests = 0;
    std::uint64_t updates = 0;
    std::uint64_t flushes = 0;
    std::uint64_t sweeps = 0;  // full passes of the recursion
};

/// Generator for attempt `attempt` of a run seeded with `seed`.
Rng attempt_rng(std::uint64_t seed, std::uint64_t attempt);

/// The tracked inverse of Z(M) for a partial solution M. N is indexed by
/// vertex on both sides: N(v,w) = (Z(M)^{-1})(xcol(w), xrow(v)) for a vertex
/// v that still has a row and w that still has a column, zero elsewhere.
class SolverState {
public:
    /// nullopt if the substituted Z is singular.
    static std::optional<SolverState> start(const PathMatchingInstance& inst, Rng& rng);

    const Matrix& n() const noexcept { return n_; }
    Matrix& n() noexcept { return n_; }
    bool has_row(Index v) const noexcept { return row_[v]; }
    bool has_col(Index v) const noexcept { return col_[v]; }
    const EdgeList& partial() const noexcept { return m_; }

    /// Update N -= N[*,cols] c N[rows,*] that adds an edge.
    struct Move {
        IndexList cols;
        Matrix c;
        IndexList rows;
    };

    /// The update for edge {i,j} if it is an allowed edge of G(M), reading
    /// only N[{i,j},{i,j}]; nullopt if it is not allowed or not an edge of
    /// the contracted instance.
    std::optional<Move> test(Index i, Index j) const;
    /// Adds {i,j} to M and retires the rows and columns of `mv`. N is left
    /// to the caller.
    void commit(Index i, Index j, const Move& mv);
    /// Applies `mv` to all of N.
    void apply(const Move& mv, const MulOptions& opts = {});

private:
    explicit SolverState(Matrix n) : n_(std::move(n)) {}
    Matrix n_;
    std::vector<bool> row_, col_;
    EdgeList m_;
};

/// Whether edge {i,j} is allowed relative to the state's partial solution.
bool allowed_edge(const SolverState& state, Edge e);

struct BpmResult {
    std::optional<EdgeList> edges;  // nullopt: no bpm (Z singular)
    SolveStats stats;
};

/// Divide-and-conquer bpm search. Throws RandomnessExhausted if every
/// attempt fails verification.
BpmResult solve_bpm(const PathMatchingInstance& inst, const SolverConfig& cfg = {});

struct MatchingResult {
    EdgeList edges;
    Index tutte_rank = 0;
    SolveStats stats;
};

/// Maximum matching through the rank of the Tutte matrix and a perfect
/// matching of G[A] for a nonsingular principal block Z[A,A].
MatchingResult max_matching(const Graph& g, const SolverConfig& cfg = {}, PrimeField field = PrimeField());

struct IndependentMatchingResult {
    EdgeList edges;
    Index rank_z = 0;  // rank of Z; the optimum is rank_z - t1 - t2
    SolveStats stats;
};

/// Maximum independent matching of a bipartite instance (S empty).
IndependentMatchingResult independent_matching(const PathMatchingInstance& inst, const SolverConfig& cfg = {});

}  // namespace algmatch
