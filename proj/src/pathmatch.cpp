#include "algmatch/pathmatch.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <string>

namespace algmatch {

// ---------------------------------------------------------------- graph

Graph::Graph(Index n) : n_(n), adj_(n * n, false) {}

void Graph::add_edge(Index a, Index b) {
    if (a >= n_ || b >= n_) throw InvalidInstance("edge endpoint out of range");
    if (a == b || adj_[a * n_ + b]) return;
    adj_[a * n_ + b] = adj_[b * n_ + a] = true;
    edges_.insert(std::lower_bound(edges_.begin(), edges_.end(), make_edge(a, b)), make_edge(a, b));
}

Graph Graph::induced(std::span<const Index> keep) const {
    Graph h(keep.size());
    for (Index x = 0; x < keep.size(); ++x)
        for (Index y = x + 1; y < keep.size(); ++y)
            if (adjacent(keep[x], keep[y])) h.add_edge(x, y);
    return h;
}

// -------------------------------------------------------------- instance

PathMatchingInstance::PathMatchingInstance(PrimeField field, Index t1_, Index t2_, Index s_, Index r)
    : t1(t1_), t2(t2_), s(s_), q1(field, r, t1_), q2(field, t2_, r) {}

void PathMatchingInstance::add_edge(Index a, Index b) {
    const Edge e = make_edge(a, b);
    auto it = std::lower_bound(edges.begin(), edges.end(), e);
    if (it == edges.end() || *it != e) edges.insert(it, e);
}

void PathMatchingInstance::validate(bool full_rank) const {
    if (!(q1.field() == q2.field())) throw FieldMismatch("Q1 and Q2 over different fields");
    if (q1.cols() != t1 || q2.rows() != t2 || q2.cols() != q1.rows())
        throw DimensionMismatch("matroid representations do not match the vertex sets");
    const Index n = order();
    for (const Edge& e : edges) {
        if (e.u >= e.v || e.v >= n) throw InvalidInstance("malformed edge");
        if (side(e.u) == side(e.v) && side(e.u) != Side::S)
            throw InvalidInstance("edge inside T1 or inside T2");
    }
    if (!std::is_sorted(edges.begin(), edges.end()) ||
        std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw InvalidInstance("edge list not sorted and unique");
    if (!full_rank) return;
    const Index r = rank();
    if (rank_profile(q1).rank != r) throw RankDeficientMatroid("rank(Q1) < r");
    if (rank_profile(q2).rank != r) throw RankDeficientMatroid("rank(Q2) < r");
}

PathMatchingInstance PathMatchingInstance::matching(const Graph& g, PrimeField field) {
    PathMatchingInstance inst(field, 0, 0, g.size(), 0);
    inst.edges = g.edges();
    return inst;
}

// ------------------------------------------------------------------- Z

namespace {

ZMatrix assemble_Z(const PathMatchingInstance& inst, Rng& rng) {
    const PrimeField& f = inst.field();
    const Index r = inst.rank(), t1 = inst.t1, t2 = inst.t2, s = inst.s;
    const Index dim = r + t1 + t2 + s;
    ZMatrix out{Matrix(f, dim, dim), std::vector<std::int64_t>(inst.order(), -1),
                std::vector<std::int64_t>(inst.order(), -1)};
    Matrix& z = out.z;
    for (Index v = 0; v < t1; ++v) out.xrow[v] = static_cast<std::int64_t>(r + t2 + v);
    for (Index k = 0; k < t2; ++k) out.xcol[t1 + k] = static_cast<std::int64_t>(r + t1 + k);
    for (Index k = 0; k < s; ++k) {
        out.xrow[t1 + t2 + k] = static_cast<std::int64_t>(r + t2 + t1 + k);
        out.xcol[t1 + t2 + k] = static_cast<std::int64_t>(r + t1 + t2 + k);
    }

    for (Index i = 0; i < r; ++i)
        for (Index v = 0; v < t1; ++v) z(i, r + v) = inst.q1(i, v);
    for (Index k = 0; k < t2; ++k)
        for (Index j = 0; j < r; ++j) z(r + k, j) = inst.q2(k, j);
    for (Index v = 0; v < t1; ++v) z(out.xrow[v], r + v) = f.sample_nonzero(rng);
    for (Index k = 0; k < t2; ++k) z(r + k, out.xcol[t1 + k]) = f.sample_nonzero(rng);

    for (const Edge& e : inst.edges) {
        const Scalar x = f.sample(rng);
        const Side su = inst.side(e.u), sv = inst.side(e.v);
        if (su == Side::S && sv == Side::S) {
            z(out.xrow[e.u], out.xcol[e.v]) = x;
            z(out.xrow[e.v], out.xcol[e.u]) = f.neg(x);
        } else if (su == Side::T2 || sv == Side::T1) {
            z(out.xrow[e.v], out.xcol[e.u]) = x;
        } else {
            z(out.xrow[e.u], out.xcol[e.v]) = x;
        }
    }
    return out;
}

}  // namespace

ZMatrix build_Z(const PathMatchingInstance& inst, Rng& rng) {
    inst.validate();
    return assemble_Z(inst, rng);
}

bool bpm_exists(const PathMatchingInstance& inst, std::uint64_t seed) {
    Rng rng = attempt_rng(seed, 0);
    return invert(build_Z(inst, rng).z).has_value();
}

Rng attempt_rng(std::uint64_t seed, std::uint64_t attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(attempt), static_cast<std::uint32_t>(attempt >> 32)};
    return Rng(seq);
}

// ----------------------------------------------------------- validation

bool validate_bpm(const PathMatchingInstance& inst, const EdgeList& m) {
    const Index n = inst.order();
    std::vector<std::vector<Index>> adj(n);
    std::set<Edge> seen;
    for (const Edge& e : m) {
        if (e.u >= e.v || e.v >= n) return false;
        if (!std::binary_search(inst.edges.begin(), inst.edges.end(), e)) return false;
        if (!seen.insert(e).second) return false;
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    for (Index v = 0; v < n; ++v) {
        const Index cap = inst.side(v) == Side::S ? 2 : 1;
        if (adj[v].size() > cap) return false;
        if (inst.side(v) == Side::S && adj[v].empty()) return false;
    }
    std::vector<bool> done(n, false);
    IndexList d1, d2;
    for (Index v = 0; v < n; ++v) {
        if (done[v] || adj[v].empty()) continue;
        IndexList comp;
        std::vector<Index> stack = {v};
        done[v] = true;
        Index degree_sum = 0;
        while (!stack.empty()) {
            Index x = stack.back();
            stack.pop_back();
            comp.push_back(x);
            degree_sum += adj[x].size();
            for (Index y : adj[x])
                if (!done[y]) {
                    done[y] = true;
                    stack.push_back(y);
                }
        }
        if (degree_sum / 2 != comp.size() - 1) return false;  // a cycle
        Index n1 = 0, n2 = 0;
        for (Index x : comp) {
            if (inst.side(x) == Side::T1) {
                ++n1;
                d1.push_back(x);
            } else if (inst.side(x) == Side::T2) {
                ++n2;
                d2.push_back(x - inst.t1);
            }
        }
        const bool matching_edge = n1 == 0 && n2 == 0 && comp.size() == 2;
        const bool path = n1 == 1 && n2 == 1;
        if (!matching_edge && !path) return false;
    }
    const Index r = inst.rank();
    if (d1.size() != r || d2.size() != r) return false;
    std::sort(d1.begin(), d1.end());
    std::sort(d2.begin(), d2.end());
    IndexList all_r(r);
    for (Index i = 0; i < r; ++i) all_r[i] = i;
    if (rank_profile(inst.q1.submatrix(all_r, d1)).rank != r) return false;
    if (rank_profile(inst.q2.submatrix(d2, all_r)).rank != r) return false;
    return true;
}

// ---------------------------------------------------------- solver state

std::optional<SolverState> SolverState::start(const PathMatchingInstance& inst, Rng& rng) {
    ZMatrix zm = build_Z(inst, rng);
    auto zinv = invert(zm.z);
    if (!zinv) return std::nullopt;
    const Index n = inst.order();
    Matrix nm(inst.field(), n, n);
    for (Index v = 0; v < n; ++v) {
        if (zm.xrow[v] < 0) continue;
        for (Index w = 0; w < n; ++w)
            if (zm.xcol[w] >= 0) nm(v, w) = (*zinv)(zm.xcol[w], zm.xrow[v]);
    }
    SolverState st(std::move(nm));
    st.row_.resize(n);
    st.col_.resize(n);
    for (Index v = 0; v < n; ++v) {
        st.row_[v] = zm.xrow[v] >= 0;
        st.col_[v] = zm.xcol[v] >= 0;
    }
    return st;
}

std::optional<SolverState::Move> SolverState::test(Index i, Index j) const {
    const PrimeField& f = n_.field();
    auto single = [&](Index row, Index col) -> std::optional<Move> {
        const Scalar x = n_(row, col);
        if (x.is_zero()) return std::nullopt;
        Matrix c(f, 1, 1);
        c(0, 0) = f.inv(x);
        return Move{{col}, std::move(c), {row}};
    };
    const bool ri = row_[i], ci = col_[i], rj = row_[j], cj = col_[j];
    if (ri && !ci && cj) return single(i, j);
    if (rj && !cj && ci) return single(j, i);
    if (ci && !ri && rj) return single(j, i);
    if (cj && !rj && ri) return single(i, j);
    if (ri && ci && rj && cj) {
        const IndexList ij = {i, j};
        auto c = invert(n_.submatrix(ij, ij));
        if (!c) return std::nullopt;
        return Move{ij, std::move(*c), ij};
    }
    return std::nullopt;
}

void SolverState::commit(Index i, Index j, const Move& mv) {
    for (Index r : mv.rows) row_[r] = false;
    for (Index c : mv.cols) col_[c] = false;
    m_.push_back(make_edge(i, j));
}

namespace {

void apply_move(Matrix& n, const SolverState::Move& mv, const MulOptions& opts) {
    IndexList all(n.rows());
    for (Index v = 0; v < n.rows(); ++v) all[v] = v;
    const Matrix u = n.submatrix(all, mv.cols);
    const Matrix v = n.submatrix(mv.rows, all);
    n = sub(n, mul(mul(u, mv.c, opts), v, opts));
}

IndexList iota(Index n) {
    IndexList v(n);
    for (Index i = 0; i < n; ++i) v[i] = i;
    return v;
}

// One attempt of the divide-and-conquer search over a started state.
class Search {
public:
    Search(const PathMatchingInstance& inst, const SolverConfig& cfg, SolverState& st, SolveStats& stats)
        : cfg_(cfg), st_(st), stats_(stats), led_(inst.field(), inst.order()), n_(inst.order()),
          adj_(n_ * n_, false) {
        for (const Edge& e : inst.edges) adj_[e.u * n_ + e.v] = adj_[e.v * n_ + e.u] = true;
        if (cfg.mode == LedgerMode::Audit) eager_ = st.n();
    }

    void run() {
        const IndexList all = iota(n_);
        seen_.insert(all);
        visit(all);
        if (cfg_.mode == LedgerMode::Eager) return;
        led_.flush(st_.n(), Region::square(all), cfg_.mul);
        if (eager_ && !(*eager_ == st_.n())) throw InternalConsistency("lazy and eager inverses differ at the end");
    }

private:
    void visit(const IndexList& p) {
        ++stats_.subproblems;
        if (p.size() <= 2) {
            leaf(p);
            return;
        }
        const Index a = cfg_.alpha, m = p.size();
        std::vector<IndexList> parts(a);
        for (Index q = 0; q < a; ++q) parts[q].assign(p.begin() + q * m / a, p.begin() + (q + 1) * m / a);
        for (Index x = 0; x < a; ++x)
            for (Index y = x + 1; y < a; ++y) {
                IndexList w = parts[x];
                w.insert(w.end(), parts[y].begin(), parts[y].end());
                if (w.size() < 2) continue;
                if (!seen_.insert(w).second) {
                    ++stats_.dedup_skips;
                    continue;
                }
                if (cfg_.mode == LedgerMode::Audit) led_.require_clean(Region::square(w));
                visit(w);
                if (cfg_.mode != LedgerMode::Eager) {
                    led_.flush(st_.n(), Region::square(p), cfg_.mul);
                    ++stats_.flushes;
                }
            }
    }

    void leaf(const IndexList& p) {
        ++stats_.leaves;
        if (p.size() < 2) return;
        const Index i = p[0], j = p[1];
        if (!adj_[i * n_ + j]) return;
        ++stats_.edge_tests;
        if (eager_ && !(eager_->submatrix(p, p) == st_.n().submatrix(p, p)))
            throw InternalConsistency("lazy block differs from eager block at leaf " + std::to_string(i) + "," +
                                      std::to_string(j));
        auto mv = st_.test(i, j);
        if (!mv) return;
        st_.commit(i, j, *mv);
        ++stats_.updates;
        if (cfg_.mode == LedgerMode::Eager) {
            st_.apply(*mv, cfg_.mul);
            return;
        }
        led_.record(mv->cols, mv->c, mv->rows, st_.n(), p);
        if (eager_) apply_move(*eager_, *mv, cfg_.mul);
    }

    const SolverConfig& cfg_;
    SolverState& st_;
    SolveStats& stats_;
    UpdateLedger led_;
    Index n_;
    std::vector<bool> adj_;
    std::set<IndexList> seen_;
    std::optional<Matrix> eager_;
};

// Every S vertex is covered and r paths join T1 to T2.
bool finished(const PathMatchingInstance& inst, const SolverState& st) {
    Index starts = 0;
    for (Index v = 0; v < inst.t1; ++v)
        if (!st.has_row(v)) ++starts;
    if (starts != inst.rank()) return false;
    for (Index v = inst.t1 + inst.t2; v < inst.order(); ++v)
        if (st.has_row(v) || st.has_col(v)) return false;
    return true;
}

}  // namespace

void SolverState::apply(const Move& mv, const MulOptions& opts) { apply_move(n_, mv, opts); }

bool allowed_edge(const SolverState& state, Edge e) { return state.test(e.u, e.v).has_value(); }

// --------------------------------------------------------------- drivers

BpmResult solve_bpm(const PathMatchingInstance& inst, const SolverConfig& cfg) {
    if (cfg.alpha < 3) throw InvalidInstance("alpha must be at least 3");
    inst.validate();
    BpmResult res;
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        ++res.stats.attempts;
        Rng rng = attempt_rng(cfg.seed, attempt);
        auto st = SolverState::start(inst, rng);
        if (!st) return res;
        // A single sweep tests each pair once. An S-S edge that failed as a
        // matching edge can become allowed later as the last link of a path,
        // so sweep again over the remainder until it is done or stuck.
        for (std::size_t before = SIZE_MAX; !finished(inst, *st) && st->partial().size() != before;) {
            before = st->partial().size();
            ++res.stats.sweeps;
            Search(inst, cfg, *st, res.stats).run();
        }
        EdgeList m = st->partial();
        std::sort(m.begin(), m.end());
        if (!cfg.verify || validate_bpm(inst, m)) {
            res.edges = std::move(m);
            return res;
        }
    }
    throw RandomnessExhausted("no verified bpm after " + std::to_string(cfg.retries + 1) + " attempts");
}

MatchingResult max_matching(const Graph& g, const SolverConfig& cfg, PrimeField field) {
    const PathMatchingInstance inst = PathMatchingInstance::matching(g, field);
    MatchingResult res;
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        Rng rng = attempt_rng(cfg.seed, attempt);
        const Matrix z = build_Z(inst, rng).z;
        const IndexList a = max_rank_principal_submatrix(z);
        res.tutte_rank = a.size();
        SolverConfig inner = cfg;
        inner.seed = rng();
        const Graph h = g.induced(a);
        BpmResult sub = solve_bpm(PathMatchingInstance::matching(h, field), inner);
        res.stats.attempts += sub.stats.attempts;
        res.stats.subproblems += sub.stats.subproblems;
        res.stats.dedup_skips += sub.stats.dedup_skips;
        res.stats.leaves += sub.stats.leaves;
        res.stats.edge_tests += sub.stats.edge_tests;
        res.stats.updates += sub.stats.updates;
        res.stats.flushes += sub.stats.flushes;
        res.stats.sweeps += sub.stats.sweeps;
        if (!sub.edges || 2 * sub.edges->size() != a.size()) continue;
        res.edges.clear();
        for (const Edge& e : *sub.edges) res.edges.push_back(make_edge(a[e.u], a[e.v]));
        std::sort(res.edges.begin(), res.edges.end());
        return res;
    }
    throw RandomnessExhausted("matching size never reached rank/2");
}

IndependentMatchingResult independent_matching(const PathMatchingInstance& inst, const SolverConfig& cfg) {
    if (inst.s != 0) throw InvalidInstance("independent matching needs S empty");
    // The matroids may have any rank: the restriction below cuts both down
    // to rank Y.
    inst.validate(false);
    const PrimeField& f = inst.field();
    const Index r = inst.rank(), t1 = inst.t1, t2 = inst.t2;
    IndependentMatchingResult res;
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        Rng rng = attempt_rng(cfg.seed, attempt);
        const ZMatrix zm = assemble_Z(inst, rng);
        // Eliminating D1 and D2 leaves Y = Q1 D1^{-1} X D2^{-1} Q2 (up to sign),
        // so rank Z = t1 + t2 + rank Y.
        std::vector<Scalar> d1(t1), d2(t2);
        for (Index v = 0; v < t1; ++v) d1[v] = zm.z(zm.xrow[v], r + v);
        for (Index k = 0; k < t2; ++k) d2[k] = zm.z(r + k, zm.xcol[t1 + k]);
        f.batch_inv(d1);
        f.batch_inv(d2);
        Matrix left = inst.q1;  // Q1 D1^{-1}
        for (Index i = 0; i < r; ++i)
            for (Index v = 0; v < t1; ++v) left(i, v) = f.mul(left(i, v), d1[v]);
        Matrix right = inst.q2;  // D2^{-1} Q2
        for (Index k = 0; k < t2; ++k)
            for (Index j = 0; j < r; ++j) right(k, j) = f.mul(right(k, j), d2[k]);
        Matrix x(f, t1, t2);
        for (Index v = 0; v < t1; ++v)
            for (Index k = 0; k < t2; ++k) x(v, k) = zm.z(zm.xrow[v], zm.xcol[t1 + k]);
        const Matrix y = mul(mul(left, x, cfg.mul), right, cfg.mul);
        const RankProfile prof = rank_profile(y);
        res.rank_z = t1 + t2 + prof.rank;

        PathMatchingInstance sub(f, t1, t2, 0, prof.rank);
        sub.q1 = inst.q1.submatrix(prof.row_basis, iota(t1));
        sub.q2 = inst.q2.submatrix(iota(t2), prof.col_basis);
        sub.edges = inst.edges;
        SolverConfig inner = cfg;
        inner.seed = rng();
        BpmResult got = solve_bpm(sub, inner);
        res.stats.attempts += got.stats.attempts;
        res.stats.updates += got.stats.updates;
        res.stats.subproblems += got.stats.subproblems;
        if (!got.edges || got.edges->size() != prof.rank) continue;
        res.edges = *got.edges;
        return res;
    }
    throw RandomnessExhausted("independent matching never reached rank Z - t1 - t2");
}

}  // namespace algmatch
