#include "algmatch/oracles.hpp"

#include <bit>
#include <deque>
#include <functional>
#include <string>

namespace algmatch {

RankOracle::RankOracle(Matrix columns, std::size_t cache_limit) : m_(std::move(columns)), limit_(cache_limit) {}

Index RankOracle::rank(IndexList subset) {
    std::sort(subset.begin(), subset.end());
    if (auto it = memo_.find(subset); it != memo_.end()) return it->second;
    IndexList rows(m_.rows());
    for (Index i = 0; i < rows.size(); ++i) rows[i] = i;
    const Index r = subset.empty() ? 0 : rank_profile(m_.submatrix(rows, subset)).rank;
    if (memo_.size() >= limit_) memo_.clear();
    memo_.emplace(std::move(subset), r);
    return r;
}

// ----------------------------------------------------------- matching

Index oracle_max_matching(const Graph& g) {
    const Index n = g.size();
    if (n > 24) throw TooLarge("matching oracle handles at most 24 vertices");
    if (n == 0) return 0;
    std::vector<std::uint32_t> nbr(n, 0);
    for (const Edge& e : g.edges()) {
        nbr[e.u] |= 1u << e.v;
        nbr[e.v] |= 1u << e.u;
    }
    std::vector<std::int8_t> memo(std::size_t{1} << n, -1);
    // best(mask): maximum matching of G[mask]. The lowest vertex is either
    // left exposed or matched to one of its neighbours in the mask.
    std::function<int(std::uint32_t)> best = [&](std::uint32_t mask) -> int {
        // Vertices without a neighbour in the mask can never be matched.
        std::uint32_t live = 0;
        for (std::uint32_t m = mask; m; m &= m - 1) {
            const int v = std::countr_zero(m);
            if (nbr[v] & mask) live |= 1u << v;
        }
        mask = live;
        if (std::popcount(mask) < 2) return 0;
        if (memo[mask] >= 0) return memo[mask];
        const int v = std::countr_zero(mask);
        const std::uint32_t rest = mask & ~(1u << v);
        const int bound = std::popcount(mask) / 2;
        int b = 0;
        for (std::uint32_t m = nbr[v] & rest; m && b < bound; m &= m - 1) {
            const int u = std::countr_zero(m);
            b = std::max(b, 1 + best(rest & ~(1u << u)));
        }
        if (b < bound) b = std::max(b, best(rest));
        memo[mask] = static_cast<std::int8_t>(b);
        return b;
    };
    return static_cast<Index>(best(static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1)));
}

// ------------------------------------------------------- intersection

IndexList oracle_matroid_intersection(const MatroidPair& pair) {
    pair.validate();
    const Index n = pair.ground();
    RankOracle m1(pair.q1), m2(pair.q2.transpose());
    IndexList j;
    std::vector<bool> in_j(n, false);
    for (;;) {
        auto with = [&](Index add, std::int64_t drop) {
            IndexList s;
            for (Index x : j)
                if (static_cast<std::int64_t>(x) != drop) s.push_back(x);
            s.push_back(add);
            return s;
        };
        // Sources can be added in M1, sinks in M2.
        std::vector<bool> source(n, false), sink(n, false);
        for (Index y = 0; y < n; ++y) {
            if (in_j[y]) continue;
            source[y] = m1.independent(with(y, -1));
            sink[y] = m2.independent(with(y, -1));
        }
        // Arcs x -> y when J - x + y is independent in M1, y -> x when in M2
        // (x in J, y outside).
        std::vector<std::int64_t> parent(n, -1);
        std::vector<bool> seen(n, false);
        std::deque<Index> queue;
        for (Index y = 0; y < n; ++y)
            if (source[y]) {
                seen[y] = true;
                queue.push_back(y);
            }
        std::int64_t end = -1;
        while (!queue.empty() && end < 0) {
            const Index a = queue.front();
            queue.pop_front();
            if (!in_j[a] && sink[a]) {
                end = static_cast<std::int64_t>(a);
                break;
            }
            for (Index b = 0; b < n; ++b) {
                if (seen[b] || in_j[a] == in_j[b]) continue;
                const bool arc = in_j[a] ? m1.independent(with(b, static_cast<std::int64_t>(a)))
                                         : m2.independent(with(a, static_cast<std::int64_t>(b)));
                if (!arc) continue;
                seen[b] = true;
                parent[b] = static_cast<std::int64_t>(a);
                queue.push_back(b);
            }
        }
        if (end < 0) break;
        for (std::int64_t v = end; v >= 0; v = parent[v]) in_j[v] = !in_j[v];
        j.clear();
        for (Index x = 0; x < n; ++x)
            if (in_j[x]) j.push_back(x);
    }
    return j;
}

// ------------------------------------------------------------------ bpm

bool oracle_bpm_exists(const PathMatchingInstance& inst) {
    inst.validate();
    if (inst.s > 8 || inst.t1 > 3 || inst.t2 > 3) throw TooLarge("bpm oracle handles |S| <= 8 and t <= 3");
    const Index n = inst.order(), r = inst.rank();
    std::vector<std::vector<Index>> adj(n);
    for (const Edge& e : inst.edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    RankOracle m1(inst.q1), m2(inst.q2.transpose());

    auto bases = [&](Index t, RankOracle& m) {
        std::vector<IndexList> out;
        for (std::uint32_t mask = 0; mask < (1u << t); ++mask) {
            if (static_cast<Index>(std::popcount(mask)) != r) continue;
            IndexList b;
            for (Index v = 0; v < t; ++v)
                if (mask >> v & 1) b.push_back(v);
            if (m.independent(b)) out.push_back(b);
        }
        return out;
    };
    const Index s0 = inst.t1 + inst.t2;
    auto s_bit = [&](Index v) { return 1u << (v - s0); };

    // Perfect matching of the S vertices in `left`.
    std::function<bool(std::uint32_t)> perfect = [&](std::uint32_t left) -> bool {
        if (left == 0) return true;
        const Index v = s0 + std::countr_zero(left);
        const std::uint32_t rest = left & ~s_bit(v);
        for (Index w : adj[v])
            if (inst.side(w) == Side::S && (rest & s_bit(w)) && perfect(rest & ~s_bit(w))) return true;
        return false;
    };

    for (const IndexList& b1 : bases(inst.t1, m1))
        for (const IndexList& b2 : bases(inst.t2, m2)) {
            std::vector<bool> target(n, false);
            for (Index k : b2) target[inst.t1 + k] = true;
            // Route a path from each vertex of b1, in order, to a fresh vertex
            // of b2 through unused S vertices.
            std::function<bool(Index, std::uint32_t)> route;
            std::function<bool(Index, Index, std::uint32_t)> walk = [&](Index k, Index v, std::uint32_t used) {
                for (Index w : adj[v]) {
                    if (target[w]) {
                        target[w] = false;
                        const bool ok = route(k + 1, used);
                        target[w] = true;
                        if (ok) return true;
                    } else if (inst.side(w) == Side::S && !(used & s_bit(w))) {
                        if (walk(k, w, used | s_bit(w))) return true;
                    }
                }
                return false;
            };
            route = [&](Index k, std::uint32_t used) {
                if (k == b1.size()) return perfect(((1u << inst.s) - 1) & ~used);
                return walk(k, b1[k], used);
            };
            if (route(0, 0)) return true;
        }
    return false;
}

}  // namespace algmatch
