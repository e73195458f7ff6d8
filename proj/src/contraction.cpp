#include "algmatch/contraction.hpp"

#include <algorithm>
#include <set>

namespace algmatch {

namespace {

// Columns of q represent M; returns a representation of M/d on the remaining
// columns (in ascending order). d must be independent.
Matrix contract_columns(const Matrix& q, const IndexList& d) {
    const PrimeField& f = q.field();
    Matrix a = q;
    std::vector<bool> pivot_row(a.rows(), false);
    for (Index c : d) {
        Index p = a.rows();
        for (Index i = 0; i < a.rows(); ++i)
            if (!pivot_row[i] && !a(i, c).is_zero()) {
                p = i;
                break;
            }
        if (p == a.rows()) throw IllegalPartial("covered T vertices are dependent in their matroid");
        pivot_row[p] = true;
        const Scalar inv = f.inv(a(p, c));
        for (Scalar& x : a.row(p)) x = f.mul(x, inv);
        for (Index i = 0; i < a.rows(); ++i) {
            if (i == p || a(i, c).is_zero()) continue;
            const Scalar s = a(i, c);
            for (Index j = 0; j < a.cols(); ++j) a(i, j) = f.sub(a(i, j), f.mul(s, a(p, j)));
        }
    }
    IndexList rows, cols;
    for (Index i = 0; i < a.rows(); ++i)
        if (!pivot_row[i]) rows.push_back(i);
    std::vector<bool> in_d(a.cols(), false);
    for (Index c : d) in_d[c] = true;
    for (Index j = 0; j < a.cols(); ++j)
        if (!in_d[j]) cols.push_back(j);
    return a.submatrix(rows, cols);
}

// [[a, 0], [0, I_k]].
Matrix direct_sum_free(const Matrix& a, Index k) {
    Matrix out(a.field(), a.rows() + k, a.cols() + k);
    out.set_block(0, 0, a);
    for (Index i = 0; i < k; ++i) out(a.rows() + i, a.cols() + i) = a.field().one();
    return out;
}

}  // namespace

EdgeList Contraction::lift(const EdgeList& m) const {
    EdgeList out;
    for (const Edge& e : m) out.push_back(make_edge(to_original.at(e.u), to_original.at(e.v)));
    std::sort(out.begin(), out.end());
    return out;
}

Contraction contract(const PathMatchingInstance& inst, const EdgeList& m) {
    inst.validate();
    const Index n = inst.order();
    std::vector<std::vector<Index>> adj(n);
    std::set<Edge> seen;
    for (const Edge& e : m) {
        if (!std::binary_search(inst.edges.begin(), inst.edges.end(), e))
            throw IllegalPartial("edge not in the instance");
        if (!seen.insert(e).second) throw IllegalPartial("repeated edge");
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    for (Index v = 0; v < n; ++v)
        if (adj[v].size() > (inst.side(v) == Side::S ? 2u : 1u)) throw IllegalPartial("vertex degree too high");

    Contraction out{PathMatchingInstance(inst.field(), 0, 0, 0, 0), {}, 0, {}, {}, {}, {}};
    std::vector<bool> covered(n, false), done(n, false);
    for (Index v = 0; v < n; ++v) {
        if (done[v] || adj[v].empty()) continue;
        IndexList comp, ends;
        std::vector<Index> stack = {v};
        done[v] = true;
        Index degree_sum = 0;
        while (!stack.empty()) {
            const Index x = stack.back();
            stack.pop_back();
            comp.push_back(x);
            covered[x] = true;
            degree_sum += adj[x].size();
            if (adj[x].size() == 1) ends.push_back(x);
            for (Index y : adj[x])
                if (!done[y]) {
                    done[y] = true;
                    stack.push_back(y);
                }
        }
        if (degree_sum / 2 != comp.size() - 1) throw IllegalPartial("M contains a cycle");
        Index nt1 = 0, nt2 = 0;
        for (Index x : comp) {
            if (inst.side(x) == Side::T1) ++nt1, out.boundary1.push_back(x);
            if (inst.side(x) == Side::T2) ++nt2, out.boundary2.push_back(x - inst.t1);
        }
        const Index s_end = inst.side(ends[0]) == Side::S ? ends[0] : ends[1];
        if (nt1 == 1 && nt2 == 1) {
            ++out.paths;
        } else if (nt1 == 1 && nt2 == 0) {
            out.c1.push_back(s_end);
        } else if (nt1 == 0 && nt2 == 1) {
            out.c2.push_back(s_end);
        } else if (!(nt1 == 0 && nt2 == 0 && comp.size() == 2)) {
            throw IllegalPartial("component is not an S-S edge or a path from T1 or T2");
        }
    }
    std::sort(out.boundary1.begin(), out.boundary1.end());
    std::sort(out.boundary2.begin(), out.boundary2.end());
    std::sort(out.c1.begin(), out.c1.end());
    std::sort(out.c2.begin(), out.c2.end());

    const Matrix q1 = direct_sum_free(contract_columns(inst.q1, out.boundary1), out.c1.size());
    const Matrix q2 = direct_sum_free(contract_columns(inst.q2.transpose(), out.boundary2), out.c2.size()).transpose();

    // New numbering.
    IndexList t1n, t2n, sn;
    for (Index v = 0; v < inst.t1; ++v)
        if (!covered[v]) t1n.push_back(v);
    t1n.insert(t1n.end(), out.c1.begin(), out.c1.end());
    for (Index v = inst.t1; v < inst.t1 + inst.t2; ++v)
        if (!covered[v]) t2n.push_back(v);
    t2n.insert(t2n.end(), out.c2.begin(), out.c2.end());
    for (Index v = inst.t1 + inst.t2; v < n; ++v)
        if (!covered[v]) sn.push_back(v);

    PathMatchingInstance g(inst.field(), t1n.size(), t2n.size(), sn.size(), q1.rows());
    g.q1 = q1;
    g.q2 = q2;
    out.to_original = t1n;
    out.to_original.insert(out.to_original.end(), t2n.begin(), t2n.end());
    out.to_original.insert(out.to_original.end(), sn.begin(), sn.end());
    std::vector<std::int64_t> from(n, -1);
    for (Index i = 0; i < out.to_original.size(); ++i) from[out.to_original[i]] = static_cast<std::int64_t>(i);

    for (const Edge& e : inst.edges) {
        const std::int64_t a = from[e.u], b = from[e.v];
        if (a < 0 || b < 0) continue;
        const Side sa = g.side(a), sb = g.side(b);
        if (sa == sb && sa != Side::S) continue;
        g.add_edge(static_cast<Index>(a), static_cast<Index>(b));
    }
    out.instance = std::move(g);
    return out;
}

}  // namespace algmatch
