#pragma once

#include "algmatch/pathmatch.hpp"

namespace algmatch {

/// An instance contracted by a partial path-matching M. Vertices of the new
/// instance are numbered as usual: T1' = (T1 minus ∂1M, then C1), T2' likewise,
/// then S' = S minus the vertices M covers.
struct Contraction {
    PathMatchingInstance instance;
    IndexList to_original;  // new vertex -> vertex of the original instance
    Index paths = 0;        // T1-T2 paths in M
    IndexList boundary1;    // ∂1M
    IndexList boundary2;    // ∂2M
    IndexList c1;           // S ends of the T1-S paths
    IndexList c2;           // S ends of the T2-S paths

    /// Edges of the contracted instance in original vertex numbering.
    EdgeList lift(const EdgeList& m) const;
};

/// Throws IllegalPartial unless M consists of instance edges forming
/// single S-S edges, T1-T2 paths and T_i-S paths with independent ∂iM.
Contraction contract(const PathMatchingInstance& inst, const EdgeList& m);

}  // namespace algmatch
