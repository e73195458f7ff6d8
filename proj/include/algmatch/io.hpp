#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "algmatch/matroid.hpp"
#include "algmatch/pathmatch.hpp"

namespace algmatch {

// Line-oriented text formats. '#' starts a comment; blank lines are ignored.
//
//   graph <n>               matroid <r> <n> <p>       bpm <t1> <t2> <s> <p>
//   e <u> <v>               r lines of n residues     Q1 <r> <t1>   + r rows
//                                                     Q2 <t2> <r>   + t2 rows
//                                                     e <x> <y>     x, y in a<i> | b<i> | s<i>
//
// Graph vertices are 0-indexed; self-loops are dropped and repeated edges
// collapsed. Primes in files must be at least 2^16. Every parser throws
// ParseError with the offending line number.

inline constexpr std::uint64_t kMinFilePrime = 1u << 16;

Graph parse_graph(std::istream& in);
Graph parse_graph(std::string_view text);
std::string write_graph(const Graph& g);

/// Columns of the returned r x n matrix are the elements.
Matrix parse_matroid(std::istream& in);
Matrix parse_matroid(std::string_view text);
std::string write_matroid(const Matrix& m);

PathMatchingInstance parse_bpm(std::istream& in);
PathMatchingInstance parse_bpm(std::string_view text);
std::string write_bpm(const PathMatchingInstance& inst);

/// Vertex name in bpm files: a<i> for T1, b<i> for T2, s<i> for S.
std::string vertex_name(const PathMatchingInstance& inst, Index v);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace algmatch
