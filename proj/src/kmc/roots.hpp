#pragma once

#include "kmc/gcm.hpp"
#include "kmc/rational.hpp"

#include <utility>
#include <vector>

namespace kmc {

struct Root {
    std::vector<int> c;
    int height = 0;
    bool imaginary = false;
    int mult = 1;
};

// Positive roots of height <= cutoff, ordered by (height, lex).
struct RootSlice {
    GCM gcm;
    int cutoff = 0;
    std::vector<Root> roots;

    int find(const std::vector<int>& c) const;
};

RootSlice generate_positive_roots(const GCM& g, int cutoff);

// Independent enumeration of the real roots in the slice (reflection closure).
std::vector<std::vector<int>> real_roots_by_reflection(const GCM& g, int cutoff);

// s_i applied to a root written over the simple roots.
std::vector<int> reflect_coeff(const GCM& g, int i, const std::vector<int>& c);

// Order of s_i s_j; 0 stands for infinity.
int coxeter_label(const GCM& g, int i, int j);

using WeylWord = std::vector<int>;

struct BraidGraph {
    std::vector<WeylWord> words;
    std::vector<std::pair<int, int>> edges;
};

// All reduced words of the longest element, with braid-move edges.
BraidGraph reduced_expressions_w0(const GCM& g);

bool edge_graph_connected(size_t nverts, const std::vector<std::pair<int, int>>& edges);

struct InversionExponent {
    int base = 0;
    std::vector<int> exponent;
};

// For a reduced word (i_1..i_l): base i_k with exponent s_{i_1}..s_{i_{k-1}}(alpha_{i_k}).
std::vector<InversionExponent> inversion_exponents(const GCM& g, const WeylWord& w);

// Per simple index, the sum of the exponents collected on that base.
std::vector<RatVec> ledger_canonical_form(const GCM& g, const WeylWord& w);

// Partition of the slice into rank-2 planes; every pair of roots lies in exactly one.
std::vector<std::vector<int>> rank2_subsystems(const RootSlice& slice);

}  // namespace kmc
