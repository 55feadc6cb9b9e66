#pragma once

#include "kmc/gcm.hpp"
#include "kmc/rational.hpp"
#include "kmc/roots.hpp"

#include <map>
#include <vector>

namespace kmc {

// Element of the tensor algebra on the lowering generators, graded by content.
// Words read left to right, the rightmost letter acting first.
struct FreeElt {
    std::vector<int> content;
    std::map<std::vector<int>, Rat> words;
};

// Expansion of the left-normed bracket [[..[x_{s_1}, x_{s_2}], ..], x_{s_k}].
FreeElt bracket_word(int n, const std::vector<int>& seq);

struct IntegrableModule;

struct RootSpaceVectors {
    int mult = 0;
    std::vector<FreeElt> lower_raw;   // bracket monomials spanning the root space
    QMat pairing;                     // invariant form against the mirrored monomials
    std::vector<FreeElt> lower_dual;  // lowering basis dual to the mirrored one
};

struct RootVectors {
    GCM gcm;
    RootSlice slice;
    std::vector<RootSpaceVectors> spaces;
};

// Dual root vector systems for every root in the slice, certified by the
// proportionality [x, y] = (x, y) t_beta evaluated on highest weight lines.
RootVectors construct_root_vectors(const GCM& g, const RootSlice& slice);

QMat module_word_op(const IntegrableModule& m, const FreeElt& x, bool raising);

// Normally ordered truncated Casimir of the chosen root, 2 sum x_{-a}^{(i)} x_a^{(i)}.
QMat casimir_truncated(const IntegrableModule& m, const RootVectors& rv, int root_index);

// Verma module scaffolding shared with the module layer. Blocks are indexed by
// content; the basis of a block is the lex-ordered list of lowering words.
struct VermaBlock {
    std::vector<std::vector<int>> words;
    std::map<std::vector<int>, int> index;
    // e_cols[i][c]: sparse column of the raising generator, rows in the lowered block
    std::vector<std::vector<std::vector<std::pair<int, Rat>>>> e_cols;
    QMat gram;
};

struct VermaContext {
    GCM gcm;
    RatVec hw;
    std::map<std::vector<int>, VermaBlock> blocks;

    VermaContext(const GCM& g, RatVec weights) : gcm(g), hw(std::move(weights)) {}
    const VermaBlock& ensure(const std::vector<int>& content);
};

}  // namespace kmc
