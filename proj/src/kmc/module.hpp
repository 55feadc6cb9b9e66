#pragma once

#include "kmc/gcm.hpp"
#include "kmc/liealg.hpp"

#include "json.hpp"

#include <vector>

namespace kmc {

// Irreducible integrable highest weight module over exact rationals. For affine
// types the module is truncated at the given depth in the content of the affine
// vertex, which presets place at index 0. Blocks are ordered by (height, lex).
struct IntegrableModule {
    GCM gcm;
    std::vector<int> hw;
    int depth = -1;
    std::vector<std::vector<int>> contents;
    std::vector<int> dims;
    std::vector<int> block_offset;
    int dim = 0;
    std::vector<QMat> e_ops, f_ops;

    int block_of(const std::vector<int>& content) const;
    int block_dim(int b) const { return dims[b]; }
    int block_of_index(int global) const;
    Rat weight_h(int b, int i) const;  // mu(h_i) on the block's weight
    // (mu, alpha) for alpha in the root lattice
    Rat weight_pair_root(int b, const std::vector<int>& alpha) const;
};

IntegrableModule build_irrep(const GCM& g, const std::vector<int>& hw, int depth = -1);

// exp(e_i) exp(-f_i) exp(e_i); requires nilpotent and truncation-exact action.
QMat tits_operator(const IntegrableModule& m, int i);

nlohmann::json module_to_json(const IntegrableModule& m);
IntegrableModule module_from_json(const nlohmann::json& j);

}  // namespace kmc
