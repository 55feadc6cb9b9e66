#pragma once

#include "kmc/rational.hpp"

#include <string>
#include <vector>

namespace kmc {

// Symmetrizable generalized Cartan matrix with minimal integral symmetrizer.
// Convention: a[i][j] = alpha_j(h_i), so s_i(alpha_j) = alpha_j - a[i][j] alpha_i
// and (alpha_i, alpha_j) = d_i a[i][j].
struct GCM {
    enum class Kind { Finite, Affine, Indefinite };

    int n = 0;
    std::vector<std::vector<int>> a;
    std::vector<Rat> d;
    Kind kind = Kind::Finite;

    static GCM from_matrix(std::vector<std::vector<int>> rows);
    static GCM preset(const std::string& name);

    bool is_finite() const { return kind == Kind::Finite; }
    bool is_affine() const { return kind == Kind::Affine; }

    // (sum b_i alpha_i, sum c_j alpha_j)
    Rat form_roots(const std::vector<int>& b, const std::vector<int>& c) const;
};

}  // namespace kmc
