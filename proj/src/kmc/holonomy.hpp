#pragma once

#include "kmc/liealg.hpp"
#include "kmc/module.hpp"
#include "kmc/rational.hpp"

#include "json.hpp"

#include <compare>
#include <map>
#include <string>
#include <vector>

namespace kmc {

// Symbolic layer for the double holonomy algebras t^n. Generators are the
// pairwise Casimir symbols Omega_ij, their root components Omega^{ij}_alpha
// (alpha a slice root, either sign, or the zero-weight slot), and the window
// Casimirs K_{alpha,i}^{(m)} acting on m consecutive strands starting at i.
// K_alpha^{(n)} is the full window (alpha, 1, n) and K_{alpha,k} the single
// strand window (alpha, k, 1). Elements are free words over the generators
// with rational coefficients; no reordering is performed.
struct DHGen {
    enum class Kind { Omega, OmegaAlpha, KWindow };
    Kind kind = Kind::Omega;
    int i = 0, j = 0;      // strand pair for Omega and OmegaAlpha, 1-based, i < j
    int root = -1;         // slice root index; -1 marks the zero-weight slot
    bool neg = false;      // negative root component
    int win_start = 0, win_len = 0;

    auto operator<=>(const DHGen&) const = default;
};

using DHWord = std::vector<DHGen>;

struct DHElement {
    int strands = 0;
    std::map<DHWord, Rat> terms;
};

DHGen omega(int i, int j);
DHGen omega_alpha(int i, int j, int root, bool neg);
DHGen k_window(int root, int start, int len);

// single-generator element with index validation against the strand count
DHElement dh_generator(int n, const DHGen& g);

DHElement dh_add(const DHElement& a, const DHElement& b);
DHElement dh_scale(const DHElement& a, const Rat& s);
DHElement dh_mul(const DHElement& a, const DHElement& b);

// Strand insertion d_n^k for 0 <= k <= n+1: k = 0 prepends a strand, k = n+1
// appends one, and 1 <= k <= n doubles strand k, summing over the lifts of
// every generator index. Strand deletion s_n^k for 1 <= k <= n kills the
// generators touching strand k (an empty window counts as zero) and shifts
// the higher indices down.
DHElement face_map(int n, int k, const DHElement& x);
DHElement degeneracy_map(int n, int k, const DHElement& x);

// I^(s-1) tensor A tensor I^(n-s) on the n-fold tensor power
QMat xi_place(const QMat& a, int strand, int n);

// Evaluation of a generator on the n-fold tensor power of the module, with
// the quantisation weight hbar kept rational so the relation suite is exact.
// Omega_ij evaluates to hbar times the full invariant two-tensor assembled
// over the slice, so the slice must exhaust the support of the module's
// root strings. The zero slot needs the inverse Cartan Gram and is only
// available for finite types.
QMat xi_image(const IntegrableModule& m, const RootVectors& rv, int n, const Rat& hbar,
              const DHGen& g);
QMat xi_image_elt(const IntegrableModule& m, const RootVectors& rv, const Rat& hbar,
                  const DHElement& x);

// Commutation check of every window Casimir against the class sums of the
// rank-2 subsystems, restricted to the columns of the blocks whose height
// stays within the slice cutoff; on those columns the class sum agrees with
// the full one, so a pass is exact. Rank-1 systems report the whole root
// slice as a single class.
struct TTClassReport {
    std::vector<std::vector<int>> roots;
    std::string max_abs;
    bool pass = true;
};

struct TTReport {
    std::vector<TTClassReport> classes;
    bool all_pass = true;
    int checked_columns = 0;
};

TTReport relation_check_tt(const IntegrableModule& m, const RootVectors& rv);
nlohmann::json tt_report_json(const TTReport& rep);

}  // namespace kmc
