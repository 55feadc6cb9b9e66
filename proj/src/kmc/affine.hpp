#pragma once

#include "kmc/gcm.hpp"
#include "kmc/liealg.hpp"
#include "kmc/module.hpp"
#include "kmc/rational.hpp"
#include "kmc/transport.hpp"

#include <functional>
#include <vector>

namespace kmc {

// Regularized sums over one tower of affine hyperplanes,
//   sum_{n>0} 1/(x + n delta) - 1/(n delta)
// and its mirror with x -> -x. Tail-corrected partial sums; throws on the
// pole lattice.
Cplx psi_plus(Cplx delta, Cplx x, int terms = 10000);
Cplx psi_minus(Cplx delta, Cplx x, int terms = 10000);
Cplx psi_full(Cplx delta, Cplx x, int terms = 10000);

// Scalar coefficient layers of the resummed one form at delta = 1:
//   S(z) = (1/z + psi_full(1, z)) / 2,  T(z) = -z (S(z) + 1) + 1/2.
Cplx form_S(Cplx z);
Cplx form_T(Cplx z);

// Worst deviation, over the samples, of the four functional equations pinning
// S and T up to the stated gauge ambiguity.
struct SystemReport {
    double s_reflect = 0.0;
    double s_shift = 0.0;
    double t_odd = 0.0;
    double t_mix = 0.0;
    bool pass = false;
};

SystemReport functional_system_check(const std::function<Cplx(Cplx)>& s,
                                     const std::function<Cplx(Cplx)>& t,
                                     const std::vector<Cplx>& samples, double tol);

// |pi cot(pi z) - (1/z + psi_plus(1, z) - psi_minus(1, z))|
double cot_identity_residual(Cplx z);

// Same pole sum grouped two sided along the tower through (theta, delta),
// against the closed cotangent form.
double cot_rearrangement_residual(Cplx theta, Cplx dlt, int terms = 10000);

// Value in the extended Cartan subalgebra: finite coroot coordinates plus the
// canonical central and scaling directions.
struct HVec {
    std::vector<Cplx> h;
    Cplx c{0.0, 0.0};
    Cplx d{0.0, 0.0};
};

// Symmetric square layer over the basis (h_1 .. h_l, c).
struct SqVec {
    std::vector<std::vector<Cplx>> q;
};

// Assembled data of the resummed form for an untwisted affine matrix with the
// affine vertex in slot 0: the finite subdiagram, its positive roots with
// coroots and norms, and the grading element B solving the unit pairings
// against every simple root.
struct AffineForm {
    GCM gcm;
    GCM fin;
    int l = 0;
    std::vector<std::vector<int>> roots;
    std::vector<std::vector<Rat>> coroots;
    std::vector<Rat> norms;
    std::vector<Rat> b_h;
    Rat b_c = 0;
    Rat b_d = 0;
};

AffineForm assemble_A_h(const GCM& g);

// Components of the Cartan part over (da_1 .. da_l, ddelta) at the point
// (a, delta); the last entry carries B / delta.
std::vector<HVec> a_h_eval(const AffineForm& f, const std::vector<Cplx>& a, Cplx dlt);

// Single layer for the real root (sum mvec_i alpha_i) + n delta, same
// component layout, no B term.
std::vector<HVec> a_gamma_eval(const AffineForm& f, const std::vector<int>& mvec, int n,
                               const std::vector<Cplx>& a, Cplx dlt);

// Components of the symmetric square part, cotangent weights.
std::vector<SqVec> a_sq_eval(const AffineForm& f, const std::vector<Cplx>& a, Cplx dlt);

// Reflection equivariance across the finite wall, rank one case.
double equi1_residual(const AffineForm& f, Cplx theta, Cplx dlt);

// Layer identities: sign flip of the root against the log derivative
// counterterms, and the unit shift along the tower.
double formA1_residual(const AffineForm& f, int root_index, const std::vector<Cplx>& a, Cplx dlt);
double formA2_residual(const AffineForm& f, int root_index, const std::vector<Cplx>& a, Cplx dlt);

// Chain of layer identities landing on the affine simple root, rank one case.
double s0_chain_residual(const AffineForm& f, Cplx theta, Cplx dlt);

// Worst antisymmetrized cross derivative over the sample points, Richardson
// extrapolated central differences.
double closedness_residual_h(const AffineForm& f, const std::vector<std::vector<Cplx>>& pts);
double closedness_residual_sq(const AffineForm& f, const std::vector<std::vector<Cplx>>& pts);

// Contour extracted residues on a truncated level one module, rank one case,
// against the ladder operators and the half Casimir normalization.
struct AffineResidueReport {
    double err_theta = 0.0;
    double err_zero = 0.0;
    double err_sq = 0.0;
    double err_sq_zero = 0.0;
    double err_full = 0.0;
};

AffineResidueReport residue_check(const AffineForm& f, const IntegrableModule& m,
                                  const RootVectors& rv, Cplx hbar);

}  // namespace kmc
