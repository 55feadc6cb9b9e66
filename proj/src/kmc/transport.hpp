#pragma once

#include "kmc/gcm.hpp"
#include "kmc/liealg.hpp"
#include "kmc/module.hpp"
#include "kmc/rational.hpp"
#include "kmc/roots.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace kmc {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;

// One wall term K dlog(alpha). alpha is a primitive direction in the root
// lattice; K collects every slice root proportional to it.
struct ConnectionTerm {
    std::vector<int> alpha;
    QMat op;
};

struct ConnectionForm {
    int rank = 0;
    Cplx h{0.0, 0.0};
    std::vector<ConnectionTerm> terms;
};

ConnectionForm casimir_form(const IntegrableModule& m, const RootVectors& rv, Cplx h);

// Paths live in the coordinates x_j = alpha_j(x), so a root sum c_j alpha_j
// evaluates to sum c_j x_j along the way. Two segment shapes: fully linear,
// and one coordinate on a circular arc with the rest linear.
struct LineSeg {
    std::vector<Cplx> z0, z1;
};

struct ArcSeg {
    std::vector<Cplx> z0, z1;  // entry `coord` of these is ignored
    int coord = 0;
    Cplx center{0.0, 0.0};
    double radius = 1.0;
    double theta0 = 0.0, theta1 = 0.0;
};

using PathSegment = std::variant<LineSeg, ArcSeg>;

struct PathSpec {
    std::vector<PathSegment> segments;
    std::string label;
};

std::vector<Cplx> base_point(int rank);
void segment_eval(const PathSegment& s, double t, std::vector<Cplx>& z, std::vector<Cplx>& dz);

// x0 -> s_i(x0), the i-th coordinate on the counterclockwise unit semicircle
// above the wall, the others linear.
PathSpec braid_generator_path(const GCM& g, int i);
PathSpec reversed_path(const PathSpec& p);

// Certified lower bound for min |alpha(z)| over the path and all wall
// functionals of the form; throws if it cannot be placed above zero.
double certify_path(const ConnectionForm& form, const PathSpec& p);

struct TransportResult {
    CMat op;
    double error_estimate = 0.0;
    std::uint64_t path_hash = 0;
    int steps = 0;
    int rejected = 0;
};

// Solution operator of G' = (h/2) sum (alpha(z')/alpha(z)) K G along the path.
// Transport over a concatenation composes right to left.
TransportResult transport(const ConnectionForm& form, const PathSpec& p, double tol);

CMat complex_matrix(const QMat& m);
CMat tits_complex(const IntegrableModule& m, int i);

// e^{a h_i + b h_i^2}, diagonal on weight blocks
CMat gauge_factor(const IntegrableModule& m, int i, Cplx a, Cplx b);

// s~_i^{-1} T(gamma_i)
TransportResult generator_monodromy(const IntegrableModule& m, const RootVectors& rv, int i,
                                    Cplx h, double tol);

// Rank-1 local model s~ e^{(hbar/2)(2fe+h)}, hbar = i pi h.
CMat local_model_matrix(const IntegrableModule& m, Cplx h);

// s~_i^{-1} T(gamma_i) e^{a h_i + b h_i^2} for every i
std::vector<TransportResult> corrected_braid_generators(const IntegrableModule& m,
                                                        const RootVectors& rv, Cplx h, Cplx a,
                                                        Cplx b, double tol);

struct BraidCheck {
    int i = 0, j = 0, order = 0;
    double residual = 0.0;
    bool pass = false;
};

// Alternating products of length m_ij for every finite pair.
std::vector<BraidCheck> braid_relation_check(const std::vector<TransportResult>& gens,
                                             const GCM& g, double budget);

std::vector<Cplx> matrix_eigenvalues(const CMat& m);

// Greedy closest pairing; infinity on size mismatch.
double eigen_multiset_distance(std::vector<Cplx> a, std::vector<Cplx> b);

// Lengths of the i-strings of the module, descending.
std::vector<int> string_lengths(const IntegrableModule& m, int i);

// Analytic quantum Weyl spectrum on a string of m+1 states; the value of a
// slot at gauge b is base * exp(b * weight).
struct QWeylSlot {
    Cplx base;
    double weight = 0.0;
};

std::vector<QWeylSlot> qweyl_slots(int m, Cplx q);

// v_k -> (-1)^{m-k} q^{(k+1)(m-k)} v_{m-k}
CMat qweyl_string_matrix(int m, Cplx q);

struct QWeylReport {
    bool pass = false;
    Cplx a{0.0, 0.0}, b{0.0, 0.0};
    double residual = 0.0;
    std::vector<int> strings;
};

// Eigenvalues of s~_i^{-1} T(gamma_i) against the union of the string spectra,
// one global gauge fit (the a part cancels in every eigenvalue, so only b is
// fitted and a is reported as 0).
QWeylReport quantum_weyl_compare(const IntegrableModule& m, const RootVectors& rv, int i, Cplx h,
                                 double tol);

struct CocycleEntry {
    int base = 0;           // simple index i_k of the reduced word
    std::vector<int> root;  // s_{i_1}..s_{i_{k-1}}(alpha_{i_k}) over the simple basis
    Cplx value{0.0, 0.0};   // alpha_{i_k}(x0)
};

struct CocycleData {
    std::vector<CocycleEntry> entries;
    Cplx a{0.0, 0.0}, b{0.0, 0.0};
};

CocycleData cocycle_ledger(const GCM& g, const WeylWord& w, Cplx a, Cplx b);

// Diagonal on weight blocks: product over entries of
// value^{scale (mu, root)} e^{a mu(root^v) + b mu(root^v)^2}, principal logs.
CMat cocycle_evaluate(const CocycleData& c, const IntegrableModule& m, Cplx scale);

}  // namespace kmc
