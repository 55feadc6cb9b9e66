#pragma once

#include "kmc/diagram.hpp"
#include "kmc/liealg.hpp"
#include "kmc/module.hpp"
#include "kmc/rational.hpp"
#include "kmc/transport.hpp"

#include <map>
#include <vector>

namespace kmc {

// Positive roots of a finite (sub)system together with their Casimir images
// on one fixed module. Coefficients stay indexed by the ambient labels, so
// restriction to a subdiagram is a plain filter.
struct KSystem {
    GCM gcm;
    int rank = 0;
    VSet verts;
    Diagram diagram;
    std::vector<std::vector<int>> roots;
    std::vector<QMat> ops;
    int dim = 0;
};

KSystem build_ksystem(const IntegrableModule& m, const RootVectors& rv);
KSystem restrict_ksystem(const KSystem& ks, const VSet& b);

// Sparse polynomial in the chart coordinates, exponents indexed by member.
using UPoly = std::map<std::vector<int>, Rat>;

UPoly upoly_mul(const UPoly& a, const UPoly& b);
UPoly upoly_partial(const UPoly& p, int var);
Rat upoly_eval_rat(const UPoly& p, const std::vector<Rat>& u);
double upoly_eval(const UPoly& p, const std::vector<double>& u);

// A maximal nested set with its parent forest and ownership bijection.
// Members are sorted by size then lexicographically, children first.
struct BlowupChart {
    Diagram diagram;
    std::vector<VSet> members;
    std::vector<int> parent;
    std::map<int, int> owner;
};

BlowupChart make_chart(const Diagram& d, const std::vector<VSet>& mns);

// index of the minimal member containing the support
int chart_pf(const BlowupChart& c, const std::vector<int>& coeff);

std::vector<double> chart_u_from_alpha(const BlowupChart& c, const std::vector<double>& alpha);
std::vector<Rat> chart_u_from_alpha_rat(const BlowupChart& c, const std::vector<Rat>& alpha);
std::vector<double> chart_alpha_from_u(const BlowupChart& c, int rank, const std::vector<double>& u);
std::vector<Rat> chart_alpha_from_u_rat(const BlowupChart& c, int rank, const std::vector<Rat>& u);

// the ratio of a root to its owning coordinate, as a polynomial
std::vector<UPoly> chart_polynomials(const KSystem& ks, const BlowupChart& c);

struct ResidueOperators {
    std::vector<QMat> r_ops;
    std::vector<QMat> k_ops;
};

ResidueOperators chart_residues(const KSystem& ks, const BlowupChart& c);

struct FundOpts {
    int degree = 6;          // truncation order of the graded series
    double tol = 1e-10;      // transport tolerance
    double seed = 0.04;      // outermost ray parameter for the corner strategy
    int levels = 3;          // extrapolation levels
    int seed_order = 4;      // ray expansion order kept in the seed
    int seed_terms = 12;     // grading depth summed into the seed
    double s0 = -6.0;        // log ray parameter where the graded run starts
    int steps = 3000;        // fixed integration steps for the graded run
    double pmin = 0.25;      // certification floor for the chart polynomials
    double budget = 1e-6;    // allowed disagreement between the strategies
};

CMat corner_weight(const KSystem& ks, const BlowupChart& c, const ResidueOperators& res,
                   Cplx h, const std::vector<double>& u);
CMat solution_corner(const KSystem& ks, const BlowupChart& c, Cplx h,
                     const std::vector<double>& u, const FundOpts& o = {});
CMat solution_series(const KSystem& ks, const BlowupChart& c, Cplx h,
                     const std::vector<double>& u, const FundOpts& o = {});
CMat fundamental_solution(const KSystem& ks, const BlowupChart& c, Cplx h,
                          const std::vector<double>& u, const FundOpts& o = {});

struct AssocResult {
    CMat phi;
    double spread = 0.0;
    bool pass = false;
};

// normalized solutions compared at shared chamber points, given in the
// simple root coordinates
AssocResult dcp_associator(const KSystem& ks, const std::vector<VSet>& f,
                           const std::vector<VSet>& g, Cplx h,
                           const std::vector<std::vector<double>>& alpha_pts, double tol,
                           const FundOpts& o = {});

struct PropertyReport {
    double orientation = 0.0;
    double transitivity = 0.0;
    double support = 0.0;
    double forgetfulness = 0.0;
    double central = 0.0;
    double leading_slope = 0.0;
    int pairs = 0;
    int triples = 0;
    int elementary = 0;
    bool pass = false;
};

PropertyReport associator_property_suite(const KSystem& ks, Cplx h,
                                         const std::vector<std::vector<double>>& alpha_pts,
                                         double tol, const FundOpts& o = {});

}  // namespace kmc
