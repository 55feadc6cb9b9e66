#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kmc/dcp.hpp"
#include "kmc/gcm.hpp"
#include "kmc/liealg.hpp"
#include "kmc/module.hpp"
#include "kmc/roots.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <vector>

using namespace kmc;

namespace {

double mnorm(const CMat& a) { return a.cwiseAbs().maxCoeff(); }
double mdiff(const CMat& a, const CMat& b) { return mnorm(a - b); }

struct Sys {
    IntegrableModule mod;
    RootVectors rv;
    KSystem ks;
};

Sys make_sys(const std::string& preset, std::vector<int> hw, int cutoff, int depth = -1) {
    auto g = GCM::preset(preset);
    auto slice = generate_positive_roots(g, cutoff);
    auto mod = build_irrep(g, hw, depth);
    auto rv = construct_root_vectors(g, slice);
    auto ks = build_ksystem(mod, rv);
    return {std::move(mod), std::move(rv), std::move(ks)};
}

Sys& sl2_v1() {
    static Sys s = make_sys("A1", {1}, 1);
    return s;
}

Sys& sl2_v2() {
    static Sys s = make_sys("A1", {2}, 1);
    return s;
}

Sys& a2_adjoint() {
    static Sys s = make_sys("A2", {1, 1}, 2);
    return s;
}

Sys& a3_adjoint() {
    static Sys s = make_sys("A3", {1, 0, 1}, 3);
    return s;
}

int root_idx(const KSystem& ks, const std::vector<int>& coeff) {
    for (size_t r = 0; r < ks.roots.size(); ++r)
        if (ks.roots[r] == coeff) return static_cast<int>(r);
    return -1;
}

UPoly upoly_one(size_t vars) { return {{std::vector<int>(vars, 0), Rat(1)}}; }

// independent matrix exponential through an eigendecomposition
CMat eig_exp(const CMat& m) {
    Eigen::ComplexEigenSolver<CMat> es(m);
    CMat v = es.eigenvectors();
    Eigen::VectorXcd lam = es.eigenvalues();
    CMat d = CMat::Zero(m.rows(), m.cols());
    for (int i = 0; i < lam.size(); ++i) d(i, i) = std::exp(lam(i));
    CMat vi = v.inverse();
    return v * d * vi;
}

const std::vector<std::vector<double>> A2_PTS = {{0.40, 0.60}, {0.55, 0.45}, {0.35, 0.65}};
const std::vector<std::vector<double>> A3_PTS = {
    {0.30, 0.35, 0.35}, {0.40, 0.30, 0.30}, {0.34, 0.38, 0.28}};

}  // namespace

TEST_CASE("blowup charts and their coordinates") {
    Diagram d2 = diagram_from_gcm(GCM::preset("A2"));
    BlowupChart c = make_chart(d2, {VSet{0, 1}, VSet{0}});
    REQUIRE(c.members == std::vector<VSet>{{0}, {0, 1}});
    CHECK(c.parent == std::vector<int>{1, -1});
    CHECK(c.owner.at(0) == 0);
    CHECK(c.owner.at(1) == 1);

    // exact inverse pair between the two coordinate systems
    std::vector<Rat> u = {Rat(1, 7), Rat(3, 5)};
    auto a = chart_alpha_from_u_rat(c, 2, u);
    CHECK(a[0] == Rat(3, 35));
    CHECK(a[1] == Rat(18, 35));
    CHECK(chart_u_from_alpha_rat(c, a) == u);

    Diagram d3 = diagram_from_gcm(GCM::preset("A3"));
    BlowupChart c5 = make_chart(d3, {VSet{0, 1, 2}, VSet{0}, VSet{2}});
    REQUIRE(c5.members == std::vector<VSet>{{0}, {2}, {0, 1, 2}});
    CHECK(c5.parent == std::vector<int>{2, 2, -1});
    CHECK(c5.owner.at(0) == 0);
    CHECK(c5.owner.at(2) == 1);
    CHECK(c5.owner.at(1) == 2);
    std::vector<Rat> u5 = {Rat(1, 3), Rat(1, 5), Rat(1, 2)};
    auto a5 = chart_alpha_from_u_rat(c5, 3, u5);
    CHECK(a5[0] == Rat(1, 6));
    CHECK(a5[1] == Rat(7, 30));
    CHECK(a5[2] == Rat(1, 10));
    CHECK(chart_u_from_alpha_rat(c5, a5) == u5);

    // double roundtrip
    BlowupChart c1 = make_chart(d3, {VSet{0, 1, 2}, VSet{0, 1}, VSet{0}});
    std::vector<double> ud = {0.3, 0.45, 0.8};
    auto ad = chart_alpha_from_u(c1, 3, ud);
    auto back = chart_u_from_alpha(c1, ad);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(back[i] - ud[i]) < 1e-14);

    CHECK(chart_pf(c1, {1, 0, 0}) == 0);
    CHECK(chart_pf(c1, {1, 1, 0}) == 1);
    CHECK(chart_pf(c1, {0, 1, 1}) == 2);
    CHECK(chart_pf(c1, {0, 0, 1}) == 2);

    CHECK_THROWS_AS(make_chart(d2, {VSet{0}}), std::invalid_argument);
    CHECK_THROWS_AS(make_chart(d2, {VSet{0}, VSet{1}}), std::invalid_argument);
}

TEST_CASE("chart polynomials") {
    auto& A2 = a2_adjoint();
    Diagram d2 = diagram_from_gcm(A2.ks.gcm);
    BlowupChart c = make_chart(d2, {VSet{0, 1}, VSet{0}});
    auto P = chart_polynomials(A2.ks, c);
    REQUIRE(P.size() == A2.ks.roots.size());
    CHECK(P[root_idx(A2.ks, {1, 0})] == upoly_one(2));
    CHECK(P[root_idx(A2.ks, {1, 1})] == upoly_one(2));
    UPoly p2 = {{{0, 0}, Rat(1)}, {{1, 0}, Rat(-1)}};
    CHECK(P[root_idx(A2.ks, {0, 1})] == p2);

    auto& A3 = a3_adjoint();
    Diagram d3 = diagram_from_gcm(A3.ks.gcm);
    BlowupChart c1 = make_chart(d3, {VSet{0, 1, 2}, VSet{0, 1}, VSet{0}});
    auto P1 = chart_polynomials(A3.ks, c1);
    CHECK(P1[root_idx(A3.ks, {1, 0, 0})] == upoly_one(3));
    CHECK(P1[root_idx(A3.ks, {1, 1, 0})] == upoly_one(3));
    CHECK(P1[root_idx(A3.ks, {1, 1, 1})] == upoly_one(3));
    UPoly q1 = {{{0, 0, 0}, Rat(1)}, {{1, 0, 0}, Rat(-1)}};
    CHECK(P1[root_idx(A3.ks, {0, 1, 0})] == q1);
    UPoly q2 = {{{0, 0, 0}, Rat(1)}, {{0, 1, 0}, Rat(-1)}};
    CHECK(P1[root_idx(A3.ks, {0, 0, 1})] == q2);
    UPoly q3 = {{{0, 0, 0}, Rat(1)}, {{1, 1, 0}, Rat(-1)}};
    CHECK(P1[root_idx(A3.ks, {0, 1, 1})] == q3);

    // a minimal member with no children owns a plain coordinate
    BlowupChart c5 = make_chart(d3, {VSet{0, 1, 2}, VSet{0}, VSet{2}});
    auto P5 = chart_polynomials(A3.ks, c5);
    CHECK(P5[root_idx(A3.ks, {1, 0, 0})] == upoly_one(3));
    CHECK(P5[root_idx(A3.ks, {0, 0, 1})] == upoly_one(3));
    UPoly mid = {{{0, 0, 0}, Rat(1)}, {{1, 0, 0}, Rat(-1)}, {{0, 1, 0}, Rat(-1)}};
    CHECK(P5[root_idx(A3.ks, {0, 1, 0})] == mid);

    // the support expansion over owned simple roots, assembled independently
    {
        std::vector<int> gamma = {0, 1, 1};
        int pg = chart_pf(c1, gamma);
        UPoly rhs;
        for (size_t ci = 0; ci < c1.members.size(); ++ci) {
            int owned = -1;
            for (const auto& [v, m] : c1.owner)
                if (m == static_cast<int>(ci)) owned = v;
            Rat mult(gamma[owned]);
            if (mult == 0) continue;
            if (!std::includes(c1.members[static_cast<size_t>(pg)].begin(),
                               c1.members[static_cast<size_t>(pg)].end(),
                               c1.members[ci].begin(), c1.members[ci].end()))
                continue;
            UPoly chain = upoly_one(c1.members.size());
            for (size_t e = 0; e < c1.members.size(); ++e) {
                if (e == static_cast<size_t>(pg)) continue;
                if (!std::includes(c1.members[e].begin(), c1.members[e].end(),
                                   c1.members[ci].begin(), c1.members[ci].end()))
                    continue;
                if (!std::includes(c1.members[static_cast<size_t>(pg)].begin(),
                                   c1.members[static_cast<size_t>(pg)].end(),
                                   c1.members[e].begin(), c1.members[e].end()))
                    continue;
                std::vector<int> mono(c1.members.size(), 0);
                mono[e] = 1;
                chain = upoly_mul(chain, UPoly{{mono, Rat(1)}});
            }
            std::vector<int> simple(3, 0);
            simple[owned] = 1;
            UPoly term = upoly_mul(chain, P1[root_idx(A3.ks, simple)]);
            for (const auto& [k, v] : term) rhs[k] += mult * v;
        }
        for (auto it = rhs.begin(); it != rhs.end();)
            it = (it->second == 0) ? rhs.erase(it) : std::next(it);
        CHECK(rhs == P1[root_idx(A3.ks, gamma)]);
    }

    // exact evaluation against the defining ratio on every chart
    auto check_ratio = [](const KSystem& ks, const BlowupChart& ch) {
        auto polys = chart_polynomials(ks, ch);
        std::vector<Rat> u;
        const int primes[] = {7, 11, 13, 17, 19};
        for (size_t i = 0; i < ch.members.size(); ++i) u.push_back(Rat(2, primes[i % 5]));
        auto alpha = chart_alpha_from_u_rat(ch, ks.rank, u);
        for (size_t r = 0; r < ks.roots.size(); ++r) {
            Rat aval(0);
            for (int i = 0; i < ks.rank; ++i) aval += Rat(ks.roots[r][static_cast<size_t>(i)]) * alpha[static_cast<size_t>(i)];
            int p = chart_pf(ch, ks.roots[r]);
            Rat xval(0);
            for (int v : ch.members[static_cast<size_t>(p)]) xval += alpha[static_cast<size_t>(v)];
            CHECK(upoly_eval_rat(polys[r], u) * xval == aval);
        }
    };
    for (const auto& mns : enumerate_mns(d2)) check_ratio(A2.ks, make_chart(d2, mns));
    for (const auto& mns : enumerate_mns(d3)) check_ratio(A3.ks, make_chart(d3, mns));
}

TEST_CASE("residue operators and their exact identities") {
    auto run = [](const KSystem& ks, const BlowupChart& c) {
        auto res = chart_residues(ks, c);
        size_t n = c.members.size();
        REQUIRE(res.r_ops.size() == n);
        REQUIRE(res.k_ops.size() == n);

        auto contains = [&](size_t big, size_t small) {
            return std::includes(c.members[big].begin(), c.members[big].end(),
                                 c.members[small].begin(), c.members[small].end());
        };

        // the support sums, recomputed directly
        for (size_t b = 0; b < n; ++b) {
            QMat k = QMat::zero(ks.dim, ks.dim);
            for (size_t r = 0; r < ks.roots.size(); ++r) {
                bool inside = true;
                for (int i = 0; i < ks.rank; ++i)
                    if (ks.roots[r][static_cast<size_t>(i)] != 0 &&
                        !std::binary_search(c.members[b].begin(), c.members[b].end(), i))
                        inside = false;
                if (inside) k = k + ks.ops[r];
            }
            CHECK(k == res.k_ops[b]);
        }

        // fibered residues telescope through the children
        for (size_t b = 0; b < n; ++b) {
            QMat t = res.k_ops[b];
            for (size_t ch = 0; ch < n; ++ch)
                if (c.parent[ch] == static_cast<int>(b)) t = t - res.k_ops[ch];
            CHECK(res.r_ops[b] == t);
        }

        // summing residues over sub-members recovers every truncation
        for (size_t b = 0; b < n; ++b) {
            QMat s = QMat::zero(ks.dim, ks.dim);
            for (size_t ch = 0; ch < n; ++ch)
                if (contains(b, ch)) s = s + res.r_ops[ch];
            CHECK(s == res.k_ops[b]);
        }

        // everything in sight commutes
        for (size_t x = 0; x < n; ++x)
            for (size_t y = 0; y < n; ++y) {
                CHECK(commutator(res.k_ops[x], res.k_ops[y]).is_zero());
                CHECK(commutator(res.r_ops[x], res.r_ops[y]).is_zero());
                CHECK(commutator(res.k_ops[x], res.r_ops[y]).is_zero());
            }

        // exponent bookkeeping behind the two product formulas
        std::vector<Rat> coeff;
        const int nums[] = {3, -2, 5, 1, -4};
        const int dens[] = {7, 5, 9, 3, 11};
        for (size_t b = 0; b < n; ++b) coeff.push_back(Rat(nums[b % 5], dens[b % 5]));
        QMat lhs = QMat::zero(ks.dim, ks.dim);
        for (size_t b = 0; b < n; ++b) lhs = lhs + res.k_ops[b].scaled(coeff[b]);
        QMat rhs = QMat::zero(ks.dim, ks.dim);
        for (size_t b = 0; b < n; ++b) {
            Rat acc(0);
            for (size_t big = 0; big < n; ++big)
                if (contains(big, b)) acc += coeff[big];
            rhs = rhs + res.r_ops[b].scaled(acc);
        }
        CHECK(lhs == rhs);
    };

    auto& A2 = a2_adjoint();
    Diagram d2 = diagram_from_gcm(A2.ks.gcm);
    for (const auto& mns : enumerate_mns(d2)) run(A2.ks, make_chart(d2, mns));

    auto& A3 = a3_adjoint();
    Diagram d3 = diagram_from_gcm(A3.ks.gcm);
    run(A3.ks, make_chart(d3, {VSet{0, 1, 2}, VSet{0, 1}, VSet{0}}));
    run(A3.ks, make_chart(d3, {VSet{0, 1, 2}, VSet{0}, VSet{2}}));

    // the top truncation is the full connection
    BlowupChart c = make_chart(d2, {VSet{0, 1}, VSet{0}});
    auto res = chart_residues(A2.ks, c);
    QMat all = QMat::zero(A2.ks.dim, A2.ks.dim);
    for (const auto& op : A2.ks.ops) all = all + op;
    CHECK(res.k_ops[1] == all);

    // numeric product identity at a positive point
    Cplx h(0.1, 0.0);
    std::vector<double> u = {0.3, 0.7};
    CMat le = CMat::Zero(A2.ks.dim, A2.ks.dim);
    CMat re = CMat::Zero(A2.ks.dim, A2.ks.dim);
    for (size_t b = 0; b < 2; ++b) {
        double x = 1.0;
        for (int cur = static_cast<int>(b); cur >= 0; cur = c.parent[static_cast<size_t>(cur)])
            x *= u[static_cast<size_t>(cur)];
        le += std::log(u[b]) * (0.5 * h) * complex_matrix(res.k_ops[b]);
        re += std::log(x) * (0.5 * h) * complex_matrix(res.r_ops[b]);
    }
    CHECK(mdiff(eig_exp(le), eig_exp(re)) < 1e-10);
}

TEST_CASE("holomorphic part commutes at the walls") {
    auto run = [](const KSystem& ks, const BlowupChart& c) {
        auto polys = chart_polynomials(ks, c);
        auto res = chart_residues(ks, c);
        size_t n = c.members.size();
        const int dens[] = {7, 9, 11, 13, 15};
        for (size_t wall = 0; wall < n; ++wall) {
            std::vector<Rat> u;
            for (size_t b = 0; b < n; ++b)
                u.push_back(b == wall ? Rat(0) : Rat(1, dens[b % 5]));
            for (size_t j = 0; j < n; ++j) {
                if (j == wall) continue;  // the wall kills its own coordinate direction
                QMat m = QMat::zero(ks.dim, ks.dim);
                for (size_t r = 0; r < ks.roots.size(); ++r) {
                    Rat denom = upoly_eval_rat(polys[r], u);
                    REQUIRE(denom != 0);
                    Rat num = upoly_eval_rat(upoly_partial(polys[r], static_cast<int>(j)), u);
                    m = m + ks.ops[r].scaled(num / denom);
                }
                CHECK(commutator(res.k_ops[wall], m).is_zero());
            }
        }
    };

    auto& A2 = a2_adjoint();
    Diagram d2 = diagram_from_gcm(A2.ks.gcm);
    run(A2.ks, make_chart(d2, {VSet{0, 1}, VSet{0}}));

    auto& A3 = a3_adjoint();
    Diagram d3 = diagram_from_gcm(A3.ks.gcm);
    run(A3.ks, make_chart(d3, {VSet{0, 1, 2}, VSet{0, 1}, VSet{0}}));
    run(A3.ks, make_chart(d3, {VSet{0, 1, 2}, VSet{0}, VSet{2}}));
}

TEST_CASE("fundamental solutions in closed form") {
    Diagram d1 = diagram_from_gcm(GCM::preset("A1"));
    BlowupChart c1 = make_chart(d1, {VSet{0}});

    // rank one: the solution is a plain power of the coordinate
    auto& V1 = sl2_v1();
    REQUIRE(V1.ks.ops.size() == 1);
    CHECK(V1.ks.ops[0](0, 0) == Rat(0));
    CHECK(V1.ks.ops[0](1, 1) == Rat(2));
    Cplx h(0.1, 0.0);
    std::vector<double> u1 = {0.3};
    CMat closed = CMat::Zero(2, 2);
    closed(0, 0) = 1.0;
    closed(1, 1) = std::pow(0.3, 0.1);
    CHECK(mdiff(solution_corner(V1.ks, c1, h, u1), closed) < 1e-10);
    CHECK(mdiff(solution_series(V1.ks, c1, h, u1), closed) < 1e-10);

    auto& V2 = sl2_v2();
    CHECK(V2.ks.ops[0](0, 0) == Rat(0));
    CHECK(V2.ks.ops[0](1, 1) == Rat(4));
    CHECK(V2.ks.ops[0](2, 2) == Rat(4));
    Cplx hc(0.1, 0.05);
    Cplx pw = std::exp(2.0 * hc * std::log(Cplx(0.3, 0.0)));
    CMat closed2 = CMat::Zero(3, 3);
    closed2(0, 0) = 1.0;
    closed2(1, 1) = pw;
    closed2(2, 2) = pw;
    CHECK(mdiff(solution_corner(V2.ks, c1, hc, u1), closed2) < 1e-10);
    CHECK(mdiff(solution_series(V2.ks, c1, hc, u1), closed2) < 1e-10);

    // at h = 0 everything collapses to the identity
    auto& A2 = a2_adjoint();
    Diagram d2 = diagram_from_gcm(A2.ks.gcm);
    BlowupChart c2 = make_chart(d2, {VSet{0, 1}, VSet{0}});
    std::vector<double> u2 = {0.2, 0.4};
    CMat id8 = CMat::Identity(8, 8);
    CHECK(mdiff(solution_corner(A2.ks, c2, Cplx(0, 0), u2), id8) < 1e-11);
    CHECK(mdiff(solution_series(A2.ks, c2, Cplx(0, 0), u2), id8) < 1e-12);

    // degree zero keeps only the corner weight
    FundOpts d0;
    d0.degree = 0;
    auto res2 = chart_residues(A2.ks, c2);
    CHECK(mdiff(solution_series(A2.ks, c2, h, u2, d0),
                corner_weight(A2.ks, c2, res2, h, u2)) < 1e-13);

    // two commuting factors, checked against an independent exponential
    auto P = make_sys("A1xA1", {1, 1}, 1);
    Diagram dp = diagram_from_gcm(P.ks.gcm);
    auto mns = enumerate_mns(dp);
    REQUIRE(mns.size() == 1);
    BlowupChart cp = make_chart(dp, mns[0]);
    std::vector<double> up = {0.35, 0.6};
    CMat expo = CMat::Zero(P.ks.dim, P.ks.dim);
    auto resp = chart_residues(P.ks, cp);
    for (size_t b = 0; b < 2; ++b)
        expo += std::log(up[b]) * (0.5 * h) * complex_matrix(resp.k_ops[b]);
    CMat oracle = eig_exp(expo);
    CHECK(mdiff(solution_corner(P.ks, cp, h, up), oracle) < 1e-9);
    CHECK(mdiff(solution_series(P.ks, cp, h, up), oracle) < 1e-9);
}

TEST_CASE("the two solution strategies agree") {
    auto& A2 = a2_adjoint();
    Diagram d2 = diagram_from_gcm(A2.ks.gcm);
    BlowupChart c = make_chart(d2, {VSet{0, 1}, VSet{0}});
    Cplx h(0.1, 0.0);

    // near the corner the default truncation reaches the agreement target
    {
        std::vector<double> u = {0.03, 0.03};
        CMat a = solution_corner(A2.ks, c, h, u);
        CMat b = solution_series(A2.ks, c, h, u);
        CHECK(mdiff(a, b) < 1e-7);
        CMat f = fundamental_solution(A2.ks, c, h, u);
        CHECK(mdiff(f, a) < 1e-12);
    }
    // deeper in the chart the truncation degree has to grow with the distance
    {
        std::vector<double> u = {0.4, 0.55};
        FundOpts deep;
        deep.degree = 10;
        deep.budget = 1e-7;
        CMat a = solution_corner(A2.ks, c, h, u, deep);
        CMat b = solution_series(A2.ks, c, h, u, deep);
        CHECK(mdiff(a, b) < 1e-8);
        CMat f = fundamental_solution(A2.ks, c, h, u, deep);
        CHECK(mdiff(f, a) < 1e-12);
        FundOpts shallow;
        shallow.degree = 4;
        CHECK(mdiff(solution_series(A2.ks, c, h, u, shallow), a) >
              mdiff(solution_series(A2.ks, c, h, u, deep), a));
    }

    FundOpts strict;
    strict.budget = 0.0;
    CHECK_THROWS_AS(fundamental_solution(A2.ks, c, h, {0.1, 0.1}, strict),
                    std::runtime_error);

    // certification refuses points too close to a vanishing polynomial
    CHECK_THROWS_AS(solution_corner(A2.ks, c, h, {0.9, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(solution_series(A2.ks, c, h, {-0.1, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(solution_corner(A2.ks, c, h, {0.1}), std::invalid_argument);
}

TEST_CASE("series truncation scales with h") {
    auto& A2 = a2_adjoint();
    Diagram d2 = diagram_from_gcm(A2.ks.gcm);
    BlowupChart c = make_chart(d2, {VSet{0, 1}, VSet{0}});
    std::vector<double> u = {0.1, 0.1};

    FundOpts low;
    low.degree = 2;
    auto defect = [&](Cplx h) {
        return mdiff(solution_series(A2.ks, c, h, u, low), solution_corner(A2.ks, c, h, u));
    };
    double d1 = defect(Cplx(0.1, 0.0));
    double d2h = defect(Cplx(0.05, 0.0));
    CHECK(d1 > 1e-9);
    CHECK(d1 / d2h > 4.0);
}

TEST_CASE("associators in rank two") {
    auto& A2 = a2_adjoint();
    Diagram d2 = diagram_from_gcm(A2.ks.gcm);
    std::vector<VSet> f = {VSet{0, 1}, VSet{0}};
    std::vector<VSet> g = {VSet{0, 1}, VSet{1}};
    Cplx h(0.1, 0.0);

    auto same = dcp_associator(A2.ks, f, f, h, A2_PTS, 1e-6);
    CHECK(same.pass);
    CHECK(mdiff(same.phi, CMat::Identity(8, 8)) < 1e-12);

    auto fg = dcp_associator(A2.ks, f, g, h, A2_PTS, 1e-6);
    CHECK(fg.pass);
    CHECK(fg.spread < 1e-7);

    std::vector<std::vector<double>> rev(A2_PTS.rbegin(), A2_PTS.rend());
    auto gf = dcp_associator(A2.ks, g, f, h, rev, 1e-6);
    CHECK(mdiff(fg.phi * gf.phi, CMat::Identity(8, 8)) < 1e-7);

    // the associator is a genuine deformation, visibly away from the identity
    double dist1 = mdiff(fg.phi, CMat::Identity(8, 8));
    CHECK(dist1 > 100 * fg.spread);

    auto fg_half = dcp_associator(A2.ks, f, g, Cplx(0.05, 0.0), A2_PTS, 1e-6);
    double dist2 = mdiff(fg_half.phi, CMat::Identity(8, 8));
    CHECK(dist2 < dist1);
    CHECK(std::log2(dist1 / dist2) >= 1.0);

    auto rep = associator_property_suite(A2.ks, h, A2_PTS, 1e-6);
    CHECK(rep.pass);
    CHECK(rep.pairs == 1);
    CHECK(rep.orientation < 1e-6);
    CHECK(rep.leading_slope >= 1.0);

    auto P = make_sys("A1xA1", {1, 1}, 1);
    auto triv = associator_property_suite(P.ks, h, {{0.35, 0.6}, {0.5, 0.4}, {0.3, 0.3}}, 1e-6);
    CHECK(triv.pass);
    CHECK(triv.pairs == 0);
    CHECK(triv.orientation == 0);
    CHECK(triv.transitivity == 0);
}

TEST_CASE("associator property suite in rank three") {
    auto& A3 = a3_adjoint();
    Cplx h(0.1, 0.0);

    auto rep = associator_property_suite(A3.ks, h, A3_PTS, 1e-6);
    CHECK(rep.pass);
    CHECK(rep.pairs == 10);
    CHECK(rep.triples == 60);
    CHECK(rep.elementary == 3);
    CHECK(rep.orientation < 1e-6);
    CHECK(rep.transitivity < 1e-6);
    CHECK(rep.support < 1e-6);
    CHECK(rep.forgetfulness < 1e-6);
    CHECK(rep.central < 1e-6);
    CHECK(rep.leading_slope >= 1.0);

    // a chain of three charts, spelled out
    std::vector<VSet> f1 = {VSet{0, 1, 2}, VSet{0, 1}, VSet{0}};
    std::vector<VSet> f2 = {VSet{0, 1, 2}, VSet{0, 1}, VSet{1}};
    std::vector<VSet> f3 = {VSet{0, 1, 2}, VSet{1, 2}, VSet{1}};
    auto p12 = dcp_associator(A3.ks, f1, f2, h, A3_PTS, 1e-6);
    auto p23 = dcp_associator(A3.ks, f2, f3, h, A3_PTS, 1e-6);
    auto p13 = dcp_associator(A3.ks, f1, f3, h, A3_PTS, 1e-6);
    CHECK(p12.pass);
    CHECK(p23.pass);
    CHECK(p13.pass);
    CHECK(mdiff(p12.phi * p23.phi, p13.phi) < 1e-6);
}

TEST_CASE("subsystem restriction") {
    auto& A3 = a3_adjoint();
    auto sub = restrict_ksystem(A3.ks, {0, 1});
    CHECK(sub.verts == VSet{0, 1});
    REQUIRE(sub.roots.size() == 3);
    for (size_t r = 0; r < sub.roots.size(); ++r) {
        int full = root_idx(A3.ks, sub.roots[r]);
        REQUIRE(full >= 0);
        CHECK(sub.ops[r] == A3.ks.ops[static_cast<size_t>(full)]);
    }
    CHECK(sub.dim == A3.ks.dim);

    auto single = restrict_ksystem(A3.ks, {1});
    CHECK(single.roots.size() == 1);

    // a disconnected pair inside the chain
    auto far = restrict_ksystem(A3.ks, {0, 2});
    CHECK(far.roots.size() == 2);
    auto mns = enumerate_mns(far.diagram);
    CHECK(mns.size() == 1);
    auto rep = associator_property_suite(far, Cplx(0.1, 0.0), A3_PTS, 1e-6);
    CHECK(rep.pass);
    CHECK(rep.pairs == 0);

    // only finite slices make sense here
    auto g = GCM::preset("A1aff");
    auto slice = generate_positive_roots(g, 3);
    auto mod = build_irrep(g, {1, 0}, 3);
    auto rv = construct_root_vectors(g, slice);
    CHECK_THROWS_AS(build_ksystem(mod, rv), std::invalid_argument);
}
