#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kmc/gcm.hpp"
#include "kmc/liealg.hpp"
#include "kmc/module.hpp"
#include "kmc/roots.hpp"
#include "kmc/transport.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

using namespace kmc;

namespace {

const Cplx I(0.0, 1.0);
const double PI = 3.14159265358979323846;

double cdist(Cplx a, Cplx b) { return std::abs(a - b); }

double mat_diff(const CMat& a, const CMat& b) { return (a - b).norm(); }

struct Built {
    IntegrableModule mod;
    RootVectors rv;
};

Built make(const std::string& preset, std::vector<int> hw, int cutoff, int depth = -1) {
    auto g = GCM::preset(preset);
    auto slice = generate_positive_roots(g, cutoff);
    return {build_irrep(g, hw, depth), construct_root_vectors(g, slice)};
}

CMat diag_matrix(const std::vector<Cplx>& d) {
    CMat m = CMat::Zero(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (int k = 0; k < m.rows(); ++k) m(k, k) = d[static_cast<size_t>(k)];
    return m;
}

std::vector<Cplx> slot_values(const std::vector<QWeylSlot>& slots, Cplx b) {
    std::vector<Cplx> v;
    for (const auto& s : slots) v.push_back(s.base * std::exp(b * s.weight));
    return v;
}

}  // namespace

TEST_CASE("casimir form assembly and merging") {
    auto [m1, rv1] = make("A1", {1}, 1);
    auto f1 = casimir_form(m1, rv1, Cplx(0.25, 0.0));
    CHECK(f1.rank == 1);
    CHECK(f1.terms.size() == 1);
    CHECK(f1.terms[0].alpha == std::vector<int>{1});
    CHECK(f1.terms[0].op(0, 0) == Rat(0));
    CHECK(f1.terms[0].op(1, 1) == Rat(2));
    CHECK(f1.terms[0].op(0, 1) == Rat(0));
    CHECK(f1.h == Cplx(0.25, 0.0));

    auto [m2, rv2] = make("A2", {1, 1}, 2);
    auto f2 = casimir_form(m2, rv2, Cplx(0.1, 0.0));
    REQUIRE(f2.terms.size() == 3);
    std::vector<std::vector<int>> dirs;
    for (const auto& t : f2.terms) dirs.push_back(t.alpha);
    std::sort(dirs.begin(), dirs.end());
    CHECK(dirs == std::vector<std::vector<int>>{{0, 1}, {1, 0}, {1, 1}});
    for (const auto& t : f2.terms) {
        int idx = rv2.slice.find(t.alpha);
        REQUIRE(idx >= 0);
        CHECK(t.op == casimir_truncated(m2, rv2, idx));
    }

    // a short slice misses the highest root
    auto shallow = construct_root_vectors(m2.gcm, generate_positive_roots(m2.gcm, 1));
    CHECK_THROWS_AS(casimir_form(m2, shallow, Cplx(0.1, 0.0)), std::invalid_argument);

    // mismatched algebras
    CHECK_THROWS_AS(casimir_form(m1, rv2, Cplx(0.1, 0.0)), std::invalid_argument);

    // affine truncation: the delta ladder shares one wall
    auto [ma, rva3] = make("A1aff", {1, 0}, 3, 3);
    auto fa3 = casimir_form(ma, rva3, Cplx(0.1, 0.0));
    CHECK(fa3.terms.size() == 5);

    auto rva4 = construct_root_vectors(ma.gcm, generate_positive_roots(ma.gcm, 4));
    auto fa4 = casimir_form(ma, rva4, Cplx(0.1, 0.0));
    CHECK(fa4.terms.size() == 5);
    int found = -1;
    for (size_t k = 0; k < fa4.terms.size(); ++k)
        if (fa4.terms[k].alpha == std::vector<int>{1, 1}) found = static_cast<int>(k);
    REQUIRE(found >= 0);
    int i_delta = rva4.slice.find({1, 1});
    int i_2delta = rva4.slice.find({2, 2});
    REQUIRE(i_delta >= 0);
    REQUIRE(i_2delta >= 0);
    auto merged = casimir_truncated(ma, rva4, i_delta) + casimir_truncated(ma, rva4, i_2delta);
    CHECK(fa4.terms[static_cast<size_t>(found)].op == merged);
}

TEST_CASE("paths, endpoints and wall certification") {
    auto g = GCM::preset("A2");
    auto x0 = base_point(2);
    CHECK(cdist(x0[0], I) < 1e-15);
    CHECK(cdist(x0[1], I) < 1e-15);

    auto p = braid_generator_path(g, 0);
    REQUIRE(p.segments.size() == 1);
    std::vector<Cplx> z, dz;
    segment_eval(p.segments[0], 0.0, z, dz);
    CHECK(cdist(z[0], I) < 1e-12);
    CHECK(cdist(z[1], I) < 1e-12);
    segment_eval(p.segments[0], 1.0, z, dz);
    CHECK(cdist(z[0], -I) < 1e-12);
    CHECK(cdist(z[1], 2.0 * I) < 1e-12);
    segment_eval(p.segments[0], 0.5, z, dz);
    CHECK(cdist(z[0], Cplx(-1.0, 0.0)) < 1e-12);
    CHECK(cdist(z[1], 1.5 * I) < 1e-12);

    auto [mod, rv] = make("A2", {1, 1}, 2);
    auto form = casimir_form(mod, rv, Cplx(0.1, 0.0));
    double bound = certify_path(form, p);
    CHECK(bound > 0.5);

    PathSpec bad;
    bad.segments.push_back(LineSeg{{I, I}, {-I, I}});
    CHECK_THROWS_AS(certify_path(form, bad), std::runtime_error);
    CHECK_THROWS_AS(transport(form, bad, 1e-8), std::runtime_error);
}

TEST_CASE("transport against closed forms") {
    // abelian loop around the wall
    ConnectionForm scal;
    scal.rank = 1;
    scal.h = Cplx(0.3, 0.0);
    QMat k(1, 1);
    k(0, 0) = 2;
    scal.terms.push_back({{1}, k});
    PathSpec loop;
    loop.segments.push_back(ArcSeg{{Cplx(0, 0)}, {Cplx(0, 0)}, 0, Cplx(0, 0), 1.0, PI / 2,
                                   PI / 2 + 2 * PI});
    auto tr = transport(scal, loop, 1e-12);
    CHECK(tr.steps > 0);
    CHECK(cdist(tr.op(0, 0), std::exp(2.0 * PI * I * 0.3)) < 1e-9);
    CHECK(tr.error_estimate < 1e-8);
    CHECK(tr.path_hash == transport(scal, loop, 1e-12).path_hash);

    // rank 1: diagonal exact solution on V(2)
    auto [m2, rv2] = make("A1", {2}, 1);
    Cplx h(0.1, 0.0);
    auto f2 = casimir_form(m2, rv2, h);
    auto gamma = braid_generator_path(m2.gcm, 0);
    auto t2 = transport(f2, gamma, 1e-12);
    Cplx q = std::exp(I * PI * h);
    CMat exact = diag_matrix({Cplx(1, 0), q * q, q * q});
    CHECK(mat_diff(t2.op, exact) < 1e-9);
    CHECK(mat_diff(t2.op, exact) <= 10.0 * t2.error_estimate + 1e-13);

    // reversal inverts
    auto back = transport(f2, reversed_path(gamma), 1e-12);
    CHECK(mat_diff(back.op * t2.op, CMat::Identity(3, 3)) < 1e-8);

    // concatenation composes right to left
    PathSpec half1, half2, both;
    ArcSeg a1{{Cplx(0, 0)}, {Cplx(0, 0)}, 0, Cplx(0, 0), 1.0, PI / 2, PI};
    ArcSeg a2{{Cplx(0, 0)}, {Cplx(0, 0)}, 0, Cplx(0, 0), 1.0, PI, 3 * PI / 2};
    half1.segments.push_back(a1);
    half2.segments.push_back(a2);
    both.segments.push_back(a1);
    both.segments.push_back(a2);
    auto tb = transport(f2, both, 1e-12);
    auto t1h = transport(f2, half1, 1e-12);
    auto t2h = transport(f2, half2, 1e-12);
    CHECK(mat_diff(tb.op, t2h.op * t1h.op) < 1e-9);
    CHECK(mat_diff(tb.op, t2.op) < 1e-9);
}

TEST_CASE("rank one monodromy matches the local model") {
    for (double him : {0.0, 0.05}) {
        Cplx h(0.1, him);
        Cplx hbar = I * PI * h;
        for (int m = 1; m <= 3; ++m) {
            auto [mod, rv] = make("A1", {m}, 1);
            auto gm = generator_monodromy(mod, rv, 0, h, 1e-10);
            CMat rho = gm.op * gauge_factor(mod, 0, hbar / 2.0, Cplx(0, 0));
            CMat oracle = local_model_matrix(mod, h);
            double d = eigen_multiset_distance(matrix_eigenvalues(rho), matrix_eigenvalues(oracle));
            CHECK(d < 1e-8);
        }
    }
    // h = 0 degenerates to the Tits element on both sides
    auto [mod, rv] = make("A1", {1}, 1);
    auto gm = generator_monodromy(mod, rv, 0, Cplx(0, 0), 1e-10);
    double d = eigen_multiset_distance(matrix_eigenvalues(gm.op),
                                       matrix_eigenvalues(local_model_matrix(mod, Cplx(0, 0))));
    CHECK(d < 1e-9);
    CHECK_THROWS_AS(local_model_matrix(make("A2", {1, 1}, 2).mod, Cplx(0.1, 0)),
                    std::invalid_argument);
}

TEST_CASE("transport is covariant under a change of basis") {
    auto [mod, rv] = make("A1", {2}, 1);
    auto form = casimir_form(mod, rv, Cplx(0.1, 0.0));
    QMat p(3, 3);
    p(0, 0) = 1;
    p(0, 2) = 1;
    p(1, 1) = 2;
    p(2, 2) = 1;
    auto pinv_opt = inverse(p);
    REQUIRE(pinv_opt);
    auto conj = form;
    conj.terms[0].op = *pinv_opt * form.terms[0].op * p;
    auto gamma = braid_generator_path(mod.gcm, 0);
    auto t = transport(form, gamma, 1e-12);
    auto tc = transport(conj, gamma, 1e-12);
    CMat pc = complex_matrix(p), pic = complex_matrix(*pinv_opt);
    CHECK(mat_diff(tc.op, pic * t.op * pc) < 1e-8);
    double d = eigen_multiset_distance(matrix_eigenvalues(t.op), matrix_eigenvalues(tc.op));
    CHECK(d < 1e-8);
}

TEST_CASE("homotopic detours transport equally") {
    auto [mod, rv] = make("A2", {1, 1}, 2);
    auto form = casimir_form(mod, rv, Cplx(0.1, 0.0));
    auto straight = braid_generator_path(mod.gcm, 0);

    double r = 0.66;
    PathSpec detour;
    detour.segments.push_back(LineSeg{{I, I}, {r * I, I}});
    detour.segments.push_back(ArcSeg{{Cplx(0, 0), I}, {Cplx(0, 0), 2.0 * I}, 0, Cplx(0, 0), r,
                                     PI / 2, 3 * PI / 2});
    detour.segments.push_back(LineSeg{{-r * I, 2.0 * I}, {-I, 2.0 * I}});

    auto t1 = transport(form, straight, 1e-10);
    auto t2 = transport(form, detour, 1e-10);
    CHECK(mat_diff(t1.op, t2.op) < 1e-7);
    CHECK(t1.path_hash != t2.path_hash);
}

TEST_CASE("braid relations for corrected generators") {
    {
        auto [mod, rv] = make("A1xA1", {1, 1}, 1);
        auto gens = corrected_braid_generators(mod, rv, Cplx(0.12, 0.0), Cplx(0.3, 0.1),
                                               Cplx(-0.2, 0.0), 1e-10);
        auto checks = braid_relation_check(gens, mod.gcm, 1e-6);
        REQUIRE(checks.size() == 1);
        CHECK(checks[0].order == 2);
        CHECK(checks[0].residual < 1e-8);
        CHECK(checks[0].pass);
    }
    {
        auto [mod, rv] = make("A2", {1, 1}, 2);
        for (auto gauge : {std::pair<Cplx, Cplx>{{0, 0}, {0, 0}},
                           std::pair<Cplx, Cplx>{{0.2, -0.1}, {0.15, 0.0}}}) {
            auto gens =
                corrected_braid_generators(mod, rv, Cplx(0.1, 0.0), gauge.first, gauge.second, 1e-9);
            auto checks = braid_relation_check(gens, mod.gcm, 1e-4);
            REQUIRE(checks.size() == 1);
            CHECK(checks[0].order == 3);
            CHECK(checks[0].residual < 1e-5);
            CHECK(checks[0].pass);
        }
    }
}

TEST_CASE("quantum weyl strings and spectra") {
    auto lens = [](const std::string& preset, std::vector<int> hw, int i) {
        auto g = GCM::preset(preset);
        return string_lengths(build_irrep(g, hw), i);
    };
    CHECK(lens("A1", {3}, 0) == std::vector<int>{4});
    CHECK(lens("A2", {1, 1}, 0) == std::vector<int>{3, 2, 2, 1});
    CHECK(lens("A2", {1, 1}, 1) == std::vector<int>{3, 2, 2, 1});
    CHECK(lens("B2", {0, 1}, 0) == std::vector<int>{3, 1, 1});
    CHECK(lens("B2", {0, 1}, 1) == std::vector<int>{2, 2, 1});

    Cplx q = std::exp(I * PI * 0.1);
    auto g1 = qweyl_string_matrix(1, q);
    CHECK(cdist(g1(0, 0), Cplx(0, 0)) < 1e-15);
    CHECK(cdist(g1(0, 1), Cplx(1, 0)) < 1e-15);
    CHECK(cdist(g1(1, 0), -q) < 1e-15);
    CHECK(cdist(g1(1, 1), Cplx(0, 0)) < 1e-15);

    for (int m = 0; m <= 4; ++m) {
        auto slots = slot_values(qweyl_slots(m, q), Cplx(0, 0));
        double d1 = eigen_multiset_distance(matrix_eigenvalues(qweyl_string_matrix(m, q)), slots);
        CHECK(d1 < 1e-10);
        auto [mod, rv] = make("A1", {m}, 1);
        double d2 = eigen_multiset_distance(
            matrix_eigenvalues(local_model_matrix(mod, Cplx(0.1, 0.0))), slots);
        CHECK(d2 < 1e-10);
    }

    for (int m = 0; m <= 4; ++m) {
        auto [mod, rv] = make("A1", {m}, 1);
        auto rep = quantum_weyl_compare(mod, rv, 0, Cplx(0.1, 0.0), 1e-6);
        CHECK(rep.pass);
        CHECK(rep.residual < 1e-6);
        CHECK(rep.strings == std::vector<int>{m + 1});
        CHECK(std::abs(rep.a) == 0.0);
        if (m <= 2) CHECK(std::abs(rep.b) < 1e-6);
    }

    auto [adj, rva] = make("A2", {1, 1}, 2);
    for (int i = 0; i < 2; ++i) {
        auto rep = quantum_weyl_compare(adj, rva, i, Cplx(0.1, 0.0), 1e-6);
        CHECK(rep.pass);
        CHECK(rep.residual < 1e-6);
        CHECK(rep.strings == std::vector<int>{3, 2, 2, 1});
        CHECK(std::abs(rep.a) == 0.0);
    }
}

TEST_CASE("cocycle ledger and its diagonal evaluation") {
    auto g2 = GCM::preset("G2");
    auto led = cocycle_ledger(g2, {0, 1, 0, 1, 0, 1}, Cplx(0, 0), Cplx(0, 0));
    REQUIRE(led.entries.size() == 6);
    std::vector<std::vector<int>> want = {{1, 0}, {3, 1}, {2, 1}, {3, 2}, {1, 1}, {0, 1}};
    for (size_t k = 0; k < 6; ++k) {
        CHECK(led.entries[k].root == want[k]);
        CHECK(cdist(led.entries[k].value, I) < 1e-15);
        CHECK(led.entries[k].base == static_cast<int>(k % 2));
    }

    auto a2 = GCM::preset("A2");
    CHECK(cocycle_ledger(a2, {}, Cplx(0, 0), Cplx(0, 0)).entries.empty());
    auto s1 = cocycle_ledger(a2, {0}, Cplx(0, 0), Cplx(0, 0));
    REQUIRE(s1.entries.size() == 1);
    CHECK(s1.entries[0].root == std::vector<int>{1, 0});

    // frozen diagonal on the three weight lines of V(2)
    auto m2 = build_irrep(GCM::preset("A1"), {2});
    auto l1 = cocycle_ledger(GCM::preset("A1"), {0}, Cplx(0.3, 0.0), Cplx(0.1, 0.0));
    auto ev = cocycle_evaluate(l1, m2, Cplx(1.0, 0.0));
    CHECK(cdist(ev(0, 0), -std::exp(Cplx(1.0, 0.0))) < 1e-12);
    CHECK(cdist(ev(1, 1), Cplx(1.0, 0.0)) < 1e-12);
    CHECK(cdist(ev(2, 2), -std::exp(Cplx(-0.2, 0.0))) < 1e-12);
    CHECK(cdist(ev(0, 1), Cplx(0, 0)) < 1e-15);

    // reduced word independence after summing over bases
    auto b2 = GCM::preset("B2");
    auto mb = build_irrep(b2, {0, 1});
    auto lw1 = cocycle_ledger(b2, {0, 1, 0, 1}, Cplx(0.1, 0.0), Cplx(-0.05, 0.0));
    auto lw2 = cocycle_ledger(b2, {1, 0, 1, 0}, Cplx(0.1, 0.0), Cplx(-0.05, 0.0));
    CHECK(mat_diff(cocycle_evaluate(lw1, mb, Cplx(0.2, 0.0)),
                   cocycle_evaluate(lw2, mb, Cplx(0.2, 0.0))) < 1e-12);
    auto ma = build_irrep(a2, {1, 1});
    auto la1 = cocycle_ledger(a2, {0, 1, 0}, Cplx(0.07, 0.0), Cplx(0.02, 0.0));
    auto la2 = cocycle_ledger(a2, {1, 0, 1}, Cplx(0.07, 0.0), Cplx(0.02, 0.0));
    CHECK(mat_diff(cocycle_evaluate(la1, ma, Cplx(0.4, 0.0)),
                   cocycle_evaluate(la2, ma, Cplx(0.4, 0.0))) < 1e-12);
}

TEST_CASE("monodromy degenerates to the Tits element as h vanishes") {
    auto [mod, rv] = make("A2", {1, 1}, 2);
    CMat tits_inv = tits_complex(mod, 0).inverse();
    auto d_at = [&](double h) {
        auto gm = generator_monodromy(mod, rv, 0, Cplx(h, 0.0), 1e-10);
        return mat_diff(gm.op, tits_inv);
    };
    double d2 = d_at(1e-2), d3 = d_at(1e-3);
    CHECK(d2 < 0.5);
    CHECK(d3 < d2 / 4.0);
}
