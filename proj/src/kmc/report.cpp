#include "kmc/report.hpp"

#include "kmc/affine.hpp"
#include "kmc/dcp.hpp"
#include "kmc/diagram.hpp"
#include "kmc/holonomy.hpp"
#include "kmc/liealg.hpp"
#include "kmc/roots.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace kmc {

namespace {

constexpr double kPi = 3.14159265358979323846;

const char* kSuiteNames[] = {"roots", "mns",     "flatness", "monodromy",
                             "braid", "cocycle", "dcp",      "affine"};

bool known_suite(const std::string& s) {
    for (const char* n : kSuiteNames)
        if (s == n) return true;
    return false;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void push(Report& r, std::string id, double residual, double tol, bool pass,
          std::string detail = "") {
    r.checks.push_back({std::move(id), residual, tol, pass, std::move(detail)});
}

void push_exact(Report& r, std::string id, bool ok, std::string detail = "") {
    push(r, std::move(id), ok ? 0.0 : 1.0, 0.0, ok, std::move(detail));
}

std::string cfmt(Cplx z) {
    std::ostringstream os;
    os << z.real();
    if (z.imag() != 0.0) {
        if (z.imag() > 0.0) os << "+";
        os << z.imag() << "i";
    }
    return os.str();
}

IntegrableModule config_module(const RunConfig& c, const GCM& g) {
    if (!c.module_file.empty()) {
        std::ifstream in(c.module_file);
        if (!in) throw std::invalid_argument("cannot open module file: " + c.module_file);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const std::exception& e) {
            throw std::invalid_argument(std::string("bad module file: ") + e.what());
        }
        return module_from_json(j);
    }
    return build_irrep(g, c.hw, c.depth);
}

RootVectors module_rv(const IntegrableModule& m) {
    int cutoff = m.gcm.is_finite() ? 50 : std::max(1, m.depth);
    auto slice = generate_positive_roots(m.gcm, cutoff);
    return construct_root_vectors(m.gcm, slice);
}

void suite_roots(const RunConfig& c, Report& r) {
    GCM g = load_gcm(c.gcm);
    int cutoff = g.is_finite() ? 50 : std::max(1, c.depth > 0 ? c.depth : 7);
    auto slice = generate_positive_roots(g, cutoff);
    auto refl = real_roots_by_reflection(g, cutoff);
    std::set<std::vector<int>> a, b;
    for (const auto& rt : slice.roots)
        if (!rt.imaginary) a.insert(rt.c);
    for (const auto& rt : refl) b.insert(rt);
    push_exact(r, "roots.reflection.match", a == b,
               "real=" + std::to_string(a.size()) + " total=" + std::to_string(slice.roots.size()));
    if (g.is_finite()) {
        auto bg = reduced_expressions_w0(g);
        bool ok = !bg.words.empty() && edge_graph_connected(bg.words.size(), bg.edges);
        auto form0 = ledger_canonical_form(g, bg.words[0]);
        for (const auto& w : bg.words)
            if (ledger_canonical_form(g, w) != form0) ok = false;
        std::multiset<std::vector<int>> expo, pos;
        for (const auto& e : inversion_exponents(g, bg.words[0])) expo.insert(e.exponent);
        for (const auto& rt : slice.roots) pos.insert(rt.c);
        if (expo != pos) ok = false;
        push_exact(r, "roots.w0.ledger", ok, "words=" + std::to_string(bg.words.size()));
    }
}

void suite_mns(const RunConfig& c, Report& r) {
    GCM g = load_gcm(c.gcm);
    Diagram d = diagram_from_gcm(g);
    auto list = enumerate_mns(d);
    bool ok = !list.empty();
    for (const auto& f : list)
        if (!is_nested_set(d, f).nested || !is_maximal_nested(d, f)) ok = false;
    std::set<std::vector<VSet>> uniq(list.begin(), list.end());
    ok = ok && uniq.size() == list.size();
    push_exact(r, "mns.family.valid", ok, "count=" + std::to_string(list.size()));
}

void suite_flatness(const RunConfig& c, Report& r) {
    GCM g = load_gcm(c.gcm);
    IntegrableModule m = config_module(c, g);
    if (!m.gcm.is_finite() && m.depth < 1)
        throw std::invalid_argument("flatness on an affine module needs depth >= 1");
    RootVectors rv = module_rv(m);
    auto rep = relation_check_tt(m, rv);
    for (size_t k = 0; k < rep.classes.size(); ++k) {
        const auto& cls = rep.classes[k];
        push(r, "flatness.class." + std::to_string(k), cls.pass ? 0.0 : 1.0, 0.0, cls.pass,
             "roots=" + std::to_string(cls.roots.size()) + " max_abs=" + cls.max_abs);
    }
    push_exact(r, "flatness.all", rep.all_pass,
               "columns=" + std::to_string(rep.checked_columns));
}

struct MonodromyRun {
    std::vector<Cplx> hs;
    std::vector<std::vector<Cplx>> eigs;
    std::vector<double> residuals;
    std::string matrix_payload;
};

MonodromyRun monodromy_run(const RunConfig& c) {
    GCM g = load_gcm(c.gcm);
    IntegrableModule m = config_module(c, g);
    if (m.gcm.n != 1) throw std::invalid_argument("monodromy suite needs a rank one gcm");
    RootVectors rv = module_rv(m);
    MonodromyRun out;
    nlohmann::json mats = nlohmann::json::array();
    for (Cplx h : c.h_values) {
        Cplx hbar = Cplx(0.0, 1.0) * kPi * h;
        auto gm = generator_monodromy(m, rv, 0, h, c.transport_tol);
        CMat rho = gm.op * gauge_factor(m, 0, hbar / 2.0, Cplx(0.0, 0.0));
        CMat local = local_model_matrix(m, h);
        auto ev = matrix_eigenvalues(rho);
        out.hs.push_back(h);
        out.eigs.push_back(ev);
        out.residuals.push_back(eigen_multiset_distance(ev, matrix_eigenvalues(local)));
        nlohmann::json jm = nlohmann::json::array();
        for (int i = 0; i < rho.rows(); ++i)
            for (int j = 0; j < rho.cols(); ++j)
                jm.push_back({rho(i, j).real(), rho(i, j).imag()});
        mats.push_back(jm);
    }
    out.matrix_payload = mats.dump();
    return out;
}

std::string monodromy_csv(const MonodromyRun& run) {
    std::ostringstream os;
    os.precision(17);
    os << "h_re,h_im";
    size_t width = 0;
    for (const auto& ev : run.eigs) width = std::max(width, ev.size());
    for (size_t k = 0; k < width; ++k) os << ",eig" << k << "_re,eig" << k << "_im";
    os << "\n";
    for (size_t row = 0; row < run.hs.size(); ++row) {
        os << run.hs[row].real() << "," << run.hs[row].imag();
        for (const auto& z : run.eigs[row]) os << "," << z.real() << "," << z.imag();
        os << "\n";
    }
    return os.str();
}

void suite_monodromy(const RunConfig& c, Report& r, std::string& matrix_bytes, std::string& csv) {
    auto run = monodromy_run(c);
    for (size_t k = 0; k < run.hs.size(); ++k)
        push(r, "monodromy.local.h" + std::to_string(k), run.residuals[k], c.tol,
             run.residuals[k] < c.tol, "h=" + cfmt(run.hs[k]));
    matrix_bytes += run.matrix_payload;
    if (c.write_csv) csv = monodromy_csv(run);
}

void suite_braid(const RunConfig& c, Report& r) {
    GCM g = load_gcm(c.gcm);
    if (!g.is_finite() || g.n < 2)
        throw std::invalid_argument("braid suite needs a finite gcm of rank at least two");
    IntegrableModule m = config_module(c, g);
    RootVectors rv = module_rv(m);
    std::mt19937 rng(c.seed);
    std::uniform_real_distribution<double> dist(-0.3, 0.3);
    Cplx ga(dist(rng), dist(rng)), gb(dist(rng), dist(rng));
    auto gens = corrected_braid_generators(m, rv, c.h_values.at(0), ga, gb, c.transport_tol);
    auto checks = braid_relation_check(gens, m.gcm, c.tol);
    for (const auto& bc : checks)
        push(r,
             "braid.m" + std::to_string(bc.order) + "." + std::to_string(bc.i) +
                 std::to_string(bc.j),
             bc.residual, c.tol, bc.pass, "gauge a=" + cfmt(ga) + " b=" + cfmt(gb));
}

void suite_cocycle(const RunConfig& c, Report& r) {
    GCM g = load_gcm(c.gcm);
    IntegrableModule m = config_module(c, g);
    if (!m.gcm.is_finite()) throw std::invalid_argument("cocycle suite needs a finite gcm");
    RootVectors rv = module_rv(m);
    for (int i = 0; i < m.gcm.n; ++i) {
        auto rep = quantum_weyl_compare(m, rv, i, c.h_values.at(0), c.tol);
        push(r, "cocycle.qweyl." + std::to_string(i), rep.residual, c.tol, rep.pass,
             "strings=" + std::to_string(rep.strings.size()));
    }
}

void suite_dcp(const RunConfig& c, Report& r) {
    GCM g = load_gcm(c.gcm);
    IntegrableModule m = config_module(c, g);
    if (!m.gcm.is_finite()) throw std::invalid_argument("dcp suite needs a finite gcm");
    RootVectors rv = module_rv(m);
    KSystem ks = build_ksystem(m, rv);
    int n = m.gcm.n;
    std::mt19937 rng(c.seed);
    std::uniform_real_distribution<double> jit(-0.05, 0.05);
    std::vector<std::vector<double>> pts;
    for (int t = 0; t < 3; ++t) {
        std::vector<double> p(n);
        for (int i = 0; i < n; ++i) p[i] = 1.0 / n + jit(rng);
        pts.push_back(p);
    }
    FundOpts o;
    o.degree = c.dcp_degree;
    auto pr = associator_property_suite(ks, c.h_values.at(0), pts, c.tol, o);
    push(r, "dcp.orientation", pr.orientation, c.tol, pr.orientation < c.tol, "");
    push(r, "dcp.transitivity", pr.transitivity, c.tol, pr.transitivity < c.tol, "");
    push(r, "dcp.support", pr.support, c.tol, pr.support < c.tol, "");
    push(r, "dcp.forgetfulness", pr.forgetfulness, c.tol, pr.forgetfulness < c.tol, "");
    push(r, "dcp.central", pr.central, c.tol, pr.central < c.tol, "");
    push(r, "dcp.leading", pr.leading_slope, 1.0, pr.leading_slope >= 1.0,
         "slope in h, one is a lower bound");
    std::ostringstream d;
    d << "pairs=" << pr.pairs << " triples=" << pr.triples << " elementary=" << pr.elementary;
    push_exact(r, "dcp.suite", pr.pass, d.str());
}

std::vector<Cplx> scalar_samples(int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> re(-2.2, 3.2), im(-1.2, 1.2);
    std::vector<Cplx> out;
    while (static_cast<int>(out.size()) < count) {
        Cplx z(re(rng), im(rng));
        bool bad = false;
        for (int k = -3; k <= 4; ++k)
            if (std::abs(z - Cplx(k, 0)) < 0.2) bad = true;
        if (!bad) out.push_back(z);
    }
    return out;
}

std::vector<std::vector<Cplx>> form_samples(const AffineForm& f, int count, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ar(0.25, 0.85), di(0.9, 1.4), em(-0.2, 0.2);
    std::vector<std::vector<Cplx>> out;
    while (static_cast<int>(out.size()) < count) {
        std::vector<Cplx> p;
        for (int i = 0; i < f.l; ++i) p.emplace_back(ar(rng), em(rng));
        Cplx dlt(di(rng), em(rng));
        bool bad = false;
        for (const auto& mv : f.roots) {
            Cplx beta(0.0, 0.0);
            for (int i = 0; i < f.l; ++i) beta += static_cast<double>(mv[i]) * p[i];
            Cplx zr = beta / dlt;
            for (int k = -3; k <= 4; ++k)
                if (std::abs(zr - Cplx(k, 0)) < 0.2) bad = true;
            if (std::abs(beta - dlt) < 0.2) bad = true;
        }
        if (bad) continue;
        p.push_back(dlt);
        out.push_back(p);
    }
    return out;
}

void suite_affine(const RunConfig& c, Report& r) {
    const double ln2 = std::log(2.0), ln3 = std::log(3.0);
    double gold = 0.0;
    gold = std::max(gold, std::abs(psi_plus(1.0, 0.0)));
    gold = std::max(gold, std::abs(psi_full(1.0, 0.5) - (4.0 * ln2 - 2.0)));
    gold = std::max(gold, std::abs(psi_plus(1.0, 0.5) - (2.0 * ln2 - 2.0)));
    gold = std::max(gold, std::abs(psi_minus(1.0, 0.5) - 2.0 * ln2));
    gold = std::max(gold, std::abs(psi_plus(1.0, 1.0) + 1.0));
    gold = std::max(gold, std::abs(psi_plus(1.0, 2.0) + 1.5));
    gold = std::max(gold,
                    std::abs(psi_minus(1.0, 1.0 / 3.0) - (1.5 * ln3 - kPi / (2.0 * std::sqrt(3.0)))));
    push(r, "affine.psi.golden", gold, 1e-10, gold < 1e-10, "");

    auto pts = scalar_samples(100, c.seed);
    auto sys = functional_system_check([](Cplx z) { return form_S(z); },
                                       [](Cplx z) { return form_T(z); }, pts, 1e-10);
    double sysres = std::max({sys.s_reflect, sys.s_shift, sys.t_odd, sys.t_mix});
    push(r, "affine.system", sysres, 1e-10, sys.pass, "points=100");

    double cot = 0.0;
    for (Cplx z : scalar_samples(20, c.seed + 1)) cot = std::max(cot, cot_identity_residual(z));
    push(r, "affine.cot", cot, 1e-9, cot < 1e-9, "points=20");

    AffineForm f1 = assemble_A_h(GCM::preset("A1aff"));
    AffineForm f2 = assemble_A_h(GCM::preset("A2aff"));
    double rear = 0.0;
    for (const auto& p : form_samples(f1, 10, c.seed + 2))
        rear = std::max(rear, cot_rearrangement_residual(p[0], p[1]));
    push(r, "affine.cot.rearranged", rear, 1e-9, rear < 1e-9, "points=10");

    bool bexact = f1.b_h == std::vector<Rat>{Rat(1, 2)} && f1.b_c == 0 && f1.b_d == 2 &&
                  f2.b_h == std::vector<Rat>{Rat(1), Rat(1)} && f2.b_c == 0 && f2.b_d == 3;
    push_exact(r, "affine.B.exact", bexact, "grading element against unit pairings");

    auto cpts1 = form_samples(f1, 20, c.seed + 3);
    auto cpts2 = form_samples(f2, 20, c.seed + 4);
    double ch = std::max(closedness_residual_h(f1, cpts1), closedness_residual_h(f2, cpts2));
    push(r, "affine.closed.h", ch, 1e-8, ch < 1e-8, "points=20 per form");
    std::vector<std::vector<Cplx>> cpts2s(cpts2.begin(), cpts2.begin() + 8);
    double cs = std::max(closedness_residual_sq(f1, cpts1), closedness_residual_sq(f2, cpts2s));
    push(r, "affine.closed.sq", cs, 1e-8, cs < 1e-8, "");

    double eq = 0.0;
    for (const auto& p : form_samples(f1, 5, c.seed + 5)) {
        eq = std::max(eq, equi1_residual(f1, p[0], p[1]));
        eq = std::max(eq, s0_chain_residual(f1, p[0], p[1]));
        eq = std::max(eq, formA1_residual(f1, 0, {p[0]}, p[1]));
        eq = std::max(eq, formA2_residual(f1, 0, {p[0]}, p[1]));
    }
    for (const auto& p : form_samples(f2, 5, c.seed + 6)) {
        std::vector<Cplx> a = {p[0], p[1]};
        for (size_t k = 0; k < f2.roots.size(); ++k) {
            eq = std::max(eq, formA1_residual(f2, static_cast<int>(k), a, p[2]));
            eq = std::max(eq, formA2_residual(f2, static_cast<int>(k), a, p[2]));
        }
    }
    push(r, "affine.equivariance", eq, 1e-9, eq < 1e-9, "reflection identities at sampled points");

    GCM g = GCM::preset("A1aff");
    auto m = build_irrep(g, {1, 0}, 3);
    auto slice = generate_positive_roots(g, 3);
    auto rv = construct_root_vectors(g, slice);
    auto rr = residue_check(f1, m, rv, Cplx(1.0, 0.0));
    double rreal = std::max(rr.err_theta, rr.err_zero);
    push(r, "affine.residue.walls", rreal, 1e-10, rreal < 1e-10,
         "half ladder plus half coroot at both walls");
    double rsq = std::max({rr.err_sq, rr.err_sq_zero, rr.err_full});
    push(r, "affine.residue.sq", rsq, 1e-9, rsq < 1e-9,
         "square layer; the full Casimir variant adds the half h square term");

    QMat k1 = casimir_truncated(m, rv, slice.find({0, 1}));
    QMat k0 = casimir_truncated(m, rv, slice.find({1, 0}));
    bool anchors = k1 == (m.f_ops[1] * m.e_ops[1]).scaled(Rat(2)) &&
                   k0 == (m.f_ops[0] * m.e_ops[0]).scaled(Rat(2));
    push_exact(r, "affine.anchor.exact", anchors, "wall operators equal twice f e");
}

}  // namespace

void validate_config(const RunConfig& c) {
    if (!(c.tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (!(c.transport_tol > 0.0)) throw std::invalid_argument("transport tol must be positive");
    if (c.dcp_degree < 1) throw std::invalid_argument("dcp degree must be at least one");
    if (c.h_values.empty()) throw std::invalid_argument("at least one h value is required");
    if (c.hw.empty()) throw std::invalid_argument("highest weight must be nonempty");
    for (const auto& s : c.suites)
        if (!known_suite(s)) throw std::invalid_argument("unknown suite: " + s);
}

Cplx parse_complex(const std::string& s) {
    std::string t;
    for (char ch : s)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    if (t.empty()) throw std::invalid_argument("empty complex literal");
    auto num = [&s](std::string u) -> double {
        if (u == "+" || u == "-" || u.empty()) u += "1";
        size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(u, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad complex literal: " + s);
        }
        if (pos != u.size()) throw std::invalid_argument("bad complex literal: " + s);
        return v;
    };
    size_t split = std::string::npos;
    for (size_t k = 1; k < t.size(); ++k)
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') split = k;
    if (split == std::string::npos) {
        if (t.back() == 'i' || t.back() == 'I') return Cplx(0.0, num(t.substr(0, t.size() - 1)));
        return Cplx(num(t), 0.0);
    }
    std::string a = t.substr(0, split), b = t.substr(split);
    if (b.back() != 'i' && b.back() != 'I')
        throw std::invalid_argument("imaginary part must end in i: " + s);
    b.pop_back();
    return Cplx(num(a), num(b));
}

nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["gcm"] = c.gcm;
    j["hw"] = c.hw;
    j["depth"] = c.depth;
    j["module_file"] = c.module_file;
    nlohmann::json hs = nlohmann::json::array();
    for (Cplx h : c.h_values) hs.push_back({h.real(), h.imag()});
    j["h_values"] = hs;
    j["tol"] = c.tol;
    j["transport_tol"] = c.transport_tol;
    j["dcp_degree"] = c.dcp_degree;
    j["seed"] = c.seed;
    j["suites"] = c.suites;
    j["output_dir"] = c.output_dir;
    j["write_csv"] = c.write_csv;
    return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    if (j.contains("gcm")) c.gcm = j.at("gcm").get<std::string>();
    if (j.contains("hw")) c.hw = j.at("hw").get<std::vector<int>>();
    if (j.contains("depth")) c.depth = j.at("depth").get<int>();
    if (j.contains("module_file")) c.module_file = j.at("module_file").get<std::string>();
    if (j.contains("h_values")) {
        c.h_values.clear();
        for (const auto& e : j.at("h_values")) {
            if (e.is_string())
                c.h_values.push_back(parse_complex(e.get<std::string>()));
            else if (e.is_array())
                c.h_values.push_back(Cplx(e.at(0).get<double>(), e.at(1).get<double>()));
            else
                c.h_values.push_back(Cplx(e.get<double>(), 0.0));
        }
    }
    if (j.contains("tol")) c.tol = j.at("tol").get<double>();
    if (j.contains("transport_tol")) c.transport_tol = j.at("transport_tol").get<double>();
    if (j.contains("dcp_degree")) c.dcp_degree = j.at("dcp_degree").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<unsigned>();
    if (j.contains("suites")) c.suites = j.at("suites").get<std::vector<std::string>>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("write_csv")) c.write_csv = j.at("write_csv").get<bool>();
    return c;
}

GCM load_gcm(const std::string& source) {
    bool pathlike = source.find('/') != std::string::npos ||
                    (source.size() > 5 && source.compare(source.size() - 5, 5, ".json") == 0);
    if (!pathlike) return GCM::preset(source);
    std::ifstream in(source);
    if (!in) throw std::invalid_argument("cannot open gcm file: " + source);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("bad gcm file: ") + e.what());
    }
    if (!j.contains("rows")) throw std::invalid_argument("gcm file needs a rows field");
    return GCM::from_matrix(j.at("rows").get<std::vector<std::vector<int>>>());
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

std::string environment_fingerprint() {
    std::ostringstream os;
#if defined(__clang__)
    os << "clang " << __clang_major__ << "." << __clang_minor__;
#elif defined(__GNUC__)
    os << "gcc " << __GNUC__ << "." << __GNUC_MINOR__;
#else
    os << "unknown compiler";
#endif
    os << ", eigen " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
       << EIGEN_MINOR_VERSION;
#if defined(__linux__)
    os << ", linux";
#elif defined(__APPLE__)
    os << ", darwin";
#endif
    os << ", " << 8 * sizeof(void*) << " bit";
    return os.str();
}

Report run_suite(const RunConfig& c) {
    validate_config(c);
    Report r;
    for (size_t i = 0; i < c.suites.size(); ++i) {
        if (i) r.suites += ",";
        r.suites += c.suites[i];
    }
    r.environment = environment_fingerprint();
    r.config_hash = hex64(fnv1a(config_to_json(c).dump()));
    std::string matrix_bytes, csv;
    for (const auto& s : c.suites) {
        if (s == "roots")
            suite_roots(c, r);
        else if (s == "mns")
            suite_mns(c, r);
        else if (s == "flatness")
            suite_flatness(c, r);
        else if (s == "monodromy")
            suite_monodromy(c, r, matrix_bytes, csv);
        else if (s == "braid")
            suite_braid(c, r);
        else if (s == "cocycle")
            suite_cocycle(c, r);
        else if (s == "dcp")
            suite_dcp(c, r);
        else if (s == "affine")
            suite_affine(c, r);
    }
    r.matrix_hash = hex64(fnv1a(matrix_bytes));
    r.pass = std::all_of(r.checks.begin(), r.checks.end(),
                         [](const CheckRecord& ck) { return ck.pass; });
    std::time_t tt = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tmv{};
    gmtime_r(&tt, &tmv);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tmv);
    r.timestamp = buf;
    if (!c.output_dir.empty()) {
        std::filesystem::create_directories(c.output_dir);
        std::ofstream out(std::filesystem::path(c.output_dir) / "report.json");
        if (!out) throw std::invalid_argument("cannot write into " + c.output_dir);
        out << report_to_json(r).dump(2) << "\n";
        if (!matrix_bytes.empty()) {
            std::ofstream mf(std::filesystem::path(c.output_dir) / "matrices.json");
            mf << matrix_bytes << "\n";
        }
        if (!csv.empty()) {
            std::ofstream cf(std::filesystem::path(c.output_dir) / "trajectories.csv");
            cf << csv;
        }
    }
    return r;
}

nlohmann::json report_to_json(const Report& r) {
    nlohmann::json j;
    j["schema"] = r.schema;
    j["suites"] = r.suites;
    j["environment"] = r.environment;
    j["config_hash"] = r.config_hash;
    j["matrix_hash"] = r.matrix_hash;
    j["timestamp"] = r.timestamp;
    j["pass"] = r.pass;
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& ck : r.checks) {
        nlohmann::json e;
        e["id"] = ck.id;
        e["residual"] = ck.residual;
        e["tol"] = ck.tol;
        e["pass"] = ck.pass;
        e["detail"] = ck.detail;
        cs.push_back(e);
    }
    j["checks"] = cs;
    return j;
}

std::string eigenvalue_trajectory_csv(const RunConfig& c) {
    validate_config(c);
    return monodromy_csv(monodromy_run(c));
}

}  // namespace kmc
