#include "kmc/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace kmc {

namespace {

constexpr double PI = 3.14159265358979323846;

std::vector<int> primitive_direction(const std::vector<int>& c) {
    int g = 0;
    for (int x : c) g = std::gcd(g, std::abs(x));
    if (g == 0) throw std::invalid_argument("zero functional");
    std::vector<int> out(c.size());
    for (size_t j = 0; j < c.size(); ++j) out[j] = c[j] / g;
    return out;
}

}  // namespace

ConnectionForm casimir_form(const IntegrableModule& m, const RootVectors& rv, Cplx h) {
    if (m.gcm.a != rv.gcm.a || m.gcm.d != rv.gcm.d)
        throw std::invalid_argument("module and root data disagree");
    if (m.gcm.is_finite()) {
        auto deeper = generate_positive_roots(m.gcm, rv.slice.cutoff + 1);
        if (deeper.roots.size() != rv.slice.roots.size())
            throw std::invalid_argument("slice misses part of the finite root system");
    } else if (m.depth > rv.slice.cutoff) {
        throw std::invalid_argument("slice cutoff below the module depth");
    }
    ConnectionForm f;
    f.rank = m.gcm.n;
    f.h = h;
    for (size_t r = 0; r < rv.slice.roots.size(); ++r) {
        auto dir = primitive_direction(rv.slice.roots[r].c);
        QMat k = casimir_truncated(m, rv, static_cast<int>(r));
        bool merged = false;
        for (auto& t : f.terms) {
            if (t.alpha == dir) {
                t.op = t.op + k;
                merged = true;
                break;
            }
        }
        if (!merged) f.terms.push_back({dir, k});
    }
    return f;
}

std::vector<Cplx> base_point(int rank) { return std::vector<Cplx>(rank, Cplx(0.0, 1.0)); }

void segment_eval(const PathSegment& s, double t, std::vector<Cplx>& z, std::vector<Cplx>& dz) {
    if (const auto* l = std::get_if<LineSeg>(&s)) {
        size_t n = l->z0.size();
        z.resize(n);
        dz.resize(n);
        for (size_t j = 0; j < n; ++j) {
            dz[j] = l->z1[j] - l->z0[j];
            z[j] = l->z0[j] + t * dz[j];
        }
        return;
    }
    const auto& a = std::get<ArcSeg>(s);
    size_t n = a.z0.size();
    z.resize(n);
    dz.resize(n);
    for (size_t j = 0; j < n; ++j) {
        dz[j] = a.z1[j] - a.z0[j];
        z[j] = a.z0[j] + t * dz[j];
    }
    double th = a.theta0 + t * (a.theta1 - a.theta0);
    Cplx e = std::polar(a.radius, th);
    z[static_cast<size_t>(a.coord)] = a.center + e;
    dz[static_cast<size_t>(a.coord)] = Cplx(0.0, a.theta1 - a.theta0) * e;
}

PathSpec braid_generator_path(const GCM& g, int i) {
    if (i < 0 || i >= g.n) throw std::invalid_argument("generator index out of range");
    PathSpec p;
    ArcSeg seg;
    seg.z0.assign(static_cast<size_t>(g.n), Cplx(0.0, 1.0));
    seg.z1.resize(static_cast<size_t>(g.n));
    for (int j = 0; j < g.n; ++j)
        seg.z1[static_cast<size_t>(j)] = Cplx(0.0, 1.0 - static_cast<double>(g.a[i][j]));
    seg.coord = i;
    seg.center = Cplx(0.0, 0.0);
    seg.radius = 1.0;
    seg.theta0 = PI / 2;
    seg.theta1 = 3 * PI / 2;
    p.segments.push_back(seg);
    p.label = "gamma" + std::to_string(i);
    return p;
}

PathSpec reversed_path(const PathSpec& p) {
    PathSpec out;
    out.label = p.label + "~";
    for (auto it = p.segments.rbegin(); it != p.segments.rend(); ++it) {
        if (const auto* l = std::get_if<LineSeg>(&*it)) {
            out.segments.push_back(LineSeg{l->z1, l->z0});
        } else {
            auto a = std::get<ArcSeg>(*it);
            std::swap(a.z0, a.z1);
            std::swap(a.theta0, a.theta1);
            out.segments.push_back(a);
        }
    }
    return out;
}

namespace {

// Max slope of alpha(z(t)) over the segment.
double slope_bound(const PathSegment& s, const std::vector<int>& alpha) {
    if (const auto* l = std::get_if<LineSeg>(&s)) {
        Cplx d(0, 0);
        for (size_t j = 0; j < alpha.size(); ++j)
            d += static_cast<double>(alpha[j]) * (l->z1[j] - l->z0[j]);
        return std::abs(d);
    }
    const auto& a = std::get<ArcSeg>(s);
    Cplx d(0, 0);
    for (size_t j = 0; j < alpha.size(); ++j) {
        if (static_cast<int>(j) == a.coord) continue;
        d += static_cast<double>(alpha[j]) * (a.z1[j] - a.z0[j]);
    }
    double arc = std::abs(static_cast<double>(alpha[static_cast<size_t>(a.coord)])) * a.radius *
                 std::abs(a.theta1 - a.theta0);
    return std::abs(d) + arc;
}

void check_continuity(const PathSpec& p) {
    std::vector<Cplx> z, dz, zp, dzp;
    for (size_t s = 0; s + 1 < p.segments.size(); ++s) {
        segment_eval(p.segments[s], 1.0, z, dz);
        segment_eval(p.segments[s + 1], 0.0, zp, dzp);
        if (z.size() != zp.size()) throw std::invalid_argument("segment dimension mismatch");
        for (size_t j = 0; j < z.size(); ++j)
            if (std::abs(z[j] - zp[j]) > 1e-9) throw std::invalid_argument("discontinuous path");
    }
}

}  // namespace

double certify_path(const ConnectionForm& form, const PathSpec& p) {
    if (p.segments.empty()) throw std::invalid_argument("empty path");
    check_continuity(p);
    const int samples = 256;
    double best = std::numeric_limits<double>::infinity();
    std::vector<Cplx> z, dz;
    for (const auto& seg : p.segments) {
        for (const auto& term : form.terms) {
            double lo = std::numeric_limits<double>::infinity();
            for (int k = 0; k <= samples; ++k) {
                segment_eval(seg, static_cast<double>(k) / samples, z, dz);
                Cplx v(0, 0);
                for (size_t j = 0; j < term.alpha.size(); ++j)
                    v += static_cast<double>(term.alpha[j]) * z[j];
                lo = std::min(lo, std::abs(v));
            }
            double cert = lo - 0.5 * slope_bound(seg, term.alpha) / samples;
            if (cert <= 0.0)
                throw std::runtime_error("path not certified away from the walls");
            best = std::min(best, cert);
        }
    }
    return best;
}

namespace {

struct FormEval {
    const ConnectionForm* form;
    std::vector<CMat> kh;  // (h/2) K per term
    int dim = 0;

    CMat at(const PathSegment& seg, double t) const {
        std::vector<Cplx> z, dz;
        segment_eval(seg, t, z, dz);
        CMat a = CMat::Zero(dim, dim);
        for (size_t q = 0; q < form->terms.size(); ++q) {
            const auto& c = form->terms[q].alpha;
            Cplx v(0, 0), dv(0, 0);
            for (size_t j = 0; j < c.size(); ++j) {
                if (!c[j]) continue;
                v += static_cast<double>(c[j]) * z[j];
                dv += static_cast<double>(c[j]) * dz[j];
            }
            a += (dv / v) * kh[q];
        }
        return a;
    }
};

std::uint64_t fnv_hash(const PathSpec& p) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](const void* ptr, size_t n) {
        const unsigned char* b = static_cast<const unsigned char*>(ptr);
        for (size_t k = 0; k < n; ++k) {
            h ^= b[k];
            h *= 1099511628211ULL;
        }
    };
    auto mixd = [&](double x) { mix(&x, sizeof x); };
    auto mixc = [&](Cplx c) {
        mixd(c.real());
        mixd(c.imag());
    };
    for (const auto& seg : p.segments) {
        if (const auto* l = std::get_if<LineSeg>(&seg)) {
            mix("L", 1);
            for (Cplx c : l->z0) mixc(c);
            for (Cplx c : l->z1) mixc(c);
        } else {
            const auto& a = std::get<ArcSeg>(seg);
            mix("A", 1);
            for (Cplx c : a.z0) mixc(c);
            for (Cplx c : a.z1) mixc(c);
            mix(&a.coord, sizeof a.coord);
            mixc(a.center);
            mixd(a.radius);
            mixd(a.theta0);
            mixd(a.theta1);
        }
    }
    mix(p.label.data(), p.label.size());
    return h;
}

}  // namespace

TransportResult transport(const ConnectionForm& form, const PathSpec& p, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("tolerance must be positive");
    if (form.terms.empty()) throw std::invalid_argument("form has no terms");
    certify_path(form, p);

    FormEval fe;
    fe.form = &form;
    fe.dim = form.terms[0].op.rows;
    for (const auto& t : form.terms) fe.kh.push_back(complex_matrix(t.op) * (0.5 * form.h));

    TransportResult res;
    res.path_hash = fnv_hash(p);
    CMat g = CMat::Identity(fe.dim, fe.dim);
    double est = 0.0;

    // Dormand-Prince 5(4)
    const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    const double a21 = 1.0 / 5;
    const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
    const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
    const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
    const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

    long iters = 0;
    for (const auto& seg : p.segments) {
        double t = 0.0, h = 0.01;
        while (t < 1.0 - 1e-14) {
            if (++iters > 2000000) throw std::runtime_error("transport failed to converge");
            double hs = std::min(h, 1.0 - t);
            CMat k1 = fe.at(seg, t) * g;
            CMat k2 = fe.at(seg, t + c2 * hs) * (g + hs * (a21 * k1));
            CMat k3 = fe.at(seg, t + c3 * hs) * (g + hs * (a31 * k1 + a32 * k2));
            CMat k4 = fe.at(seg, t + c4 * hs) * (g + hs * (a41 * k1 + a42 * k2 + a43 * k3));
            CMat k5 = fe.at(seg, t + c5 * hs) *
                      (g + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            CMat k6 = fe.at(seg, t + hs) *
                      (g + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            CMat y5 = g + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            CMat k7 = fe.at(seg, t + hs) * y5;
            CMat err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double en = err.norm();
            double cap = tol * hs * std::max(1.0, g.norm());
            if (en <= cap) {
                t += hs;
                g = y5;
                est += en;
                ++res.steps;
            } else {
                ++res.rejected;
            }
            double fac = 0.9 * std::pow(cap / std::max(en, 1e-300), 0.2);
            h = hs * std::clamp(fac, 0.2, 5.0);
            if (h < 1e-12) throw std::runtime_error("transport step size underflow");
        }
    }
    res.op = g;
    res.error_estimate = est + static_cast<double>(res.steps) * 1e-15 * std::max(1.0, g.norm());
    return res;
}

CMat complex_matrix(const QMat& m) {
    CMat out(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) out(i, j) = Cplx(m(i, j).get_d(), 0.0);
    return out;
}

CMat tits_complex(const IntegrableModule& m, int i) { return complex_matrix(tits_operator(m, i)); }

CMat gauge_factor(const IntegrableModule& m, int i, Cplx a, Cplx b) {
    if (i < 0 || i >= m.gcm.n) throw std::invalid_argument("generator index out of range");
    CMat out = CMat::Zero(m.dim, m.dim);
    for (size_t blk = 0; blk < m.contents.size(); ++blk) {
        double mu = m.weight_h(static_cast<int>(blk), i).get_d();
        Cplx v = std::exp(a * mu + b * mu * mu);
        for (int l = 0; l < m.dims[blk]; ++l) {
            int idx = m.block_offset[blk] + l;
            out(idx, idx) = v;
        }
    }
    return out;
}

TransportResult generator_monodromy(const IntegrableModule& m, const RootVectors& rv, int i,
                                    Cplx h, double tol) {
    auto form = casimir_form(m, rv, h);
    auto path = braid_generator_path(m.gcm, i);
    auto tr = transport(form, path, tol);
    auto inv = inverse(tits_operator(m, i));
    if (!inv) throw std::runtime_error("tits operator not invertible");
    CMat si = complex_matrix(*inv);
    tr.op = si * tr.op;
    tr.error_estimate *= std::max(1.0, si.norm());
    return tr;
}

CMat local_model_matrix(const IntegrableModule& m, Cplx h) {
    if (m.gcm.n != 1) throw std::invalid_argument("local model needs rank one");
    int top = m.dim - 1;
    Cplx hbar = Cplx(0.0, PI) * h;
    CMat d = CMat::Zero(m.dim, m.dim);
    for (int b = 0; b < static_cast<int>(m.contents.size()); ++b) {
        int k = m.contents[static_cast<size_t>(b)][0];
        double kappa = 2.0 * k * (top - k + 1) + (top - 2.0 * k);
        d(b, b) = std::exp(0.5 * hbar * kappa);
    }
    return tits_complex(m, 0) * d;
}

std::vector<TransportResult> corrected_braid_generators(const IntegrableModule& m,
                                                        const RootVectors& rv, Cplx h, Cplx a,
                                                        Cplx b, double tol) {
    std::vector<TransportResult> out;
    for (int i = 0; i < m.gcm.n; ++i) {
        auto tr = generator_monodromy(m, rv, i, h, tol);
        CMat gf = gauge_factor(m, i, a, b);
        tr.op = tr.op * gf;
        double amp = 0.0;
        for (int k = 0; k < gf.rows(); ++k) amp = std::max(amp, std::abs(gf(k, k)));
        tr.error_estimate *= std::max(1.0, amp);
        out.push_back(std::move(tr));
    }
    return out;
}

std::vector<BraidCheck> braid_relation_check(const std::vector<TransportResult>& gens,
                                             const GCM& g, double budget) {
    if (static_cast<int>(gens.size()) != g.n)
        throw std::invalid_argument("one generator per vertex required");
    std::vector<BraidCheck> out;
    for (int i = 0; i < g.n; ++i) {
        for (int j = i + 1; j < g.n; ++j) {
            int ord = coxeter_label(g, i, j);
            if (ord == 0) continue;
            int dim = static_cast<int>(gens[static_cast<size_t>(i)].op.rows());
            CMat lhs = CMat::Identity(dim, dim), rhs = lhs;
            for (int k = 0; k < ord; ++k) {
                const auto& gl = (k % 2 == 0) ? gens[static_cast<size_t>(i)].op
                                              : gens[static_cast<size_t>(j)].op;
                const auto& gr = (k % 2 == 0) ? gens[static_cast<size_t>(j)].op
                                              : gens[static_cast<size_t>(i)].op;
                lhs = lhs * gl;
                rhs = rhs * gr;
            }
            BraidCheck c;
            c.i = i;
            c.j = j;
            c.order = ord;
            c.residual = (lhs - rhs).norm();
            c.pass = c.residual < budget;
            out.push_back(c);
        }
    }
    return out;
}

std::vector<Cplx> matrix_eigenvalues(const CMat& m) {
    Eigen::ComplexEigenSolver<CMat> es(m, false);
    std::vector<Cplx> out;
    for (int k = 0; k < m.rows(); ++k) out.push_back(es.eigenvalues()(k));
    return out;
}

double eigen_multiset_distance(std::vector<Cplx> a, std::vector<Cplx> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    while (!a.empty()) {
        size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < a.size(); ++i) {
            for (size_t j = 0; j < b.size(); ++j) {
                double d = std::abs(a[i] - b[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        worst = std::max(worst, best);
        a.erase(a.begin() + static_cast<long>(bi));
        b.erase(b.begin() + static_cast<long>(bj));
    }
    return worst;
}

std::vector<int> string_lengths(const IntegrableModule& m, int i) {
    if (i < 0 || i >= m.gcm.n) throw std::invalid_argument("generator index out of range");
    if (!m.gcm.is_finite()) throw std::invalid_argument("string decomposition needs finite type");
    std::vector<int> out;
    long total = 0;
    for (size_t blk = 0; blk < m.contents.size(); ++blk) {
        int db = m.dims[blk];
        int tops = db;
        auto up = m.contents[blk];
        if (up[static_cast<size_t>(i)] > 0) {
            up[static_cast<size_t>(i)] -= 1;
            int tb = m.block_of(up);
            if (tb >= 0) {
                QMat sub(m.dims[static_cast<size_t>(tb)], db);
                for (int r = 0; r < sub.rows; ++r)
                    for (int c = 0; c < sub.cols; ++c)
                        sub(r, c) = m.e_ops[static_cast<size_t>(i)](
                            m.block_offset[static_cast<size_t>(tb)] + r,
                            m.block_offset[blk] + c);
                tops = db - rank(sub);
            }
        }
        if (tops == 0) continue;
        Rat mu = m.weight_h(static_cast<int>(blk), i);
        if (mu.get_den() != 1 || mu < 0)
            throw std::runtime_error("string top with a bad weight");
        int len = static_cast<int>(mu.get_num().get_si()) + 1;
        for (int k = 0; k < tops; ++k) {
            out.push_back(len);
            total += len;
        }
    }
    if (total != m.dim) throw std::runtime_error("string decomposition does not fill the module");
    std::sort(out.rbegin(), out.rend());
    return out;
}

std::vector<QWeylSlot> qweyl_slots(int m, Cplx q) {
    std::vector<QWeylSlot> out;
    Cplx lq = std::log(q);
    for (int k = 0; 2 * k < m; ++k) {
        Cplx base = std::polar(1.0, PI * m / 2.0) * std::exp((k * (m - k) + m / 2.0) * lq);
        double w = static_cast<double>((m - 2 * k) * (m - 2 * k));
        out.push_back({base, w});
        out.push_back({-base, w});
    }
    if (m % 2 == 0) {
        int half = m / 2;
        Cplx base = std::polar(1.0, PI * half) * std::exp(((half + 1.0) * half) * lq);
        out.push_back({base, 0.0});
    }
    return out;
}

CMat qweyl_string_matrix(int m, Cplx q) {
    CMat out = CMat::Zero(m + 1, m + 1);
    Cplx lq = std::log(q);
    for (int k = 0; k <= m; ++k) {
        double sign = ((m - k) % 2 == 0) ? 1.0 : -1.0;
        out(m - k, k) = sign * std::exp(static_cast<double>((k + 1) * (m - k)) * lq);
    }
    return out;
}

QWeylReport quantum_weyl_compare(const IntegrableModule& m, const RootVectors& rv, int i, Cplx h,
                                 double tol) {
    QWeylReport rep;
    rep.strings = string_lengths(m, i);
    double ttol = std::clamp(tol * 1e-4, 1e-12, 1e-8);
    auto gm = generator_monodromy(m, rv, i, h, ttol);
    auto eigs = matrix_eigenvalues(gm.op);

    Cplx q = std::exp(Cplx(0.0, PI) * h);
    std::vector<QWeylSlot> slots;
    for (int len : rep.strings) {
        auto s = qweyl_slots(len - 1, q);
        slots.insert(slots.end(), s.begin(), s.end());
    }

    auto residual_at = [&](Cplx b) {
        std::vector<Cplx> v;
        for (const auto& s : slots) v.push_back(s.base * std::exp(b * s.weight));
        return eigen_multiset_distance(eigs, v);
    };

    std::vector<Cplx> cands{Cplx(0.0, 0.0)};
    for (const auto& s : slots) {
        if (s.weight == 0.0) continue;
        for (const auto& e : eigs) {
            Cplx d = std::log(e) - std::log(s.base);
            for (int wind = -1; wind <= 1; ++wind)
                cands.push_back((d + Cplx(0.0, 2.0 * PI * wind)) / s.weight);
        }
    }
    rep.b = cands[0];
    rep.residual = residual_at(cands[0]);
    for (size_t k = 1; k < cands.size(); ++k) {
        double r = residual_at(cands[k]);
        if (r < rep.residual) {
            rep.residual = r;
            rep.b = cands[k];
        }
    }
    rep.a = Cplx(0.0, 0.0);
    rep.pass = rep.residual < tol;
    return rep;
}

CocycleData cocycle_ledger(const GCM& g, const WeylWord& w, Cplx a, Cplx b) {
    CocycleData out;
    out.a = a;
    out.b = b;
    auto inv = inversion_exponents(g, w);
    for (size_t k = 0; k < inv.size(); ++k) {
        CocycleEntry e;
        e.base = inv[k].base;
        e.root = inv[k].exponent;
        e.value = Cplx(0.0, 1.0);  // alpha_{i_k}(x0) at x0 = i(1,..,1)
        out.entries.push_back(e);
    }
    return out;
}

CMat cocycle_evaluate(const CocycleData& c, const IntegrableModule& m, Cplx scale) {
    CMat out = CMat::Zero(m.dim, m.dim);
    for (size_t blk = 0; blk < m.contents.size(); ++blk) {
        Cplx acc(1.0, 0.0);
        for (const auto& e : c.entries) {
            double pair = m.weight_pair_root(static_cast<int>(blk), e.root).get_d();
            double len2 = m.gcm.form_roots(e.root, e.root).get_d();
            double cov = 2.0 * pair / len2;
            acc *= std::exp(scale * pair * std::log(e.value));
            acc *= std::exp(c.a * cov + c.b * cov * cov);
        }
        for (int l = 0; l < m.dims[blk]; ++l) {
            int idx = m.block_offset[blk] + l;
            out(idx, idx) = acc;
        }
    }
    return out;
}

}  // namespace kmc
