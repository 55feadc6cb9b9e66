#include "kmc/dcp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

namespace kmc {

namespace {

bool same_gcm(const GCM& x, const GCM& y) { return x.n == y.n && x.a == y.a && x.d == y.d; }

bool vset_includes(const VSet& big, const VSet& small) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

VSet coeff_support(const std::vector<int>& coeff) {
    VSet s;
    for (size_t i = 0; i < coeff.size(); ++i)
        if (coeff[i] != 0) s.push_back(static_cast<int>(i));
    return s;
}

void upoly_trim(UPoly& p) {
    for (auto it = p.begin(); it != p.end();)
        it = (it->second == 0) ? p.erase(it) : std::next(it);
}

UPoly upoly_mul_trunc(const UPoly& a, const UPoly& b, int dmax) {
    UPoly out;
    for (const auto& [ka, va] : a)
        for (const auto& [kb, vb] : b) {
            std::vector<int> k(ka.size());
            int deg = 0;
            for (size_t i = 0; i < k.size(); ++i) {
                k[i] = ka[i] + kb[i];
                deg += k[i];
            }
            if (dmax >= 0 && deg > dmax) continue;
            out[k] += va * vb;
        }
    upoly_trim(out);
    return out;
}

int owned_vertex(const BlowupChart& c, size_t member) {
    for (const auto& [v, m] : c.owner)
        if (m == static_cast<int>(member)) return v;
    throw std::runtime_error("chart ownership map is incomplete");
}

template <typename T>
std::vector<T> x_values(const BlowupChart& c, const std::vector<T>& u) {
    std::vector<T> x(c.members.size());
    for (size_t b = 0; b < c.members.size(); ++b) {
        T v = u[b];
        for (int cur = c.parent[b]; cur >= 0; cur = c.parent[static_cast<size_t>(cur)])
            v = v * u[static_cast<size_t>(cur)];
        x[b] = v;
    }
    return x;
}

template <typename T>
std::vector<T> alpha_from_u_impl(const BlowupChart& c, int rank, const std::vector<T>& u) {
    if (u.size() != c.members.size())
        throw std::invalid_argument("coordinate vector does not match the chart");
    auto x = x_values(c, u);
    std::vector<T> a(static_cast<size_t>(rank), T(0));
    for (size_t b = 0; b < c.members.size(); ++b) {
        T v = x[b];
        for (size_t ch = 0; ch < c.members.size(); ++ch)
            if (c.parent[ch] == static_cast<int>(b)) v = v - x[ch];
        int vert = owned_vertex(c, b);
        if (vert < 0 || vert >= rank) throw std::invalid_argument("rank too small for the chart");
        a[static_cast<size_t>(vert)] = v;
    }
    return a;
}

template <typename T>
std::vector<T> u_from_alpha_impl(const BlowupChart& c, const std::vector<T>& alpha) {
    std::vector<T> x(c.members.size(), T(0));
    for (size_t b = 0; b < c.members.size(); ++b)
        for (int v : c.members[b]) {
            if (v < 0 || static_cast<size_t>(v) >= alpha.size())
                throw std::invalid_argument("point does not cover the chart labels");
            x[b] = x[b] + alpha[static_cast<size_t>(v)];
        }
    std::vector<T> u(c.members.size());
    for (size_t b = 0; b < c.members.size(); ++b) {
        if (c.parent[b] < 0) {
            u[b] = x[b];
            continue;
        }
        const T& px = x[static_cast<size_t>(c.parent[b])];
        if (px == T(0)) throw std::invalid_argument("point lies on a coordinate wall");
        u[b] = x[b] / px;
    }
    return u;
}

CMat cmat_exp(CMat m) {
    double nrm = m.cwiseAbs().rowwise().sum().maxCoeff();
    int sq = 0;
    while (nrm > 0.5 && sq < 64) {
        m *= 0.5;
        nrm *= 0.5;
        ++sq;
    }
    CMat sum = CMat::Identity(m.rows(), m.cols());
    CMat term = sum;
    for (int k = 1; k <= 32; ++k) {
        term = (term * m) / static_cast<double>(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    for (; sq > 0; --sq) sum = sum * sum;
    return sum;
}

double mnorm(const CMat& a) { return a.cwiseAbs().maxCoeff(); }

// everything a ray from the corner to a target needs
struct RayCtx {
    std::vector<UPoly> polys;
    std::vector<UPoly> eulers;
    std::vector<CMat> kroot;
    CMat ktot;
    std::vector<CMat> nd;  // per ray degree, from the expanded log derivatives
};

UPoly upoly_euler(const UPoly& p) {
    UPoly out;
    for (const auto& [k, v] : p) {
        int deg = 0;
        for (int e : k) deg += e;
        if (deg > 0) out[k] = v * deg;
    }
    return out;
}

RayCtx make_ray(const KSystem& ks, const BlowupChart& c, const ResidueOperators& res, Cplx h,
                const std::vector<double>& u, int dmax) {
    RayCtx rc;
    rc.polys = chart_polynomials(ks, c);
    rc.ktot = CMat::Zero(ks.dim, ks.dim);
    for (const auto& k : res.k_ops) rc.ktot += (0.5 * h) * complex_matrix(k);
    rc.nd.assign(static_cast<size_t>(dmax) + 1, CMat::Zero(ks.dim, ks.dim));
    size_t vars = c.members.size();
    std::vector<int> zero(vars, 0);
    for (size_t r = 0; r < ks.roots.size(); ++r) {
        rc.kroot.push_back((0.5 * h) * complex_matrix(ks.ops[r]));
        rc.eulers.push_back(upoly_euler(rc.polys[r]));
        // series of the logarithmic Euler derivative, constant factor dropped
        auto it = rc.polys[r].find(zero);
        if (it == rc.polys[r].end() || it->second == 0)
            throw std::runtime_error("chart polynomial vanishes at the corner");
        Rat c0 = it->second;
        UPoly q;  // 1 - P/c0
        for (const auto& [k, v] : rc.polys[r])
            if (k != zero) q[k] = -v / c0;
        UPoly inv{{zero, Rat(1)}};
        UPoly qp{{zero, Rat(1)}};
        for (int j = 1; j <= dmax; ++j) {
            qp = upoly_mul_trunc(qp, q, dmax);
            for (const auto& [k, v] : qp) inv[k] += v;
        }
        upoly_trim(inv);
        UPoly ell = upoly_mul_trunc(rc.eulers[r], inv, dmax);
        for (const auto& [k, v] : ell) {
            int deg = 0;
            double mono = v.get_d() / c0.get_d();
            for (size_t b = 0; b < vars; ++b) {
                deg += k[b];
                for (int e = 0; e < k[b]; ++e) mono *= u[b];
            }
            if (deg >= 1 && deg <= dmax) rc.nd[static_cast<size_t>(deg)] += mono * rc.kroot[r];
        }
    }
    return rc;
}

// homogeneous pieces of the normalized factor along the ray, graded by both
// the series order and the ray degree
std::vector<std::vector<CMat>> graded_coeffs(const RayCtx& rc, int dim, int kmax, int dmax) {
    CMat z = CMat::Zero(dim, dim);
    std::vector<std::vector<CMat>> H(static_cast<size_t>(kmax) + 1,
                                     std::vector<CMat>(static_cast<size_t>(dmax) + 1, z));
    H[0][0] = CMat::Identity(dim, dim);
    for (int k = 0; k < kmax; ++k)
        for (int d = 1; d <= dmax; ++d) {
            CMat v = rc.ktot * H[static_cast<size_t>(k)][static_cast<size_t>(d)] -
                     H[static_cast<size_t>(k)][static_cast<size_t>(d)] * rc.ktot;
            for (int dp = 1; dp <= d; ++dp)
                v += rc.nd[static_cast<size_t>(dp)] *
                     H[static_cast<size_t>(k)][static_cast<size_t>(d - dp)];
            H[static_cast<size_t>(k) + 1][static_cast<size_t>(d)] = v / static_cast<double>(d);
        }
    return H;
}

void certify_target(const KSystem& ks, const BlowupChart& c, const std::vector<UPoly>& polys,
                    const std::vector<double>& u, double pmin) {
    if (u.size() != c.members.size())
        throw std::invalid_argument("coordinate vector does not match the chart");
    for (double v : u)
        if (!(v > 0.0)) throw std::invalid_argument("target leaves the chart region");
    auto alpha = alpha_from_u_impl(c, ks.rank, u);
    for (int v : ks.verts)
        if (!(alpha[static_cast<size_t>(v)] > 0.0))
            throw std::invalid_argument("target leaves the chamber");
    for (const auto& p : polys)
        if (std::abs(upoly_eval(p, u)) < pmin)
            throw std::invalid_argument("target too close to a vanishing chart polynomial");
}

ConnectionForm ksystem_form(const KSystem& ks, Cplx h) {
    ConnectionForm form;
    form.rank = ks.rank;
    form.h = h;
    for (size_t r = 0; r < ks.roots.size(); ++r)
        form.terms.push_back({ks.roots[r], ks.ops[r]});
    return form;
}

PathSpec ray_path(const KSystem& ks, const BlowupChart& c, const std::vector<double>& u,
                  double sigma) {
    int segs = std::max(8, static_cast<int>(std::ceil(10.0 * std::log(1.0 / sigma))));
    PathSpec p;
    p.label = "corner ray";
    auto point = [&](double t) {
        std::vector<double> ut(u);
        for (double& v : ut) v *= t;
        auto a = alpha_from_u_impl(c, ks.rank, ut);
        std::vector<Cplx> z(a.size());
        for (size_t i = 0; i < a.size(); ++i) z[i] = Cplx(a[i], 0.0);
        return z;
    };
    auto prev = point(sigma);
    for (int j = 1; j <= segs; ++j) {
        double t = std::pow(sigma, 1.0 - static_cast<double>(j) / segs);
        auto next = point(t);
        p.segments.push_back(LineSeg{prev, next});
        prev = next;
    }
    return p;
}

using State = std::vector<CMat>;

State state_axpy(const State& y, double c, const State& k) {
    State out(y.size());
    for (size_t i = 0; i < y.size(); ++i) out[i] = y[i] + c * k[i];
    return out;
}

}  // namespace

KSystem build_ksystem(const IntegrableModule& m, const RootVectors& rv) {
    if (!same_gcm(m.gcm, rv.gcm))
        throw std::invalid_argument("module and root vectors disagree on the algebra");
    if (!m.gcm.is_finite())
        throw std::invalid_argument("blow-up charts need a finite root system");
    auto full = generate_positive_roots(m.gcm, rv.slice.cutoff + 1);
    if (full.roots.size() != rv.slice.roots.size())
        throw std::invalid_argument("root slice must contain every positive root");
    KSystem ks;
    ks.gcm = m.gcm;
    ks.rank = m.gcm.n;
    for (int i = 0; i < ks.rank; ++i) ks.verts.push_back(i);
    ks.diagram = diagram_from_gcm(m.gcm);
    ks.dim = m.dim;
    for (size_t r = 0; r < rv.slice.roots.size(); ++r) {
        ks.roots.push_back(rv.slice.roots[r].c);
        ks.ops.push_back(casimir_truncated(m, rv, static_cast<int>(r)));
    }
    return ks;
}

KSystem restrict_ksystem(const KSystem& ks, const VSet& b) {
    VSet sorted = b;
    std::sort(sorted.begin(), sorted.end());
    if (!vset_includes(ks.verts, sorted))
        throw std::invalid_argument("restriction labels leave the diagram");
    KSystem out;
    out.gcm = ks.gcm;
    out.rank = ks.rank;
    out.verts = sorted;
    out.diagram = induced_diagram(ks.diagram, sorted);
    out.dim = ks.dim;
    for (size_t r = 0; r < ks.roots.size(); ++r)
        if (vset_includes(sorted, coeff_support(ks.roots[r]))) {
            out.roots.push_back(ks.roots[r]);
            out.ops.push_back(ks.ops[r]);
        }
    return out;
}

UPoly upoly_mul(const UPoly& a, const UPoly& b) { return upoly_mul_trunc(a, b, -1); }

UPoly upoly_partial(const UPoly& p, int var) {
    UPoly out;
    for (const auto& [k, v] : p) {
        int e = k[static_cast<size_t>(var)];
        if (e == 0) continue;
        std::vector<int> kk = k;
        kk[static_cast<size_t>(var)] = e - 1;
        out[kk] += v * e;
    }
    upoly_trim(out);
    return out;
}

Rat upoly_eval_rat(const UPoly& p, const std::vector<Rat>& u) {
    Rat acc(0);
    for (const auto& [k, v] : p) {
        Rat term = v;
        for (size_t b = 0; b < u.size(); ++b)
            for (int e = 0; e < k[b]; ++e) term *= u[b];
        acc += term;
    }
    return acc;
}

double upoly_eval(const UPoly& p, const std::vector<double>& u) {
    double acc = 0;
    for (const auto& [k, v] : p) {
        double term = v.get_d();
        for (size_t b = 0; b < u.size(); ++b)
            for (int e = 0; e < k[b]; ++e) term *= u[b];
        acc += term;
    }
    return acc;
}

BlowupChart make_chart(const Diagram& d, const std::vector<VSet>& mns) {
    if (!is_nested_set(d, mns).nested || !is_maximal_nested(d, mns))
        throw std::invalid_argument("chart needs a maximal nested set");
    BlowupChart c;
    c.diagram = d;
    c.members = mns;
    std::sort(c.members.begin(), c.members.end(), [](const VSet& x, const VSet& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return x < y;
    });
    for (size_t i = 1; i < c.members.size(); ++i)
        if (c.members[i] == c.members[i - 1])
            throw std::invalid_argument("chart members repeat");
    c.parent.assign(c.members.size(), -1);
    for (size_t i = 0; i < c.members.size(); ++i)
        for (size_t j = i + 1; j < c.members.size(); ++j)
            if (c.members[j].size() > c.members[i].size() &&
                vset_includes(c.members[j], c.members[i])) {
                c.parent[i] = static_cast<int>(j);
                break;
            }
    for (const auto& [member, v] : pf_bijection(d, mns)) {
        auto it = std::find(c.members.begin(), c.members.end(), member);
        c.owner[v] = static_cast<int>(it - c.members.begin());
    }
    return c;
}

int chart_pf(const BlowupChart& c, const std::vector<int>& coeff) {
    VSet supp = coeff_support(coeff);
    if (supp.empty()) throw std::invalid_argument("zero functional has no owner");
    for (size_t b = 0; b < c.members.size(); ++b)
        if (vset_includes(c.members[b], supp)) return static_cast<int>(b);
    throw std::invalid_argument("support leaves the chart");
}

std::vector<double> chart_u_from_alpha(const BlowupChart& c, const std::vector<double>& alpha) {
    return u_from_alpha_impl(c, alpha);
}

std::vector<Rat> chart_u_from_alpha_rat(const BlowupChart& c, const std::vector<Rat>& alpha) {
    return u_from_alpha_impl(c, alpha);
}

std::vector<double> chart_alpha_from_u(const BlowupChart& c, int rank,
                                       const std::vector<double>& u) {
    return alpha_from_u_impl(c, rank, u);
}

std::vector<Rat> chart_alpha_from_u_rat(const BlowupChart& c, int rank,
                                        const std::vector<Rat>& u) {
    return alpha_from_u_impl(c, rank, u);
}

std::vector<UPoly> chart_polynomials(const KSystem& ks, const BlowupChart& c) {
    size_t n = c.members.size();
    std::vector<int> zero(n, 0);
    std::vector<UPoly> simple(n);
    for (size_t b = 0; b < n; ++b) {
        UPoly p{{zero, Rat(1)}};
        for (size_t ch = 0; ch < n; ++ch)
            if (c.parent[ch] == static_cast<int>(b)) {
                std::vector<int> mono = zero;
                mono[ch] = 1;
                p[mono] += Rat(-1);
            }
        upoly_trim(p);
        simple[b] = p;
    }
    std::vector<UPoly> out;
    for (const auto& root : ks.roots) {
        size_t pg = static_cast<size_t>(chart_pf(c, root));
        UPoly acc;
        for (size_t b = 0; b < n; ++b) {
            if (!vset_includes(c.members[pg], c.members[b])) continue;
            int mult = root[static_cast<size_t>(owned_vertex(c, b))];
            if (mult == 0) continue;
            UPoly term{{zero, Rat(mult)}};
            for (size_t e = 0; e < n; ++e) {
                if (e == pg) continue;
                if (!vset_includes(c.members[e], c.members[b])) continue;
                if (!vset_includes(c.members[pg], c.members[e])) continue;
                std::vector<int> mono = zero;
                mono[e] = 1;
                term = upoly_mul(term, UPoly{{mono, Rat(1)}});
            }
            term = upoly_mul(term, simple[b]);
            for (const auto& [k, v] : term) acc[k] += v;
        }
        upoly_trim(acc);
        out.push_back(acc);
    }
    return out;
}

ResidueOperators chart_residues(const KSystem& ks, const BlowupChart& c) {
    ResidueOperators res;
    res.r_ops.assign(c.members.size(), QMat::zero(ks.dim, ks.dim));
    res.k_ops.assign(c.members.size(), QMat::zero(ks.dim, ks.dim));
    for (size_t r = 0; r < ks.roots.size(); ++r) {
        size_t owner = static_cast<size_t>(chart_pf(c, ks.roots[r]));
        res.r_ops[owner] = res.r_ops[owner] + ks.ops[r];
        VSet supp = coeff_support(ks.roots[r]);
        for (size_t b = 0; b < c.members.size(); ++b)
            if (vset_includes(c.members[b], supp)) res.k_ops[b] = res.k_ops[b] + ks.ops[r];
    }
    return res;
}

CMat corner_weight(const KSystem& ks, const BlowupChart& c, const ResidueOperators& res, Cplx h,
                   const std::vector<double>& u) {
    if (u.size() != c.members.size())
        throw std::invalid_argument("coordinate vector does not match the chart");
    auto x = x_values(c, u);
    CMat expo = CMat::Zero(ks.dim, ks.dim);
    for (size_t b = 0; b < x.size(); ++b) {
        if (!(x[b] > 0.0)) throw std::invalid_argument("corner weight needs positive coordinates");
        expo += std::log(x[b]) * (0.5 * h) * complex_matrix(res.r_ops[b]);
    }
    return cmat_exp(expo);
}

CMat solution_corner(const KSystem& ks, const BlowupChart& c, Cplx h,
                     const std::vector<double>& u, const FundOpts& o) {
    auto res = chart_residues(ks, c);
    RayCtx rc = make_ray(ks, c, res, h, u, o.seed_order);
    certify_target(ks, c, rc.polys, u, o.pmin);
    auto graded = graded_coeffs(rc, ks.dim, o.seed_terms, o.seed_order);
    std::vector<CMat> cd(static_cast<size_t>(o.seed_order) + 1, CMat::Zero(ks.dim, ks.dim));
    for (int k = 1; k <= o.seed_terms; ++k)
        for (int d = 1; d <= o.seed_order; ++d)
            cd[static_cast<size_t>(d)] += graded[static_cast<size_t>(k)][static_cast<size_t>(d)];
    ConnectionForm form = ksystem_form(ks, h);

    std::vector<CMat> table;
    for (int lvl = 0; lvl < o.levels; ++lvl) {
        double sigma = o.seed / std::pow(2.0, lvl);
        std::vector<double> useed(u);
        for (double& v : useed) v *= sigma;
        CMat head = CMat::Identity(ks.dim, ks.dim);
        double sp = 1.0;
        for (int d = 1; d <= o.seed_order; ++d) {
            sp *= sigma;
            head += sp * cd[static_cast<size_t>(d)];
        }
        CMat seed = head * corner_weight(ks, c, res, h, useed);
        PathSpec path = ray_path(ks, c, u, sigma);
        certify_path(form, path);
        auto tr = transport(form, path, o.tol);
        table.push_back(tr.op * seed);
    }
    for (int k = 1; k < o.levels; ++k) {
        double w = std::pow(2.0, o.seed_order + k);
        for (int j = o.levels - 1; j >= k; --j)
            table[static_cast<size_t>(j)] =
                (w * table[static_cast<size_t>(j)] - table[static_cast<size_t>(j) - 1]) /
                (w - 1.0);
    }
    return table.back();
}

CMat solution_series(const KSystem& ks, const BlowupChart& c, Cplx h,
                     const std::vector<double>& u, const FundOpts& o) {
    if (o.degree < 0) throw std::invalid_argument("series degree must be nonnegative");
    auto res = chart_residues(ks, c);
    RayCtx rc = make_ray(ks, c, res, h, u, o.seed_order);
    certify_target(ks, c, rc.polys, u, o.pmin);
    CMat total = CMat::Identity(ks.dim, ks.dim);
    if (o.degree > 0) {
        auto graded = graded_coeffs(rc, ks.dim, o.degree, o.seed_order);
        double t1 = std::exp(o.s0);
        State y(static_cast<size_t>(o.degree), CMat::Zero(ks.dim, ks.dim));
        for (int k = 1; k <= o.degree; ++k) {
            double tp = 1.0;
            for (int d = 1; d <= o.seed_order; ++d) {
                tp *= t1;
                y[static_cast<size_t>(k) - 1] +=
                    tp * graded[static_cast<size_t>(k)][static_cast<size_t>(d)];
            }
        }
        auto rhs = [&](double s, const State& st) {
            std::vector<double> us(u);
            double t = std::exp(s);
            for (double& v : us) v *= t;
            CMat nmat = CMat::Zero(ks.dim, ks.dim);
            for (size_t r = 0; r < ks.roots.size(); ++r) {
                double denom = upoly_eval(rc.polys[r], us);
                nmat += (upoly_eval(rc.eulers[r], us) / denom) * rc.kroot[r];
            }
            State out(st.size());
            out[0] = nmat;
            for (size_t k = 1; k < st.size(); ++k)
                out[k] = rc.ktot * st[k - 1] - st[k - 1] * rc.ktot + nmat * st[k - 1];
            return out;
        };
        double hs = -o.s0 / o.steps;
        double s = o.s0;
        for (int step = 0; step < o.steps; ++step) {
            State k1 = rhs(s, y);
            State k2 = rhs(s + hs / 2, state_axpy(y, hs / 2, k1));
            State k3 = rhs(s + hs / 2, state_axpy(y, hs / 2, k2));
            State k4 = rhs(s + hs, state_axpy(y, hs, k3));
            for (size_t i = 0; i < y.size(); ++i)
                y[i] += (hs / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            s += hs;
        }
        for (const auto& hk : y) total += hk;
    }
    return total * corner_weight(ks, c, res, h, u);
}

CMat fundamental_solution(const KSystem& ks, const BlowupChart& c, Cplx h,
                          const std::vector<double>& u, const FundOpts& o) {
    CMat a = solution_corner(ks, c, h, u, o);
    CMat b = solution_series(ks, c, h, u, o);
    if (mnorm(a - b) > o.budget)
        throw std::runtime_error("solution strategies disagree beyond the budget");
    return a;
}

namespace {

struct PsiCache {
    std::vector<std::vector<CMat>> val;
    std::vector<std::vector<CMat>> inv;
};

PsiCache psi_cache(const KSystem& ks, const std::vector<BlowupChart>& charts, Cplx h,
                   const std::vector<std::vector<double>>& pts, const FundOpts& o) {
    PsiCache cache;
    cache.val.resize(charts.size());
    cache.inv.resize(charts.size());
    for (size_t ci = 0; ci < charts.size(); ++ci)
        for (const auto& pt : pts) {
            std::vector<double> u = chart_u_from_alpha(charts[ci], pt);
            CMat psi = solution_corner(ks, charts[ci], h, u, o);
            CMat psi_inv = psi.inverse();
            cache.val[ci].push_back(std::move(psi));
            cache.inv[ci].push_back(std::move(psi_inv));
        }
    return cache;
}

}  // namespace

AssocResult dcp_associator(const KSystem& ks, const std::vector<VSet>& f,
                           const std::vector<VSet>& g, Cplx h,
                           const std::vector<std::vector<double>>& alpha_pts, double tol,
                           const FundOpts& o) {
    if (alpha_pts.empty()) throw std::invalid_argument("need at least one evaluation point");
    for (const auto& pt : alpha_pts)
        if (static_cast<int>(pt.size()) != ks.rank)
            throw std::invalid_argument("evaluation point does not match the rank");
    std::vector<BlowupChart> charts = {make_chart(ks.diagram, f), make_chart(ks.diagram, g)};
    PsiCache cache = psi_cache(ks, charts, h, alpha_pts, o);
    std::vector<CMat> phis;
    for (size_t j = 0; j < alpha_pts.size(); ++j) phis.push_back(cache.inv[0][j] * cache.val[1][j]);
    AssocResult out;
    out.phi = phis[0];
    for (size_t a = 0; a < phis.size(); ++a)
        for (size_t b = a + 1; b < phis.size(); ++b)
            out.spread = std::max(out.spread, mnorm(phis[a] - phis[b]));
    out.pass = out.spread < tol;
    return out;
}

PropertyReport associator_property_suite(const KSystem& ks, Cplx h,
                                         const std::vector<std::vector<double>>& alpha_pts,
                                         double tol, const FundOpts& o) {
    if (alpha_pts.size() < 3)
        throw std::invalid_argument("the suite compares solutions at three points or more");
    for (const auto& pt : alpha_pts)
        if (static_cast<int>(pt.size()) != ks.rank)
            throw std::invalid_argument("evaluation point does not match the rank");
    auto mnss = enumerate_mns(ks.diagram);
    PropertyReport rep;
    if (mnss.size() < 2) {
        rep.pass = true;
        return rep;
    }
    std::vector<BlowupChart> charts;
    for (const auto& mns : mnss) charts.push_back(make_chart(ks.diagram, mns));
    size_t nc = charts.size();
    size_t np = alpha_pts.size();
    PsiCache cache = psi_cache(ks, charts, h, alpha_pts, o);
    auto phi = [&](size_t a, size_t b, size_t j) { return CMat(cache.inv[a][j] * cache.val[b][j]); };
    CMat id = CMat::Identity(ks.dim, ks.dim);

    for (size_t a = 0; a < nc; ++a)
        for (size_t b = a + 1; b < nc; ++b) {
            ++rep.pairs;
            rep.orientation =
                std::max(rep.orientation, mnorm(phi(a, b, 0) * phi(b, a, 1 % np) - id));
        }
    for (size_t a = 0; a < nc; ++a)
        for (size_t b = 0; b < nc; ++b)
            for (size_t cidx = 0; cidx < nc; ++cidx) {
                if (a == b || b == cidx || a == cidx) continue;
                ++rep.triples;
                CMat lhs = phi(a, b, 0) * phi(b, cidx, 1 % np);
                rep.transitivity =
                    std::max(rep.transitivity, mnorm(lhs - phi(a, cidx, 2 % np)));
            }

    for (size_t a = 0; a < nc; ++a)
        for (size_t b = a + 1; b < nc; ++b) {
            if (!is_elementary_pair(mnss[a], mnss[b])) continue;
            PairSupport ps;
            try {
                ps = pair_support(ks.diagram, mnss[a], mnss[b]);
            } catch (const std::exception&) {
                continue;
            }
            ++rep.elementary;
            if (ps.supp != ks.verts) {
                KSystem sub = restrict_ksystem(ks, ps.supp);
                auto pick = [&](const std::vector<VSet>& mns) {
                    std::vector<VSet> out;
                    for (const auto& m : mns)
                        if (vset_includes(ps.supp, m)) out.push_back(m);
                    return out;
                };
                std::vector<BlowupChart> sub_charts = {
                    make_chart(sub.diagram, pick(mnss[a])),
                    make_chart(sub.diagram, pick(mnss[b]))};
                PsiCache sub_cache = psi_cache(sub, sub_charts, h, alpha_pts, o);
                for (size_t j = 0; j < np; ++j) {
                    CMat sub_phi = sub_cache.inv[0][j] * sub_cache.val[1][j];
                    double r = mnorm(phi(a, b, j) - sub_phi);
                    rep.support = std::max(rep.support, r);
                    rep.forgetfulness = std::max(rep.forgetfulness, r);
                }
            }
            if (!ps.zsupp.empty()) {
                CMat p0 = phi(a, b, 0);
                for (size_t r = 0; r < ks.roots.size(); ++r) {
                    if (!vset_includes(ps.zsupp, coeff_support(ks.roots[r]))) continue;
                    CMat k = complex_matrix(ks.ops[r]);
                    rep.central = std::max(rep.central, mnorm(p0 * k - k * p0));
                }
            }
        }

    PsiCache half = psi_cache(ks, charts, 0.5 * h, alpha_pts, o);
    double d1 = 0.0, d2 = 0.0;
    for (size_t a = 0; a < nc; ++a)
        for (size_t b = a + 1; b < nc; ++b) {
            d1 = std::max(d1, mnorm(phi(a, b, 0) - id));
            d2 = std::max(d2, mnorm(CMat(half.inv[a][0] * half.val[b][0]) - id));
        }
    rep.leading_slope = std::log2(d1 / d2);

    rep.pass = rep.orientation < tol && rep.transitivity < tol && rep.support < tol &&
               rep.forgetfulness < tol && rep.central < tol && rep.leading_slope >= 1.0;
    return rep;
}

}  // namespace kmc
