#include "kmc/affine.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace kmc {

namespace {

const double kPi = std::acos(-1.0);

// sum_{n>0} 1/(y+n) - 1/n, partial sum plus an integral tail with a midpoint
// correction. Summed smallest terms first.
Cplx core_sum(Cplx y, int terms) {
    if (std::abs(y.imag()) < 0.5) {
        long k = std::lround(y.real());
        if (k <= -1 && std::abs(y - Cplx(static_cast<double>(k), 0.0)) < 1e-9)
            throw std::invalid_argument("pole of the regularized sum");
    }
    Cplx s(0.0, 0.0);
    for (int n = terms; n >= 1; --n) {
        double dn = static_cast<double>(n);
        s += -y / (dn * (y + dn));
    }
    double a = terms + 0.5;
    Cplx ia = 1.0 / Cplx(a, 0.0);
    Cplx iya = 1.0 / (y + a);
    Cplx tail = -std::log(1.0 + y / a) + (ia * ia - iya * iya) / 24.0;
    return s + tail;
}

HVec hvec_zero(int l) {
    HVec v;
    v.h.assign(static_cast<size_t>(l), Cplx(0.0, 0.0));
    return v;
}

void hvec_axpy(HVec& acc, Cplx w, const HVec& v) {
    for (size_t i = 0; i < acc.h.size(); ++i) acc.h[i] += w * v.h[i];
    acc.c += w * v.c;
    acc.d += w * v.d;
}

double hvec_norm(const HVec& v) {
    double m = std::max(std::abs(v.c), std::abs(v.d));
    for (const Cplx& x : v.h) m = std::max(m, std::abs(x));
    return m;
}

HVec hvec_sub(const HVec& x, const HVec& y) {
    HVec out = x;
    for (size_t i = 0; i < out.h.size(); ++i) out.h[i] -= y.h[i];
    out.c -= y.c;
    out.d -= y.d;
    return out;
}

double comp_distance(const std::vector<HVec>& x, const std::vector<HVec>& y) {
    double m = 0.0;
    for (size_t k = 0; k < x.size(); ++k) m = std::max(m, hvec_norm(hvec_sub(x[k], y[k])));
    return m;
}

SqVec sq_zero(int l) {
    SqVec s;
    s.q.assign(static_cast<size_t>(l) + 1, std::vector<Cplx>(static_cast<size_t>(l) + 1));
    return s;
}

std::vector<int> negated(const std::vector<int>& m) {
    std::vector<int> out = m;
    for (int& v : out) v = -v;
    return out;
}

}  // namespace

Cplx psi_plus(Cplx delta, Cplx x, int terms) {
    if (std::abs(delta) < 1e-12) throw std::invalid_argument("degenerate scale");
    return core_sum(x / delta, terms) / delta;
}

Cplx psi_minus(Cplx delta, Cplx x, int terms) {
    if (std::abs(delta) < 1e-12) throw std::invalid_argument("degenerate scale");
    return core_sum((-x) / delta, terms) / delta;
}

Cplx psi_full(Cplx delta, Cplx x, int terms) {
    if (std::abs(delta) < 1e-12) throw std::invalid_argument("degenerate scale");
    Cplx y = x / delta;
    return (core_sum(y, terms) + core_sum(-y, terms)) / delta;
}

Cplx form_S(Cplx z) { return 0.5 * (1.0 / z + psi_full(1.0, z)); }

Cplx form_T(Cplx z) { return -z * (form_S(z) + 1.0) + 0.5; }

SystemReport functional_system_check(const std::function<Cplx(Cplx)>& s,
                                     const std::function<Cplx(Cplx)>& t,
                                     const std::vector<Cplx>& samples, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("tolerance must be positive");
    SystemReport rep;
    for (const Cplx& z : samples) {
        rep.s_reflect = std::max(rep.s_reflect, std::abs(s(-z) - s(z) + 1.0 / z));
        rep.s_shift = std::max(rep.s_shift, std::abs(s(1.0 - z) - s(z)));
        rep.t_odd = std::max(rep.t_odd, std::abs(t(-z) + t(z)));
        rep.t_mix = std::max(rep.t_mix, std::abs(t(z) + t(1.0 - z) + s(1.0 - z)));
    }
    rep.pass = rep.s_reflect < tol && rep.s_shift < tol && rep.t_odd < tol && rep.t_mix < tol;
    return rep;
}

double cot_identity_residual(Cplx z) {
    Cplx lhs = kPi / std::tan(kPi * z);
    Cplx rhs = 1.0 / z + psi_plus(1.0, z) - psi_minus(1.0, z);
    return std::abs(lhs - rhs);
}

double cot_rearrangement_residual(Cplx theta, Cplx dlt, int terms) {
    if (std::abs(dlt) < 1e-12) throw std::invalid_argument("degenerate scale");
    Cplx lhs = kPi / std::tan(kPi * theta / dlt);
    Cplx s(0.0, 0.0);
    for (int n = terms; n >= 1; --n) {
        Cplx nd = static_cast<double>(n) * dlt;
        s += -2.0 * theta / (nd * nd - theta * theta);
    }
    double a = terms + 0.5;
    Cplx ad = a * dlt;
    Cplx tail = std::log((ad - theta) / (ad + theta)) / dlt +
                4.0 * theta * a * dlt * dlt / ((ad * ad - theta * theta) * (ad * ad - theta * theta)) / 24.0;
    Cplx rhs = dlt * (1.0 / theta + s + tail);
    return std::abs(lhs - rhs);
}

AffineForm assemble_A_h(const GCM& g) {
    if (!g.is_affine()) throw std::invalid_argument("assemble_A_h needs an affine matrix");
    AffineForm f;
    f.gcm = g;
    f.l = g.n - 1;
    std::vector<std::vector<int>> sub(static_cast<size_t>(f.l), std::vector<int>(f.l));
    for (int i = 0; i < f.l; ++i)
        for (int j = 0; j < f.l; ++j) sub[i][j] = g.a[i + 1][j + 1];
    f.fin = GCM::from_matrix(sub);
    if (!f.fin.is_finite()) throw std::invalid_argument("the affine vertex must sit in slot 0");

    RootSlice slice = generate_positive_roots(f.fin, 64);
    for (const Root& r : slice.roots) {
        if (r.imaginary) continue;
        Rat mm = f.fin.form_roots(r.c, r.c);
        std::vector<Rat> co(static_cast<size_t>(f.l));
        for (int i = 0; i < f.l; ++i) co[i] = Rat(2 * r.c[i]) * f.fin.d[i] / mm;
        f.roots.push_back(r.c);
        f.coroots.push_back(co);
        f.norms.push_back(mm);
    }

    QMat mat(f.l, f.l);
    RatVec rhs(static_cast<size_t>(f.l), Rat(1));
    for (int i = 0; i < f.l; ++i)
        for (int j = 0; j < f.l; ++j) mat(i, j) = Rat(f.fin.a[j][i]);
    auto sol = solve(mat, rhs);
    if (!sol) throw std::runtime_error("grading element did not resolve");
    f.b_h = *sol;
    f.b_c = 0;
    f.b_d = 1;
    for (int j = 0; j < f.l; ++j) f.b_d -= f.b_h[static_cast<size_t>(j)] * g.a[j + 1][0];
    return f;
}

std::vector<HVec> a_gamma_eval(const AffineForm& f, const std::vector<int>& mvec, int n,
                               const std::vector<Cplx>& a, Cplx dlt) {
    if (static_cast<int>(mvec.size()) != f.l || static_cast<int>(a.size()) != f.l)
        throw std::invalid_argument("bad coordinates");
    Rat mm = f.fin.form_roots(mvec, mvec);
    if (mm == 0) throw std::invalid_argument("isotropic layer");
    double mmd = mm.get_d();

    Cplx beta(0.0, 0.0);
    for (int i = 0; i < f.l; ++i) beta += static_cast<double>(mvec[i]) * a[static_cast<size_t>(i)];
    Cplx z = beta / dlt + static_cast<double>(n);
    Cplx sv = form_S(z), tv = form_T(z);

    HVec val = hvec_zero(f.l);
    for (int i = 0; i < f.l; ++i)
        val.h[static_cast<size_t>(i)] = sv * (2.0 * mvec[i] * f.fin.d[i].get_d() / mmd);
    val.c = sv * (2.0 * n / mmd) + tv;

    std::vector<HVec> out(static_cast<size_t>(f.l) + 1, hvec_zero(f.l));
    for (int i = 0; i < f.l; ++i)
        hvec_axpy(out[static_cast<size_t>(i)], static_cast<double>(mvec[i]) / dlt, val);
    hvec_axpy(out[static_cast<size_t>(f.l)], -beta / (dlt * dlt), val);
    return out;
}

std::vector<HVec> a_h_eval(const AffineForm& f, const std::vector<Cplx>& a, Cplx dlt) {
    std::vector<HVec> out(static_cast<size_t>(f.l) + 1, hvec_zero(f.l));
    for (const auto& root : f.roots) {
        auto layer = a_gamma_eval(f, root, 0, a, dlt);
        for (size_t k = 0; k < out.size(); ++k) hvec_axpy(out[k], 1.0, layer[k]);
    }
    HVec& last = out[static_cast<size_t>(f.l)];
    for (int i = 0; i < f.l; ++i) last.h[static_cast<size_t>(i)] += f.b_h[static_cast<size_t>(i)].get_d() / dlt;
    last.c += f.b_c.get_d() / dlt;
    last.d += f.b_d.get_d() / dlt;
    return out;
}

std::vector<SqVec> a_sq_eval(const AffineForm& f, const std::vector<Cplx>& a, Cplx dlt) {
    if (static_cast<int>(a.size()) != f.l) throw std::invalid_argument("bad coordinates");
    std::vector<SqVec> out(static_cast<size_t>(f.l) + 1, sq_zero(f.l));
    for (size_t r = 0; r < f.roots.size(); ++r) {
        const auto& mvec = f.roots[r];
        Cplx beta(0.0, 0.0);
        for (int i = 0; i < f.l; ++i) beta += static_cast<double>(mvec[i]) * a[static_cast<size_t>(i)];
        Cplx z = beta / dlt;
        Cplx w = 0.5 * kPi / std::tan(kPi * z);

        std::vector<Cplx> kap(static_cast<size_t>(f.l) + 1);
        for (int i = 0; i < f.l; ++i) kap[static_cast<size_t>(i)] = f.coroots[r][static_cast<size_t>(i)].get_d();
        kap[static_cast<size_t>(f.l)] = -z;

        std::vector<Cplx> chain(static_cast<size_t>(f.l) + 1);
        for (int i = 0; i < f.l; ++i) chain[static_cast<size_t>(i)] = static_cast<double>(mvec[i]) / dlt;
        chain[static_cast<size_t>(f.l)] = -beta / (dlt * dlt);

        for (size_t k = 0; k < out.size(); ++k) {
            Cplx fac = w * chain[k];
            for (size_t x = 0; x <= static_cast<size_t>(f.l); ++x)
                for (size_t y = 0; y <= static_cast<size_t>(f.l); ++y)
                    out[k].q[x][y] += fac * kap[x] * kap[y];
        }
    }
    return out;
}

double equi1_residual(const AffineForm& f, Cplx theta, Cplx dlt) {
    if (f.l != 1) throw std::invalid_argument("rank one geometry only");
    auto lhs = a_h_eval(f, {-theta}, dlt);
    for (size_t i = 0; i < lhs[0].h.size(); ++i) lhs[0].h[i] = -lhs[0].h[i];
    lhs[0].c = -lhs[0].c;
    lhs[0].d = -lhs[0].d;
    for (auto& comp : lhs)
        for (Cplx& x : comp.h) x = -x;
    auto rhs = a_h_eval(f, {theta}, dlt);
    rhs[0].h[0] -= 1.0 / theta;
    return comp_distance(lhs, rhs);
}

double formA1_residual(const AffineForm& f, int root_index, const std::vector<Cplx>& a, Cplx dlt) {
    if (root_index < 0 || root_index >= static_cast<int>(f.roots.size()))
        throw std::invalid_argument("root index out of range");
    const auto& mvec = f.roots[static_cast<size_t>(root_index)];
    auto lhs = a_gamma_eval(f, negated(mvec), 0, a, dlt);
    auto rhs = a_gamma_eval(f, mvec, 0, a, dlt);
    Cplx beta(0.0, 0.0);
    for (int i = 0; i < f.l; ++i) beta += static_cast<double>(mvec[i]) * a[static_cast<size_t>(i)];
    for (int i = 0; i < f.l; ++i)
        for (int j = 0; j < f.l; ++j)
            rhs[static_cast<size_t>(i)].h[static_cast<size_t>(j)] -=
                (static_cast<double>(mvec[i]) / beta) *
                f.coroots[static_cast<size_t>(root_index)][static_cast<size_t>(j)].get_d();
    for (int j = 0; j < f.l; ++j)
        rhs[static_cast<size_t>(f.l)].h[static_cast<size_t>(j)] +=
            f.coroots[static_cast<size_t>(root_index)][static_cast<size_t>(j)].get_d() / dlt;
    return comp_distance(lhs, rhs);
}

double formA2_residual(const AffineForm& f, int root_index, const std::vector<Cplx>& a, Cplx dlt) {
    if (root_index < 0 || root_index >= static_cast<int>(f.roots.size()))
        throw std::invalid_argument("root index out of range");
    const auto& mvec = f.roots[static_cast<size_t>(root_index)];
    auto lhs = a_gamma_eval(f, negated(mvec), 1, a, dlt);
    auto rhs = a_gamma_eval(f, mvec, 0, a, dlt);
    return comp_distance(lhs, rhs);
}

double s0_chain_residual(const AffineForm& f, Cplx theta, Cplx dlt) {
    if (f.l != 1) throw std::invalid_argument("rank one geometry only");
    std::vector<Cplx> a = {theta};
    auto e1 = a_gamma_eval(f, {-1}, 2, a, dlt);
    auto e2 = a_gamma_eval(f, {1}, -1, a, dlt);
    auto e3 = a_gamma_eval(f, {-1}, 1, a, dlt);
    double r1 = comp_distance(e1, e2);

    Rat mm = f.fin.form_roots({1}, {1});
    HVec h0 = hvec_zero(1);
    h0.h[0] = Cplx(-1.0, 0.0);
    h0.c = Cplx(2.0 / mm.get_d(), 0.0);
    Cplx a0 = dlt - theta;
    hvec_axpy(e3[0], 1.0 / a0, h0);
    hvec_axpy(e3[1], -1.0 / a0 + 1.0 / dlt, h0);
    double r2 = comp_distance(e2, e3);
    return std::max(r1, r2);
}

namespace {

template <typename Eval, typename Comp>
double closedness_scan(int nc, const std::vector<std::vector<Cplx>>& pts, Eval eval, Comp entry_max) {
    const double eps0 = 2e-4;
    double worst = 0.0;
    for (const auto& pt : pts) {
        if (static_cast<int>(pt.size()) != nc) throw std::invalid_argument("bad sample point");
        // anti[level][p][q] = d_p omega_q - d_q omega_p, then one Richardson step
        for (int p = 0; p < nc; ++p)
            for (int q = p + 1; q < nc; ++q) {
                auto anti = [&](double eps) {
                    auto shift = [&](int coord, double off) {
                        std::vector<Cplx> x = pt;
                        x[static_cast<size_t>(coord)] += off;
                        return eval(x);
                    };
                    auto pp = shift(p, eps), pm = shift(p, -eps);
                    auto qp = shift(q, eps), qm = shift(q, -eps);
                    return entry_max(pp[static_cast<size_t>(q)], pm[static_cast<size_t>(q)],
                                     qp[static_cast<size_t>(p)], qm[static_cast<size_t>(p)], eps);
                };
                double a0 = anti(eps0), a1 = anti(eps0 / 2);
                worst = std::max(worst, std::abs((4 * a1 - a0) / 3));
            }
    }
    return worst;
}

}  // namespace

double closedness_residual_h(const AffineForm& f, const std::vector<std::vector<Cplx>>& pts) {
    auto eval = [&](const std::vector<Cplx>& x) {
        std::vector<Cplx> a(x.begin(), x.end() - 1);
        return a_h_eval(f, a, x.back());
    };
    auto entry = [](const HVec& pq, const HVec& pm, const HVec& qp, const HVec& qm, double eps) {
        HVec dp = hvec_sub(pq, pm), dq = hvec_sub(qp, qm);
        HVec diff = hvec_sub(dp, dq);
        return hvec_norm(diff) / (2 * eps);
    };
    return closedness_scan(f.l + 1, pts, eval, entry);
}

double closedness_residual_sq(const AffineForm& f, const std::vector<std::vector<Cplx>>& pts) {
    auto eval = [&](const std::vector<Cplx>& x) {
        std::vector<Cplx> a(x.begin(), x.end() - 1);
        return a_sq_eval(f, a, x.back());
    };
    auto entry = [](const SqVec& pq, const SqVec& pm, const SqVec& qp, const SqVec& qm, double eps) {
        double m = 0.0;
        for (size_t x = 0; x < pq.q.size(); ++x)
            for (size_t y = 0; y < pq.q.size(); ++y)
                m = std::max(m, std::abs((pq.q[x][y] - pm.q[x][y]) - (qp.q[x][y] - qm.q[x][y])));
        return m / (2 * eps);
    };
    return closedness_scan(f.l + 1, pts, eval, entry);
}

namespace {

double mat_maxabs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

AffineResidueReport residue_check(const AffineForm& f, const IntegrableModule& m,
                                  const RootVectors& rv, Cplx hbar) {
    if (f.gcm.n != m.gcm.n || f.gcm.a != m.gcm.a) throw std::invalid_argument("mismatched data");
    if (f.l != 1) throw std::invalid_argument("rank one geometry only");
    if (m.depth < 1) throw std::invalid_argument("module too shallow");

    int n = m.dim;
    CMat h1 = CMat::Zero(n, n), h0 = CMat::Zero(n, n), dmat = CMat::Zero(n, n);
    for (int v = 0; v < n; ++v) {
        int b = m.block_of_index(v);
        h1(v, v) = m.weight_h(b, 1).get_d();
        h0(v, v) = m.weight_h(b, 0).get_d();
        dmat(v, v) = -static_cast<double>(m.contents[static_cast<size_t>(b)][0]);
    }
    CMat cd = h0 + h1;

    ConnectionForm form = casimir_form(m, rv, hbar);
    Cplx fac = 0.5 * form.h;
    std::vector<CMat> tmats;
    for (const auto& t : form.terms) tmats.push_back(complex_matrix(t.op));

    auto a_comp = [&](Cplx theta, Cplx dlt, bool along_delta) {
        CMat out = CMat::Zero(n, n);
        for (size_t t = 0; t < form.terms.size(); ++t) {
            double c0 = form.terms[t].alpha[0], c1 = form.terms[t].alpha[1];
            Cplx w = c0 * (dlt - theta) + c1 * theta;
            Cplx deriv = along_delta ? Cplx(c0, 0.0) : Cplx(c1 - c0, 0.0);
            out += (fac * deriv / w) * tmats[t];
        }
        return out;
    };
    auto h_op = [&](const HVec& v) {
        CMat out = v.h[0] * h1 + v.c * cd + v.d * dmat;
        return out;
    };
    auto sq_op = [&](const SqVec& s) {
        CMat out = s.q[0][0] * (h1 * h1) + (s.q[0][1] + s.q[1][0]) * (h1 * cd) + s.q[1][1] * (cd * cd);
        return out;
    };

    const int steps = 64;
    const double rad = 0.05;
    AffineResidueReport rep;

    {
        Cplx d0(1.1, 0.0);
        CMat acc = CMat::Zero(n, n), accs = CMat::Zero(n, n);
        for (int k = 0; k < steps; ++k) {
            double t = 2 * kPi * k / steps;
            Cplx theta = rad * Cplx(std::cos(t), std::sin(t));
            auto comps = a_h_eval(f, {theta}, d0);
            auto sq = a_sq_eval(f, {theta}, d0);
            CMat g = a_comp(theta, d0, false) + h_op(comps[0]);
            acc += theta * g;
            CMat gs = sq_op(sq[0]);
            accs += theta * gs;
        }
        acc /= static_cast<double>(steps);
        accs /= static_cast<double>(steps);
        CMat lad = complex_matrix(m.f_ops[1] * m.e_ops[1]);
        CMat tgt = hbar * lad + 0.5 * h1;
        CMat tgts = 0.5 * (h1 * h1);
        CMat dm = acc - tgt;
        CMat dms = accs - tgts;
        CMat dmf = acc + accs - tgt - tgts;
        rep.err_theta = mat_maxabs(dm);
        rep.err_sq = mat_maxabs(dms);
        rep.err_full = mat_maxabs(dmf);
    }

    {
        Cplx th0(0.6, 0.0);
        CMat acc = CMat::Zero(n, n), accs = CMat::Zero(n, n);
        for (int k = 0; k < steps; ++k) {
            double t = 2 * kPi * k / steps;
            Cplx dlt = th0 + rad * Cplx(std::cos(t), std::sin(t));
            auto comps = a_h_eval(f, {th0}, dlt);
            auto sq = a_sq_eval(f, {th0}, dlt);
            CMat g = a_comp(th0, dlt, true) + h_op(comps[1]);
            acc += (dlt - th0) * g;
            CMat gs = sq_op(sq[1]);
            accs += (dlt - th0) * gs;
        }
        acc /= static_cast<double>(steps);
        accs /= static_cast<double>(steps);
        CMat lad = complex_matrix(m.f_ops[0] * m.e_ops[0]);
        CMat tgt = hbar * lad + 0.5 * h0;
        CMat tgts = 0.5 * (h0 * h0);
        CMat dm = acc - tgt;
        CMat dms = accs - tgts;
        rep.err_zero = mat_maxabs(dm);
        rep.err_sq_zero = mat_maxabs(dms);
    }

    return rep;
}

}  // namespace kmc
