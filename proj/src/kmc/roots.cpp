#include "kmc/roots.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

namespace kmc {

namespace {

int height_of(const std::vector<int>& c) {
    int h = 0;
    for (int x : c) h += x;
    return h;
}

void enumerate_level(int n, int h, std::vector<int>& cur, int pos,
                     std::vector<std::vector<int>>& out) {
    if (pos == n - 1) {
        cur[pos] = h;
        out.push_back(cur);
        return;
    }
    for (int v = 0; v <= h; ++v) {
        cur[pos] = v;
        enumerate_level(n, h - v, cur, pos + 1, out);
    }
}

Rat two_rho_pairing(const GCM& g, const std::vector<int>& c) {
    Rat s = 0;
    for (int i = 0; i < g.n; ++i) s += Rat(2 * c[i]) * g.d[i];
    return s;
}

}  // namespace

int RootSlice::find(const std::vector<int>& c) const {
    for (size_t k = 0; k < roots.size(); ++k)
        if (roots[k].c == c) return static_cast<int>(k);
    return -1;
}

RootSlice generate_positive_roots(const GCM& g, int cutoff) {
    RootSlice slice;
    slice.gcm = g;
    slice.cutoff = cutoff;

    // Peterson recursion over the height filtration.
    std::map<std::vector<int>, Rat> cval;
    std::map<std::vector<int>, Rat> mult;
    std::vector<std::pair<std::vector<int>, Rat>> support;

    for (int h = 1; h <= cutoff; ++h) {
        std::vector<std::vector<int>> level;
        std::vector<int> cur(g.n, 0);
        enumerate_level(g.n, h, cur, 0, level);
        for (const auto& beta : level) {
            Rat divisor_sum = 0;
            for (int k = 2; k <= h; ++k) {
                bool div = true;
                std::vector<int> gamma(g.n);
                for (int i = 0; i < g.n; ++i) {
                    if (beta[i] % k != 0) { div = false; break; }
                    gamma[i] = beta[i] / k;
                }
                if (!div) continue;
                auto it = mult.find(gamma);
                if (it != mult.end()) divisor_sum += it->second / k;
            }
            Rat c, m;
            if (h == 1) {
                c = 1;
                m = 1;
            } else {
                Rat rhs = 0;
                for (const auto& [bp, cp] : support) {
                    std::vector<int> bq(g.n);
                    bool ok = true;
                    for (int i = 0; i < g.n; ++i) {
                        bq[i] = beta[i] - bp[i];
                        if (bq[i] < 0) { ok = false; break; }
                    }
                    if (!ok || height_of(bq) == 0) continue;
                    auto it = cval.find(bq);
                    if (it == cval.end()) continue;
                    rhs += g.form_roots(bp, bq) * cp * it->second;
                }
                Rat den = g.form_roots(beta, beta) - two_rho_pairing(g, beta);
                if (den == 0) {
                    // degenerate only off the root system: keep the divisor tail
                    if (rhs != 0) throw std::domain_error("degenerate multiplicity recursion");
                    m = 0;
                    c = divisor_sum;
                } else {
                    c = rhs / den;
                    m = c - divisor_sum;
                }
            }
            if (c != 0) {
                cval[beta] = c;
                support.emplace_back(beta, c);
            }
            if (m != 0) {
                if (m.get_den() != 1 || m < 0)
                    throw std::domain_error("non-integral root multiplicity");
                mult[beta] = m;
                Root r;
                r.c = beta;
                r.height = h;
                r.imaginary = g.form_roots(beta, beta) <= 0;
                r.mult = static_cast<int>(m.get_num().get_si());
                if (r.imaginary && g.kind == GCM::Kind::Indefinite)
                    throw std::domain_error("imaginary roots of indefinite type are not supported");
                slice.roots.push_back(std::move(r));
            }
        }
    }
    return slice;
}

std::vector<int> reflect_coeff(const GCM& g, int i, const std::vector<int>& c) {
    int pairing = 0;
    for (int j = 0; j < g.n; ++j) pairing += g.a[i][j] * c[j];
    std::vector<int> r = c;
    r[i] -= pairing;
    return r;
}

std::vector<std::vector<int>> real_roots_by_reflection(const GCM& g, int cutoff) {
    std::set<std::vector<int>> seen;
    std::queue<std::vector<int>> q;
    for (int i = 0; i < g.n; ++i) {
        std::vector<int> c(g.n, 0);
        c[i] = 1;
        seen.insert(c);
        q.push(c);
    }
    while (!q.empty()) {
        auto c = q.front();
        q.pop();
        for (int i = 0; i < g.n; ++i) {
            auto r = reflect_coeff(g, i, c);
            bool pos = true;
            for (int x : r)
                if (x < 0) { pos = false; break; }
            if (!pos || height_of(r) > cutoff || seen.count(r)) continue;
            seen.insert(r);
            q.push(r);
        }
    }
    return std::vector<std::vector<int>>(seen.begin(), seen.end());
}

int coxeter_label(const GCM& g, int i, int j) {
    int p = g.a[i][j] * g.a[j][i];
    switch (p) {
        case 0: return 2;
        case 1: return 3;
        case 2: return 4;
        case 3: return 6;
        default: return 0;
    }
}

namespace {

// Column j holds the image of alpha_j.
struct WeylMat {
    int n;
    std::vector<int> m;
    explicit WeylMat(int n_) : n(n_), m(static_cast<size_t>(n_) * n_, 0) {
        for (int i = 0; i < n; ++i) at(i, i) = 1;
    }
    int& at(int i, int j) { return m[static_cast<size_t>(i) * n + j]; }
    int at(int i, int j) const { return m[static_cast<size_t>(i) * n + j]; }

    std::vector<int> apply(const std::vector<int>& c) const {
        std::vector<int> r(n, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r[i] += at(i, j) * c[j];
        return r;
    }
};

// w -> w s_i
WeylMat extend(const GCM& g, const WeylMat& w, int i) {
    WeylMat r = w;
    for (int col = 0; col < w.n; ++col) {
        // s_i(alpha_col) = alpha_col - a[i][col] alpha_i
        for (int row = 0; row < w.n; ++row)
            r.at(row, col) = w.at(row, col) - g.a[i][col] * w.at(row, i);
    }
    return r;
}

bool column_positive(const WeylMat& w, int i) {
    bool nonzero = false;
    for (int row = 0; row < w.n; ++row) {
        if (w.at(row, i) < 0) return false;
        if (w.at(row, i) > 0) nonzero = true;
    }
    return nonzero;
}

void dfs_words(const GCM& g, const WeylMat& w, WeylWord& word, std::vector<WeylWord>& out) {
    bool terminal = true;
    for (int i = 0; i < g.n; ++i) {
        if (!column_positive(w, i)) continue;
        terminal = false;
        word.push_back(i);
        dfs_words(g, extend(g, w, i), word, out);
        word.pop_back();
    }
    if (terminal) out.push_back(word);
}

}  // namespace

BraidGraph reduced_expressions_w0(const GCM& g) {
    if (!g.is_finite()) throw std::invalid_argument("longest element needs finite type");
    BraidGraph bg;
    WeylMat id(g.n);
    WeylWord word;
    dfs_words(g, id, word, bg.words);
    if (bg.words.empty()) throw std::logic_error("no reduced words");
    size_t len = bg.words[0].size();
    for (const auto& w : bg.words)
        if (w.size() != len) throw std::logic_error("terminal words of unequal length");

    std::map<WeylWord, int> index;
    for (size_t k = 0; k < bg.words.size(); ++k) index[bg.words[k]] = static_cast<int>(k);
    std::set<std::pair<int, int>> edges;
    for (size_t k = 0; k < bg.words.size(); ++k) {
        const auto& u = bg.words[k];
        for (size_t p = 0; p + 1 < u.size(); ++p) {
            int i = u[p], j = u[p + 1];
            if (i == j) continue;
            int m = coxeter_label(g, i, j);
            if (m == 0 || p + m > u.size()) continue;
            bool alternating = true;
            for (int t = 0; t < m; ++t)
                if (u[p + t] != (t % 2 == 0 ? i : j)) { alternating = false; break; }
            if (!alternating) continue;
            WeylWord v = u;
            for (int t = 0; t < m; ++t) v[p + t] = (t % 2 == 0 ? j : i);
            auto it = index.find(v);
            if (it == index.end()) continue;
            int a = static_cast<int>(k), b = it->second;
            if (a > b) std::swap(a, b);
            if (a != b) edges.insert({a, b});
        }
    }
    bg.edges.assign(edges.begin(), edges.end());
    return bg;
}

bool edge_graph_connected(size_t nverts, const std::vector<std::pair<int, int>>& edges) {
    if (nverts == 0) return true;
    std::vector<std::vector<int>> adj(nverts);
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<bool> vis(nverts, false);
    std::queue<int> q;
    q.push(0);
    vis[0] = true;
    size_t cnt = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : adj[v])
            if (!vis[w]) {
                vis[w] = true;
                ++cnt;
                q.push(w);
            }
    }
    return cnt == nverts;
}

std::vector<InversionExponent> inversion_exponents(const GCM& g, const WeylWord& w) {
    std::vector<InversionExponent> out;
    WeylMat m(g.n);
    for (int letter : w) {
        if (letter < 0 || letter >= g.n) throw std::invalid_argument("bad letter");
        if (!column_positive(m, letter)) throw std::invalid_argument("word is not reduced");
        InversionExponent e;
        e.base = letter;
        e.exponent.resize(g.n);
        for (int row = 0; row < g.n; ++row) e.exponent[row] = m.at(row, letter);
        out.push_back(std::move(e));
        m = extend(g, m, letter);
    }
    return out;
}

std::vector<RatVec> ledger_canonical_form(const GCM& g, const WeylWord& w) {
    auto seq = inversion_exponents(g, w);
    std::vector<RatVec> form(g.n, RatVec(g.n, Rat(0)));
    for (const auto& e : seq)
        for (int i = 0; i < g.n; ++i) form[e.base][i] += e.exponent[i];
    return form;
}

std::vector<std::vector<int>> rank2_subsystems(const RootSlice& slice) {
    int nRoots = static_cast<int>(slice.roots.size());
    auto in_span = [&](const std::vector<int>& a, const std::vector<int>& b,
                       const std::vector<int>& x) {
        QMat m(3, slice.gcm.n);
        for (int j = 0; j < slice.gcm.n; ++j) {
            m(0, j) = a[j];
            m(1, j) = b[j];
            m(2, j) = x[j];
        }
        return rank(m) <= 2;
    };
    auto pair_rank2 = [&](const std::vector<int>& a, const std::vector<int>& b) {
        QMat m(2, slice.gcm.n);
        for (int j = 0; j < slice.gcm.n; ++j) {
            m(0, j) = a[j];
            m(1, j) = b[j];
        }
        return rank(m) == 2;
    };
    std::vector<std::vector<int>> classes;
    std::set<std::pair<int, int>> covered;
    for (int p = 0; p < nRoots; ++p)
        for (int q = p + 1; q < nRoots; ++q) {
            if (covered.count({p, q})) continue;
            if (!pair_rank2(slice.roots[p].c, slice.roots[q].c)) continue;
            std::vector<int> cls;
            for (int r = 0; r < nRoots; ++r)
                if (in_span(slice.roots[p].c, slice.roots[q].c, slice.roots[r].c))
                    cls.push_back(r);
            for (size_t x = 0; x < cls.size(); ++x)
                for (size_t y = x + 1; y < cls.size(); ++y) covered.insert({cls[x], cls[y]});
            classes.push_back(std::move(cls));
        }
    return classes;
}

}  // namespace kmc
