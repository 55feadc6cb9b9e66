#include "kmc/gcm.hpp"

#include <numeric>
#include <queue>
#include <stdexcept>

namespace kmc {

namespace {

// Definiteness of the symmetrized matrix decides the kind.
GCM::Kind classify(const GCM& g) {
    int n = g.n;
    QMat b(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = g.d[i] * g.a[i][j];
    bool singular = false;
    for (int k = 0; k < n; ++k) {
        if (b(k, k) > 0) {
            for (int i = k + 1; i < n; ++i) {
                if (b(i, k) == 0) continue;
                Rat f = b(i, k) / b(k, k);
                for (int j = k; j < n; ++j) b(i, j) -= f * b(k, j);
            }
        } else if (b(k, k) == 0) {
            for (int j = k + 1; j < n; ++j)
                if (b(k, j) != 0) return GCM::Kind::Indefinite;
            singular = true;
        } else {
            return GCM::Kind::Indefinite;
        }
    }
    return singular ? GCM::Kind::Affine : GCM::Kind::Finite;
}

}  // namespace

GCM GCM::from_matrix(std::vector<std::vector<int>> rows) {
    GCM g;
    g.n = static_cast<int>(rows.size());
    g.a = std::move(rows);
    for (int i = 0; i < g.n; ++i) {
        if (static_cast<int>(g.a[i].size()) != g.n) throw std::invalid_argument("not square");
        if (g.a[i][i] != 2) throw std::invalid_argument("diagonal must be 2");
        for (int j = 0; j < g.n; ++j) {
            if (i != j && g.a[i][j] > 0) throw std::invalid_argument("positive off-diagonal");
            if ((g.a[i][j] == 0) != (g.a[j][i] == 0))
                throw std::invalid_argument("zero pattern not symmetric");
        }
    }

    // d_i a_ij = d_j a_ji, propagated over each connected component,
    // then cleared to the minimal positive integers.
    std::vector<Rat> d(g.n, Rat(0));
    for (int s = 0; s < g.n; ++s) {
        if (d[s] != 0) continue;
        d[s] = 1;
        std::queue<int> q;
        q.push(s);
        std::vector<int> comp;
        while (!q.empty()) {
            int i = q.front();
            q.pop();
            comp.push_back(i);
            for (int j = 0; j < g.n; ++j) {
                if (i == j || g.a[i][j] == 0) continue;
                Rat dj = d[i] * g.a[i][j] / g.a[j][i];
                if (d[j] == 0) {
                    d[j] = dj;
                    q.push(j);
                } else if (d[j] != dj) {
                    throw std::invalid_argument("matrix is not symmetrizable");
                }
            }
        }
        mpz_class lcm_den = 1;
        for (int i : comp) lcm_den = lcm(lcm_den, d[i].get_den());
        mpz_class gcd_num = 0;
        for (int i : comp) gcd_num = gcd(gcd_num, mpz_class(d[i].get_num() * (lcm_den / d[i].get_den())));
        for (int i : comp) d[i] = d[i] * lcm_den / gcd_num;
    }
    g.d = std::move(d);
    g.kind = classify(g);
    return g;
}

GCM GCM::preset(const std::string& name) {
    if (name == "A1") return from_matrix({{2}});
    if (name == "A2") return from_matrix({{2, -1}, {-1, 2}});
    if (name == "A3") return from_matrix({{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}});
    if (name == "B2") return from_matrix({{2, -2}, {-1, 2}});
    if (name == "G2") return from_matrix({{2, -3}, {-1, 2}});
    if (name == "A1xA1") return from_matrix({{2, 0}, {0, 2}});
    if (name == "A1aff") return from_matrix({{2, -2}, {-2, 2}});
    if (name == "A2aff") return from_matrix({{2, -1, -1}, {-1, 2, -1}, {-1, -1, 2}});
    throw std::invalid_argument("unknown preset: " + name);
}

Rat GCM::form_roots(const std::vector<int>& b, const std::vector<int>& c) const {
    Rat s = 0;
    for (int i = 0; i < n; ++i) {
        if (b[i] == 0) continue;
        for (int j = 0; j < n; ++j)
            if (c[j] != 0) s += Rat(b[i]) * d[i] * a[i][j] * c[j];
    }
    return s;
}

}  // namespace kmc
