#include "kmc/holonomy.hpp"

#include "kmc/roots.hpp"

#include <stdexcept>
#include <utility>

namespace kmc {

namespace {

void validate_gen(int n, const DHGen& g) {
    switch (g.kind) {
        case DHGen::Kind::Omega:
        case DHGen::Kind::OmegaAlpha:
            if (g.i < 1 || g.j <= g.i || g.j > n) throw std::invalid_argument("bad strand pair");
            if (g.kind == DHGen::Kind::OmegaAlpha) {
                if (g.root < -1) throw std::invalid_argument("bad root component");
                if (g.root == -1 && g.neg)
                    throw std::invalid_argument("zero weight slot has no sign");
            }
            break;
        case DHGen::Kind::KWindow:
            if (g.root < 0) throw std::invalid_argument("window needs a slice root");
            if (g.win_start < 1 || g.win_len < 1 || g.win_start + g.win_len - 1 > n)
                throw std::invalid_argument("window outside the strand range");
            break;
    }
}

using GenSum = std::vector<std::pair<DHGen, Rat>>;

GenSum face_gen(int n, int k, const DHGen& g) {
    auto lifts = [&](int s) {
        std::vector<int> out;
        if (k == 0) {
            out.push_back(s + 1);
        } else if (k == n + 1) {
            out.push_back(s);
        } else if (s < k) {
            out.push_back(s);
        } else if (s == k) {
            out.push_back(k);
            out.push_back(k + 1);
        } else {
            out.push_back(s + 1);
        }
        return out;
    };
    GenSum out;
    if (g.kind == DHGen::Kind::KWindow) {
        DHGen h = g;
        int lo = g.win_start, hi = g.win_start + g.win_len - 1;
        if (k == 0 || (k >= 1 && k <= n && k < lo)) {
            h.win_start = lo + 1;
        } else if (k >= 1 && k <= n && k <= hi) {
            h.win_len = g.win_len + 1;
        }
        out.emplace_back(h, Rat(1));
        return out;
    }
    for (int ii : lifts(g.i))
        for (int jj : lifts(g.j)) {
            DHGen h = g;
            h.i = ii;
            h.j = jj;
            out.emplace_back(h, Rat(1));
        }
    return out;
}

GenSum degeneracy_gen([[maybe_unused]] int n, int k, const DHGen& g) {
    GenSum out;
    if (g.kind == DHGen::Kind::KWindow) {
        DHGen h = g;
        int lo = g.win_start, hi = g.win_start + g.win_len - 1;
        if (k < lo) {
            h.win_start = lo - 1;
        } else if (k <= hi) {
            if (g.win_len == 1) return out;
            h.win_len = g.win_len - 1;
        }
        out.emplace_back(h, Rat(1));
        return out;
    }
    if (k == g.i || k == g.j) return out;
    DHGen h = g;
    h.i = g.i - (g.i > k ? 1 : 0);
    h.j = g.j - (g.j > k ? 1 : 0);
    out.emplace_back(h, Rat(1));
    return out;
}

DHElement map_element(int n, int k, const DHElement& x, int out_strands,
                      GenSum (*rule)(int, int, const DHGen&)) {
    if (x.strands != n) throw std::invalid_argument("strand count mismatch");
    DHElement res;
    res.strands = out_strands;
    for (const auto& [word, coef] : x.terms) {
        std::vector<std::pair<DHWord, Rat>> acc;
        acc.emplace_back(DHWord{}, coef);
        for (const DHGen& g : word) {
            GenSum imgs = rule(n, k, g);
            std::vector<std::pair<DHWord, Rat>> next;
            for (const auto& [w, c] : acc)
                for (const auto& [h, s] : imgs) {
                    DHWord nw = w;
                    nw.push_back(h);
                    next.emplace_back(std::move(nw), c * s);
                }
            acc = std::move(next);
            if (acc.empty()) break;
        }
        for (auto& [w, c] : acc) res.terms[w] += c;
    }
    for (auto it = res.terms.begin(); it != res.terms.end();)
        it = (it->second == 0) ? res.terms.erase(it) : std::next(it);
    return res;
}

}  // namespace

DHGen omega(int i, int j) {
    DHGen g;
    g.kind = DHGen::Kind::Omega;
    g.i = i;
    g.j = j;
    return g;
}

DHGen omega_alpha(int i, int j, int root, bool neg) {
    DHGen g;
    g.kind = DHGen::Kind::OmegaAlpha;
    g.i = i;
    g.j = j;
    g.root = root;
    g.neg = neg;
    return g;
}

DHGen k_window(int root, int start, int len) {
    DHGen g;
    g.kind = DHGen::Kind::KWindow;
    g.root = root;
    g.win_start = start;
    g.win_len = len;
    return g;
}

DHElement dh_generator(int n, const DHGen& g) {
    validate_gen(n, g);
    DHElement e;
    e.strands = n;
    e.terms[{g}] = 1;
    return e;
}

DHElement dh_add(const DHElement& a, const DHElement& b) {
    if (a.strands != b.strands) throw std::invalid_argument("strand count mismatch");
    DHElement res = a;
    for (const auto& [w, c] : b.terms) res.terms[w] += c;
    for (auto it = res.terms.begin(); it != res.terms.end();)
        it = (it->second == 0) ? res.terms.erase(it) : std::next(it);
    return res;
}

DHElement dh_scale(const DHElement& a, const Rat& s) {
    DHElement res;
    res.strands = a.strands;
    if (s == 0) return res;
    for (const auto& [w, c] : a.terms) res.terms[w] = c * s;
    return res;
}

DHElement dh_mul(const DHElement& a, const DHElement& b) {
    if (a.strands != b.strands) throw std::invalid_argument("strand count mismatch");
    DHElement res;
    res.strands = a.strands;
    for (const auto& [wa, ca] : a.terms)
        for (const auto& [wb, cb] : b.terms) {
            DHWord w = wa;
            w.insert(w.end(), wb.begin(), wb.end());
            res.terms[w] += ca * cb;
        }
    for (auto it = res.terms.begin(); it != res.terms.end();)
        it = (it->second == 0) ? res.terms.erase(it) : std::next(it);
    return res;
}

DHElement face_map(int n, int k, const DHElement& x) {
    if (k < 0 || k > n + 1) throw std::invalid_argument("face index outside range");
    for (const auto& [word, coef] : x.terms)
        for (const DHGen& g : word) validate_gen(n, g);
    return map_element(n, k, x, n + 1, face_gen);
}

DHElement degeneracy_map(int n, int k, const DHElement& x) {
    if (k < 1 || k > n) throw std::invalid_argument("degeneracy index outside range");
    for (const auto& [word, coef] : x.terms)
        for (const DHGen& g : word) validate_gen(n, g);
    return map_element(n, k, x, n - 1, degeneracy_gen);
}

QMat xi_place(const QMat& a, int strand, int n) {
    if (a.rows != a.cols) throw std::invalid_argument("square factor required");
    if (strand < 1 || strand > n) throw std::invalid_argument("strand outside range");
    QMat res = QMat::identity(1);
    for (int s = 1; s <= n; ++s) res = res.kron(s == strand ? a : QMat::identity(a.rows));
    return res;
}

namespace {

QMat omega_zero_pair(const IntegrableModule& m, int n, int i, int j) {
    int r = m.gcm.n;
    QMat gram(r, r);
    for (int p = 0; p < r; ++p)
        for (int q = 0; q < r; ++q) gram(p, q) = Rat(m.gcm.a[q][p]) / m.gcm.d[p];
    auto inv = inverse(gram);
    if (!inv) throw std::invalid_argument("zero weight slot needs a nondegenerate Cartan form");
    std::vector<QMat> hdiag(r, QMat(m.dim, m.dim));
    for (int p = 0; p < r; ++p)
        for (int b = 0; b < static_cast<int>(m.contents.size()); ++b)
            for (int l = 0; l < m.block_dim(b); ++l)
                hdiag[p](m.block_offset[b] + l, m.block_offset[b] + l) = m.weight_h(b, p);
    int total_dim = 1;
    for (int s = 0; s < n; ++s) total_dim *= m.dim;
    QMat total(total_dim, total_dim);
    for (int p = 0; p < r; ++p)
        for (int q = 0; q < r; ++q) {
            if ((*inv)(p, q) == 0) continue;
            total = total + (xi_place(hdiag[p], i, n) * xi_place(hdiag[q], j, n)).scaled((*inv)(p, q));
        }
    return total;
}

QMat omega_alpha_pair(const IntegrableModule& m, const RootVectors& rv, int n, int i, int j,
                      int root, bool neg) {
    const RootSpaceVectors& sp = rv.spaces.at(static_cast<size_t>(root));
    int total_dim = 1;
    for (int s = 0; s < n; ++s) total_dim *= m.dim;
    QMat total(total_dim, total_dim);
    for (int a = 0; a < sp.mult; ++a) {
        QMat up = module_word_op(m, sp.lower_raw[a], true);
        QMat down = module_word_op(m, sp.lower_dual[a], false);
        if (!neg)
            total = total + xi_place(up, i, n) * xi_place(down, j, n);
        else
            total = total + xi_place(down, i, n) * xi_place(up, j, n);
    }
    return total;
}

}  // namespace

QMat xi_image(const IntegrableModule& m, const RootVectors& rv, int n, const Rat& hbar,
              const DHGen& g) {
    validate_gen(n, g);
    switch (g.kind) {
        case DHGen::Kind::OmegaAlpha:
            if (g.root == -1) return omega_zero_pair(m, n, g.i, g.j).scaled(hbar);
            return omega_alpha_pair(m, rv, n, g.i, g.j, g.root, g.neg).scaled(hbar);
        case DHGen::Kind::Omega: {
            QMat total = omega_zero_pair(m, n, g.i, g.j);
            for (size_t r = 0; r < rv.spaces.size(); ++r) {
                total = total + omega_alpha_pair(m, rv, n, g.i, g.j, static_cast<int>(r), false);
                total = total + omega_alpha_pair(m, rv, n, g.i, g.j, static_cast<int>(r), true);
            }
            return total.scaled(hbar);
        }
        case DHGen::Kind::KWindow: {
            const RootSpaceVectors& sp = rv.spaces.at(static_cast<size_t>(g.root));
            int total_dim = 1;
            for (int s = 0; s < n; ++s) total_dim *= m.dim;
            QMat total(total_dim, total_dim);
            for (int a = 0; a < sp.mult; ++a) {
                QMat up = module_word_op(m, sp.lower_raw[a], true);
                QMat down = module_word_op(m, sp.lower_dual[a], false);
                QMat lsum(total_dim, total_dim), rsum(total_dim, total_dim);
                for (int s = g.win_start; s < g.win_start + g.win_len; ++s) {
                    lsum = lsum + xi_place(down, s, n);
                    rsum = rsum + xi_place(up, s, n);
                }
                total = total + lsum * rsum;
            }
            return total.scaled(hbar);
        }
    }
    throw std::logic_error("unreachable");
}

QMat xi_image_elt(const IntegrableModule& m, const RootVectors& rv, const Rat& hbar,
                  const DHElement& x) {
    int total_dim = 1;
    for (int s = 0; s < x.strands; ++s) total_dim *= m.dim;
    QMat total(total_dim, total_dim);
    for (const auto& [word, coef] : x.terms) {
        QMat cur = QMat::identity(total_dim);
        for (const DHGen& g : word) cur = cur * xi_image(m, rv, x.strands, hbar, g);
        total = total + cur.scaled(coef);
    }
    return total;
}

TTReport relation_check_tt(const IntegrableModule& m, const RootVectors& rv) {
    const RootSlice& slice = rv.slice;
    auto classes = rank2_subsystems(slice);
    if (classes.empty() && !slice.roots.empty()) {
        std::vector<int> all(slice.roots.size());
        for (size_t r = 0; r < all.size(); ++r) all[r] = static_cast<int>(r);
        classes.push_back(std::move(all));
    }

    std::vector<QMat> kmats;
    kmats.reserve(rv.spaces.size());
    for (size_t r = 0; r < rv.spaces.size(); ++r)
        kmats.push_back(casimir_truncated(m, rv, static_cast<int>(r)));

    std::vector<int> cols;
    for (int b = 0; b < static_cast<int>(m.contents.size()); ++b) {
        int height = 0;
        for (int c : m.contents[b]) height += c;
        if (height > slice.cutoff) continue;
        for (int l = 0; l < m.block_dim(b); ++l) cols.push_back(m.block_offset[b] + l);
    }

    TTReport rep;
    rep.checked_columns = static_cast<int>(cols.size());
    for (const auto& cls : classes) {
        QMat sum(m.dim, m.dim);
        for (int r : cls) sum = sum + kmats[r];
        TTClassReport crep;
        for (int r : cls) crep.roots.push_back(slice.roots[r].c);
        Rat max_abs = 0;
        for (int r : cls) {
            QMat c = commutator(kmats[r], sum);
            for (int col : cols)
                for (int row = 0; row < m.dim; ++row) {
                    Rat v = abs(c(row, col));
                    if (v > max_abs) max_abs = v;
                }
        }
        crep.max_abs = max_abs.get_str();
        crep.pass = (max_abs == 0);
        rep.all_pass = rep.all_pass && crep.pass;
        rep.classes.push_back(std::move(crep));
    }
    return rep;
}

nlohmann::json tt_report_json(const TTReport& rep) {
    nlohmann::json j;
    j["relation"] = "rank2-commutators";
    j["all_pass"] = rep.all_pass;
    j["checked_columns"] = rep.checked_columns;
    j["classes"] = nlohmann::json::array();
    for (const auto& c : rep.classes) {
        nlohmann::json jc;
        jc["roots"] = c.roots;
        jc["max_abs"] = c.max_abs;
        jc["pass"] = c.pass;
        j["classes"].push_back(jc);
    }
    return j;
}

}  // namespace kmc
