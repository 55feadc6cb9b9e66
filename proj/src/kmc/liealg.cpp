#include "kmc/liealg.hpp"

#include "kmc/module.hpp"

#include <algorithm>
#include <stdexcept>

namespace kmc {

namespace {

void prune(FreeElt& x) {
    for (auto it = x.words.begin(); it != x.words.end();) {
        if (it->second == 0)
            it = x.words.erase(it);
        else
            ++it;
    }
}

void add_scaled(FreeElt& x, const FreeElt& y, const Rat& s) {
    for (const auto& [w, c] : y.words) x.words[w] += c * s;
    prune(x);
}

// incremental row echelon over the rationals
struct Echelon {
    std::vector<std::pair<int, RatVec>> rows;

    bool insert(RatVec v) {
        for (const auto& [p, r] : rows) {
            if (v[p] == 0) continue;
            Rat f = v[p] / r[p];
            for (size_t k = 0; k < v.size(); ++k) v[k] -= f * r[k];
        }
        for (size_t k = 0; k < v.size(); ++k)
            if (v[k] != 0) {
                rows.push_back({static_cast<int>(k), std::move(v)});
                return true;
            }
        return false;
    }
};

RatVec apply_raise_word(VermaContext& ctx, const std::vector<int>& word,
                        std::vector<int> content, RatVec vec) {
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        int i = *it;
        const VermaBlock& blk = ctx.blocks.at(content);
        std::vector<int> low = content;
        --low[i];
        RatVec out(ctx.blocks.at(low).words.size(), Rat(0));
        for (size_t c = 0; c < vec.size(); ++c) {
            if (vec[c] == 0) continue;
            for (const auto& [row, coef] : blk.e_cols[i][c]) out[row] += coef * vec[c];
        }
        content = low;
        vec = std::move(out);
    }
    return vec;
}

}  // namespace

FreeElt bracket_word(int n, const std::vector<int>& seq) {
    FreeElt r;
    r.content.assign(n, 0);
    for (int s : seq) ++r.content[s];
    std::map<std::vector<int>, Rat> cur;
    cur[{seq[0]}] = 1;
    for (size_t k = 1; k < seq.size(); ++k) {
        std::map<std::vector<int>, Rat> nxt;
        for (const auto& [w, c] : cur) {
            std::vector<int> right = w;
            right.push_back(seq[k]);
            nxt[right] += c;
            std::vector<int> left;
            left.reserve(w.size() + 1);
            left.push_back(seq[k]);
            left.insert(left.end(), w.begin(), w.end());
            nxt[left] -= c;
        }
        cur = std::move(nxt);
    }
    r.words = std::move(cur);
    prune(r);
    return r;
}

const VermaBlock& VermaContext::ensure(const std::vector<int>& content) {
    auto found = blocks.find(content);
    if (found != blocks.end()) return found->second;
    int n = gcm.n;
    for (int i = 0; i < n; ++i)
        if (content[i] > 0) {
            auto low = content;
            --low[i];
            ensure(low);
        }

    VermaBlock blk;
    std::vector<int> w;
    for (int i = 0; i < n; ++i) w.insert(w.end(), content[i], i);
    do {
        blk.index[w] = static_cast<int>(blk.words.size());
        blk.words.push_back(w);
    } while (std::next_permutation(w.begin(), w.end()));
    int nw = static_cast<int>(blk.words.size());

    blk.e_cols.assign(n, {});
    for (int i = 0; i < n; ++i) {
        if (content[i] == 0) continue;
        auto low = content;
        --low[i];
        const VermaBlock& prev = blocks.at(low);
        blk.e_cols[i].assign(nw, {});
        for (int c = 0; c < nw; ++c) {
            const auto& word = blk.words[c];
            std::map<int, Rat> acc;
            for (size_t m = 0; m < word.size(); ++m) {
                if (word[m] != i) continue;
                Rat coef = hw[i];
                for (size_t p = m + 1; p < word.size(); ++p) coef -= gcm.a[i][word[p]];
                std::vector<int> rem;
                rem.reserve(word.size() - 1);
                for (size_t p = 0; p < word.size(); ++p)
                    if (p != m) rem.push_back(word[p]);
                acc[prev.index.at(rem)] += coef;
            }
            for (auto& [row, v] : acc)
                if (v != 0) blk.e_cols[i][c].push_back({row, v});
        }
    }

    blk.gram = QMat(nw, nw);
    int height = 0;
    for (int x : content) height += x;
    if (height == 0) {
        blk.gram(0, 0) = 1;
    } else {
        for (int r = 0; r < nw; ++r) {
            const auto& u = blk.words[r];
            int i = u[0];
            std::vector<int> rest(u.begin() + 1, u.end());
            auto low = content;
            --low[i];
            const VermaBlock& prev = blocks.at(low);
            int prow = prev.index.at(rest);
            for (int c = 0; c < nw; ++c) {
                Rat s = 0;
                for (const auto& [z, coef] : blk.e_cols[i][c]) s += prev.gram(prow, z) * coef;
                blk.gram(r, c) = s;
            }
        }
    }
    return blocks.emplace(content, std::move(blk)).first->second;
}

RootVectors construct_root_vectors(const GCM& g, const RootSlice& slice) {
    int n = g.n;
    RatVec generic(n);
    for (int i = 0; i < n; ++i) generic[i] = 1000003 + 30 * i;
    VermaContext gen(g, generic);
    std::vector<VermaContext> ind;
    ind.reserve(n);
    for (int j = 0; j < n; ++j) {
        RatVec e(n, Rat(0));
        e[j] = 1;
        ind.emplace_back(g, e);
    }

    RootVectors rv;
    rv.gcm = g;
    rv.slice = slice;
    for (const auto& root : slice.roots) {
        const VermaBlock& blk = gen.ensure(root.c);
        int nw = static_cast<int>(blk.words.size());

        RootSpaceVectors sp;
        sp.mult = root.mult;
        Echelon ech;
        int indep = 0;
        for (const auto& seq : blk.words) {
            FreeElt cand = bracket_word(n, seq);
            RatVec vec(nw, Rat(0));
            for (const auto& [w, c] : cand.words) vec[blk.index.at(w)] = c;
            RatVec img = mat_vec(blk.gram, vec);
            if (!ech.insert(std::move(img))) continue;
            ++indep;
            if (static_cast<int>(sp.lower_raw.size()) < root.mult) sp.lower_raw.push_back(cand);
        }
        if (indep != root.mult) throw std::runtime_error("root space dimension mismatch");

        sp.pairing = QMat(root.mult, root.mult);
        for (int k = 0; k < root.mult; ++k)
            for (int l = 0; l < root.mult; ++l) {
                Rat value;
                bool have = false;
                for (int j = 0; j < n; ++j) {
                    const VermaBlock& bj = ind[j].ensure(root.c);
                    RatVec vec(bj.words.size(), Rat(0));
                    for (const auto& [w, c] : sp.lower_raw[l].words) vec[bj.index.at(w)] = c;
                    Rat scalar = 0;
                    for (const auto& [w, c] : sp.lower_raw[k].words) {
                        RatVec down = apply_raise_word(ind[j], w, root.c, vec);
                        scalar += c * down[0];
                    }
                    Rat tcoord = Rat(root.c[j]) * g.d[j];
                    if (tcoord == 0) {
                        if (scalar != 0)
                            throw std::runtime_error("pairing not proportional to t_alpha");
                        continue;
                    }
                    Rat ratio = scalar / tcoord;
                    if (have && ratio != value)
                        throw std::runtime_error("pairing not proportional to t_alpha");
                    value = ratio;
                    have = true;
                }
                if (!have) throw std::runtime_error("empty root content");
                sp.pairing(k, l) = value;
            }

        auto pinv = inverse(sp.pairing);
        if (!pinv) throw std::runtime_error("degenerate invariant pairing at a root space");
        for (int j = 0; j < root.mult; ++j) {
            FreeElt dual;
            dual.content = root.c;
            for (int l = 0; l < root.mult; ++l) add_scaled(dual, sp.lower_raw[l], (*pinv)(l, j));
            sp.lower_dual.push_back(std::move(dual));
        }
        rv.spaces.push_back(std::move(sp));
    }
    return rv;
}

QMat module_word_op(const IntegrableModule& m, const FreeElt& x, bool raising) {
    QMat total(m.dim, m.dim);
    for (const auto& [w, coef] : x.words) {
        QMat cur = QMat::identity(m.dim);
        for (int l : w) cur = cur * (raising ? m.e_ops[l] : m.f_ops[l]);
        total = total + cur.scaled(coef);
    }
    return total;
}

QMat casimir_truncated(const IntegrableModule& m, const RootVectors& rv, int root_index) {
    if (root_index < 0 || root_index >= static_cast<int>(rv.spaces.size()))
        throw std::invalid_argument("root index outside the slice");
    const RootSpaceVectors& sp = rv.spaces[root_index];
    if (static_cast<int>(sp.lower_dual.size()) != sp.mult)
        throw std::invalid_argument("missing dual basis certification");
    QMat total(m.dim, m.dim);
    for (int i = 0; i < sp.mult; ++i)
        total = total + module_word_op(m, sp.lower_dual[i], false) *
                            module_word_op(m, sp.lower_raw[i], true);
    return total.scaled(2);
}

}  // namespace kmc
