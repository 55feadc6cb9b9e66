#include "kmc/module.hpp"

#include "kmc/roots.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace kmc {

namespace {

struct BlockPivots {
    std::vector<int> prows, pcols;
    QMat ginv;
};

// Row and column pivots of the gram matrix; the pivot minor is invertible.
BlockPivots pivot_data(const QMat& g) {
    QMat m = g;
    std::vector<int> rowperm(m.rows);
    std::iota(rowperm.begin(), rowperm.end(), 0);
    BlockPivots out;
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int sel = -1;
        for (int i = r; i < m.rows; ++i)
            if (m(i, c) != 0) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        if (sel != r) {
            for (int j = 0; j < m.cols; ++j) std::swap(m(r, j), m(sel, j));
            std::swap(rowperm[r], rowperm[sel]);
        }
        for (int i = r + 1; i < m.rows; ++i) {
            if (m(i, c) == 0) continue;
            Rat f = m(i, c) / m(r, c);
            for (int j = c; j < m.cols; ++j) m(i, j) -= f * m(r, j);
        }
        out.prows.push_back(rowperm[r]);
        out.pcols.push_back(c);
        ++r;
    }
    int nr = static_cast<int>(out.prows.size());
    QMat sub(nr, nr);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nr; ++j) sub(i, j) = g(out.prows[i], out.pcols[j]);
    auto inv = inverse(sub);
    if (!inv) throw std::runtime_error("gram pivot minor not invertible");
    out.ginv = *inv;
    return out;
}

// L-basis coordinates of a sparse word vector, via pairings against pivot rows.
RatVec coords_of(const QMat& gram, const BlockPivots& bp,
                 const std::vector<std::pair<int, Rat>>& vec) {
    int r = static_cast<int>(bp.prows.size());
    RatVec rhs(r, Rat(0));
    for (int p = 0; p < r; ++p)
        for (const auto& [z, coef] : vec) rhs[p] += gram(bp.prows[p], z) * coef;
    return mat_vec(bp.ginv, rhs);
}

int height_of(const std::vector<int>& c) {
    int h = 0;
    for (int x : c) h += x;
    return h;
}

}  // namespace

int IntegrableModule::block_of(const std::vector<int>& content) const {
    for (size_t b = 0; b < contents.size(); ++b)
        if (contents[b] == content) return static_cast<int>(b);
    return -1;
}

int IntegrableModule::block_of_index(int global) const {
    for (size_t b = 0; b < contents.size(); ++b)
        if (global < block_offset[b] + dims[b]) return static_cast<int>(b);
    return -1;
}

Rat IntegrableModule::weight_h(int b, int i) const {
    Rat v = hw[i];
    for (int j = 0; j < gcm.n; ++j) v -= Rat(contents[b][j]) * gcm.a[i][j];
    return v;
}

Rat IntegrableModule::weight_pair_root(int b, const std::vector<int>& alpha) const {
    Rat v = 0;
    for (int j = 0; j < gcm.n; ++j) v += Rat(alpha[j]) * gcm.d[j] * weight_h(b, j);
    return v;
}

IntegrableModule build_irrep(const GCM& g, const std::vector<int>& hw, int depth) {
    if (static_cast<int>(hw.size()) != g.n)
        throw std::invalid_argument("highest weight size mismatch");
    for (int x : hw)
        if (x < 0) throw std::invalid_argument("highest weight must be dominant integral");
    if (g.is_affine() && depth < 0)
        throw std::invalid_argument("affine module construction requires a depth");
    if (!g.is_affine() && !g.is_finite())
        throw std::invalid_argument("indefinite type modules are not supported");

    std::vector<int> box;
    if (g.is_finite()) {
        auto bg = reduced_expressions_w0(g);
        RatVec mu(hw.begin(), hw.end());
        const WeylWord& w0 = bg.words.front();
        for (auto it = w0.rbegin(); it != w0.rend(); ++it) {
            Rat mi = mu[*it];
            for (int j = 0; j < g.n; ++j) mu[j] -= mi * g.a[j][*it];
        }
        QMat A(g.n, g.n);
        RatVec rhs(g.n);
        for (int j = 0; j < g.n; ++j) {
            rhs[j] = Rat(hw[j]) - mu[j];
            for (int i = 0; i < g.n; ++i) A(j, i) = g.a[j][i];
        }
        auto k = solve(A, rhs);
        if (!k) throw std::runtime_error("finite cartan matrix not invertible");
        for (const Rat& v : *k) {
            if (v.get_den() != 1 || v < 0) throw std::runtime_error("bad support box");
            box.push_back(static_cast<int>(v.get_num().get_si()));
        }
    }

    VermaContext ctx(g, RatVec(hw.begin(), hw.end()));
    std::map<std::vector<int>, BlockPivots> info;
    std::set<std::vector<int>> level = {std::vector<int>(g.n, 0)};
    while (!level.empty()) {
        std::set<std::vector<int>> next;
        for (const auto& c : level) {
            const VermaBlock& blk = ctx.ensure(c);
            BlockPivots bp = pivot_data(blk.gram);
            if (bp.pcols.empty()) continue;
            info.emplace(c, std::move(bp));
            for (int i = 0; i < g.n; ++i) {
                auto up = c;
                ++up[i];
                if (!box.empty() && up[i] > box[i]) continue;
                if (g.is_affine() && up[0] > depth) continue;
                next.insert(up);
            }
        }
        level = std::move(next);
    }

    IntegrableModule m;
    m.gcm = g;
    m.hw = hw;
    m.depth = g.is_affine() ? depth : -1;
    for (const auto& [c, bp] : info) m.contents.push_back(c);
    std::sort(m.contents.begin(), m.contents.end(), [](const auto& a, const auto& b) {
        int ha = height_of(a), hb = height_of(b);
        if (ha != hb) return ha < hb;
        return a < b;
    });
    for (const auto& c : m.contents) {
        m.block_offset.push_back(m.dim);
        int d = static_cast<int>(info.at(c).pcols.size());
        m.dims.push_back(d);
        m.dim += d;
    }

    for (int i = 0; i < g.n; ++i) {
        m.e_ops.emplace_back(m.dim, m.dim);
        m.f_ops.emplace_back(m.dim, m.dim);
    }
    for (size_t b = 0; b < m.contents.size(); ++b) {
        const auto& c = m.contents[b];
        const VermaBlock& blk = ctx.blocks.at(c);
        const BlockPivots& bp = info.at(c);
        for (int i = 0; i < g.n; ++i) {
            // f_i: prepend the letter, then express in the target basis
            auto up = c;
            ++up[i];
            int tb = m.block_of(up);
            if (tb >= 0) {
                const VermaBlock& tblk = ctx.blocks.at(up);
                const BlockPivots& tbp = info.at(up);
                for (int k = 0; k < m.dims[b]; ++k) {
                    std::vector<int> word = blk.words[bp.pcols[k]];
                    word.insert(word.begin(), i);
                    RatVec x = coords_of(tblk.gram, tbp, {{tblk.index.at(word), Rat(1)}});
                    for (size_t r = 0; r < x.size(); ++r)
                        m.f_ops[i](m.block_offset[tb] + static_cast<int>(r),
                                   m.block_offset[b] + k) = x[r];
                }
            }
            // e_i: word-space raising, then express in the target basis
            if (c[i] > 0) {
                auto down = c;
                --down[i];
                int db = m.block_of(down);
                if (db < 0) continue;
                const VermaBlock& dblk = ctx.blocks.at(down);
                const BlockPivots& dbp = info.at(down);
                for (int k = 0; k < m.dims[b]; ++k) {
                    RatVec x = coords_of(dblk.gram, dbp, blk.e_cols[i][bp.pcols[k]]);
                    for (size_t r = 0; r < x.size(); ++r)
                        m.e_ops[i](m.block_offset[db] + static_cast<int>(r),
                                   m.block_offset[b] + k) = x[r];
                }
            }
        }
    }
    return m;
}

QMat tits_operator(const IntegrableModule& m, int i) {
    if (i < 0 || i >= m.gcm.n) throw std::invalid_argument("generator index out of range");
    if (m.depth >= 0 && i == 0)
        throw std::invalid_argument("tits operator is not truncation exact on the affine vertex");
    auto expnil = [&](const QMat& x) {
        QMat s = QMat::identity(m.dim);
        QMat term = QMat::identity(m.dim);
        for (int k = 1; k <= m.dim + 1; ++k) {
            term = (term * x).scaled(Rat(1, k));
            if (term.is_zero()) return s;
            if (k == m.dim + 1)
                throw std::runtime_error("non-nilpotent action, module not integrable here");
            s = s + term;
        }
        return s;
    };
    return expnil(m.e_ops[i]) * expnil(m.f_ops[i].scaled(-1)) * expnil(m.e_ops[i]);
}

nlohmann::json module_to_json(const IntegrableModule& m) {
    nlohmann::json j;
    j["version"] = 1;
    j["cartan"] = m.gcm.a;
    j["hw"] = m.hw;
    j["depth"] = m.depth;
    j["contents"] = m.contents;
    j["dims"] = m.dims;
    auto dump = [&](const std::vector<QMat>& ops) {
        nlohmann::json arr = nlohmann::json::array();
        for (const QMat& op : ops) {
            std::vector<std::string> entries;
            entries.reserve(op.a.size());
            for (const Rat& v : op.a) entries.push_back(v.get_str());
            arr.push_back(entries);
        }
        return arr;
    };
    j["e"] = dump(m.e_ops);
    j["f"] = dump(m.f_ops);
    return j;
}

IntegrableModule module_from_json(const nlohmann::json& j) {
    if (j.at("version").get<int>() != 1) throw std::invalid_argument("unknown bundle version");
    IntegrableModule m;
    m.gcm = GCM::from_matrix(j.at("cartan").get<std::vector<std::vector<int>>>());
    m.hw = j.at("hw").get<std::vector<int>>();
    m.depth = j.at("depth").get<int>();
    m.contents = j.at("contents").get<std::vector<std::vector<int>>>();
    m.dims = j.at("dims").get<std::vector<int>>();
    m.dim = 0;
    for (int d : m.dims) {
        m.block_offset.push_back(m.dim);
        m.dim += d;
    }
    auto load = [&](const nlohmann::json& arr) {
        std::vector<QMat> ops;
        for (const auto& entry : arr) {
            auto strs = entry.get<std::vector<std::string>>();
            QMat op(m.dim, m.dim);
            for (size_t k = 0; k < strs.size(); ++k) {
                op.a[k] = Rat(strs[k]);
                op.a[k].canonicalize();
            }
            ops.push_back(std::move(op));
        }
        return ops;
    };
    m.e_ops = load(j.at("e"));
    m.f_ops = load(j.at("f"));
    return m;
}

}  // namespace kmc
