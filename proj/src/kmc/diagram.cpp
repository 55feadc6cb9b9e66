#include "kmc/diagram.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace kmc {

namespace {

bool contains(const VSet& a, int v) { return std::binary_search(a.begin(), a.end(), v); }

bool subset_of(const VSet& a, const VSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool disjoint(const VSet& a, const VSet& b) {
    VSet tmp;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(tmp));
    return tmp.empty();
}

bool orthogonal(const Diagram& d, const VSet& a, const VSet& b) {
    if (!disjoint(a, b)) return false;
    for (int x : a)
        for (int y : b)
            if (d.adjacent(x, y)) return false;
    return true;
}

bool member_less(const VSet& a, const VSet& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a < b;
}

std::vector<VSet> canonical(std::vector<VSet> members) {
    std::sort(members.begin(), members.end(), member_less);
    return members;
}

void components_of(const Diagram& d, const VSet& within, std::vector<VSet>& out) {
    std::set<int> todo(within.begin(), within.end());
    while (!todo.empty()) {
        int seed = *todo.begin();
        VSet comp;
        std::vector<int> stack = {seed};
        todo.erase(seed);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            comp.push_back(v);
            for (auto it = todo.begin(); it != todo.end();) {
                if (d.adjacent(v, *it)) {
                    stack.push_back(*it);
                    it = todo.erase(it);
                } else {
                    ++it;
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    std::sort(out.begin(), out.end());
}

}  // namespace

Diagram make_diagram(int n, const std::vector<std::pair<int, int>>& edges) {
    Diagram d;
    for (int i = 0; i < n; ++i) d.verts.push_back(i);
    for (auto [a, b] : edges) {
        if (a == b || a < 0 || b < 0 || a >= n || b >= n)
            throw std::invalid_argument("bad edge");
        if (a > b) std::swap(a, b);
        d.edges.insert({a, b});
    }
    return d;
}

Diagram diagram_from_gcm(const GCM& g) {
    Diagram d;
    for (int i = 0; i < g.n; ++i) d.verts.push_back(i);
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j)
            if (g.a[i][j] != 0) d.edges.insert({i, j});
    return d;
}

Diagram induced_diagram(const Diagram& d, const VSet& verts) {
    Diagram r;
    r.verts = verts;
    std::sort(r.verts.begin(), r.verts.end());
    for (auto [a, b] : d.edges)
        if (contains(r.verts, a) && contains(r.verts, b)) r.edges.insert({a, b});
    return r;
}

std::vector<VSet> diagram_components(const Diagram& d) {
    std::vector<VSet> out;
    components_of(d, d.verts, out);
    return out;
}

bool subset_connected(const Diagram& d, const VSet& s) {
    if (s.empty()) return false;
    std::vector<VSet> comps;
    components_of(d, s, comps);
    return comps.size() == 1;
}

NestedVerdict is_nested_set(const Diagram& d, const std::vector<VSet>& members_in) {
    std::set<VSet> members;
    for (auto m : members_in) {
        std::sort(m.begin(), m.end());
        if (m.empty() || !subset_of(m, d.verts))
            throw std::invalid_argument("member outside diagram");
        if (!subset_connected(d, m)) throw std::invalid_argument("disconnected member");
        members.insert(std::move(m));
    }
    NestedVerdict v;
    for (const auto& comp : diagram_components(d))
        if (!members.count(comp)) {
            v.nested = false;
            v.bad_a = comp;
            return v;
        }
    for (auto it = members.begin(); it != members.end(); ++it)
        for (auto jt = std::next(it); jt != members.end(); ++jt) {
            const VSet& a = *it;
            const VSet& b = *jt;
            if (subset_of(a, b) || subset_of(b, a) || orthogonal(d, a, b)) continue;
            v.nested = false;
            v.bad_a = a;
            v.bad_b = b;
            return v;
        }
    v.nested = true;
    return v;
}

namespace {

void connected_subsets(const Diagram& d, std::vector<VSet>& out) {
    int n = static_cast<int>(d.verts.size());
    if (n > 20) throw std::invalid_argument("diagram too large");
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        VSet s;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) s.push_back(d.verts[i]);
        if (subset_connected(d, s)) out.push_back(std::move(s));
    }
}

void mns_rec(const Diagram& d, const VSet& within, std::vector<std::vector<VSet>>& out);

void mns_connected(const Diagram& d, const VSet& within,
                   std::vector<std::vector<VSet>>& out) {
    for (int v : within) {
        VSet rest;
        for (int w : within)
            if (w != v) rest.push_back(w);
        std::vector<std::vector<VSet>> sub;
        mns_rec(d, rest, sub);
        for (auto& f : sub) {
            f.push_back(within);
            out.push_back(std::move(f));
        }
    }
}

void mns_rec(const Diagram& d, const VSet& within, std::vector<std::vector<VSet>>& out) {
    if (within.empty()) {
        out.push_back({});
        return;
    }
    std::vector<VSet> comps;
    components_of(d, within, comps);
    if (comps.size() == 1) {
        mns_connected(d, comps[0], out);
        return;
    }
    std::vector<std::vector<std::vector<VSet>>> per;
    for (const auto& c : comps) {
        std::vector<std::vector<VSet>> sub;
        mns_connected(d, c, sub);
        per.push_back(std::move(sub));
    }
    std::vector<std::vector<VSet>> acc = {{}};
    for (const auto& choices : per) {
        std::vector<std::vector<VSet>> next;
        for (const auto& partial : acc)
            for (const auto& choice : choices) {
                auto merged = partial;
                merged.insert(merged.end(), choice.begin(), choice.end());
                next.push_back(std::move(merged));
            }
        acc = std::move(next);
    }
    for (auto& f : acc) out.push_back(std::move(f));
}

}  // namespace

std::vector<std::vector<VSet>> enumerate_mns(const Diagram& d, int bound) {
    if (static_cast<int>(d.verts.size()) > bound)
        throw std::invalid_argument("diagram exceeds enumeration bound");
    std::vector<std::vector<VSet>> out;
    mns_rec(d, d.verts, out);
    for (auto& f : out) f = canonical(std::move(f));
    std::sort(out.begin(), out.end());
    return out;
}

bool is_maximal_nested(const Diagram& d, const std::vector<VSet>& members) {
    auto verdict = is_nested_set(d, members);
    if (!verdict.nested) return false;
    std::set<VSet> have;
    for (auto m : members) {
        std::sort(m.begin(), m.end());
        have.insert(m);
    }
    std::vector<VSet> candidates;
    connected_subsets(d, candidates);
    for (const auto& s : candidates) {
        if (have.count(s)) continue;
        auto extended = members;
        extended.push_back(s);
        if (is_nested_set(d, extended).nested) return false;
    }
    return true;
}

Diagram quotient_diagram(const Diagram& d, const VSet& b_in) {
    VSet b = b_in;
    std::sort(b.begin(), b.end());
    if (!subset_of(b, d.verts)) throw std::invalid_argument("quotient set outside diagram");
    if (b.size() == d.verts.size()) throw std::invalid_argument("quotient by the full diagram");
    Diagram q;
    for (int v : d.verts)
        if (!contains(b, v)) q.verts.push_back(v);
    std::vector<VSet> bcomps;
    components_of(d, b, bcomps);
    for (size_t x = 0; x < q.verts.size(); ++x)
        for (size_t y = x + 1; y < q.verts.size(); ++y) {
            int u = q.verts[x], v = q.verts[y];
            bool edge = d.adjacent(u, v);
            for (const auto& k : bcomps) {
                if (edge) break;
                bool tu = false, tv = false;
                for (int w : k) {
                    tu = tu || d.adjacent(u, w);
                    tv = tv || d.adjacent(v, w);
                }
                edge = tu && tv;
            }
            if (edge) q.edges.insert({u, v});
        }
    return q;
}

std::vector<VSet> mns_union(const Diagram& full, const VSet& b_in, const VSet& bp_in,
                            const std::vector<VSet>& f, const std::vector<VSet>& g) {
    VSet b = b_in, bp = bp_in;
    std::sort(b.begin(), b.end());
    std::sort(bp.begin(), bp.end());
    if (!subset_of(b, bp) || !subset_of(bp, full.verts))
        throw std::invalid_argument("tower is not nested");
    Diagram whole = quotient_diagram(full, b);
    Diagram inner = quotient_diagram(induced_diagram(full, bp), b);
    std::vector<VSet> inner_comps = diagram_components(inner);

    std::vector<VSet> out;
    for (auto c : f) {
        std::sort(c.begin(), c.end());
        if (!disjoint(c, bp)) throw std::invalid_argument("outer member meets B'");
        VSet lift = c;
        for (const auto& k : inner_comps)
            if (!orthogonal(whole, k, c)) lift.insert(lift.end(), k.begin(), k.end());
        std::sort(lift.begin(), lift.end());
        out.push_back(std::move(lift));
    }
    for (auto m : g) {
        std::sort(m.begin(), m.end());
        if (!subset_of(m, bp) || !disjoint(m, b))
            throw std::invalid_argument("inner member outside B'/B");
        out.push_back(std::move(m));
    }
    return canonical(std::move(out));
}

std::vector<std::pair<VSet, int>> pf_bijection(const Diagram& d,
                                               const std::vector<VSet>& mns) {
    auto verdict = is_nested_set(d, mns);
    if (!verdict.nested) throw std::invalid_argument("not a nested set");
    std::vector<std::pair<VSet, int>> out;
    for (auto m : mns) {
        std::sort(m.begin(), m.end());
        VSet owned = m;
        for (auto c : mns) {
            std::sort(c.begin(), c.end());
            if (c == m || !subset_of(c, m)) continue;
            VSet rest;
            std::set_difference(owned.begin(), owned.end(), c.begin(), c.end(),
                                std::back_inserter(rest));
            owned = std::move(rest);
        }
        if (owned.size() != 1) throw std::invalid_argument("no unique owned vertex");
        out.emplace_back(m, owned[0]);
    }
    return out;
}

bool is_elementary_pair(const std::vector<VSet>& f, const std::vector<VSet>& g) {
    std::set<VSet> fs, gs;
    for (auto m : f) {
        std::sort(m.begin(), m.end());
        fs.insert(std::move(m));
    }
    for (auto m : g) {
        std::sort(m.begin(), m.end());
        gs.insert(std::move(m));
    }
    if (fs.size() != gs.size()) return false;
    VSet tmp;
    std::vector<VSet> fonly, gonly;
    for (const auto& m : fs)
        if (!gs.count(m)) fonly.push_back(m);
    for (const auto& m : gs)
        if (!fs.count(m)) gonly.push_back(m);
    return fonly.size() == 1 && gonly.size() == 1;
}

PairSupport pair_support(const Diagram& d, const std::vector<VSet>& f,
                         const std::vector<VSet>& g) {
    if (!is_elementary_pair(f, g))
        throw std::invalid_argument("pair is not elementary");
    std::set<VSet> fs(f.begin(), f.end()), gs(g.begin(), g.end());
    VSet x, y;
    for (const auto& m : fs)
        if (!gs.count(m)) x = m;
    for (const auto& m : gs)
        if (!fs.count(m)) y = m;
    PairSupport p;
    std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(p.supp));
    VSet sx, sy;
    std::set_difference(p.supp.begin(), p.supp.end(), x.begin(), x.end(),
                        std::back_inserter(sx));
    std::set_difference(p.supp.begin(), p.supp.end(), y.begin(), y.end(),
                        std::back_inserter(sy));
    if (sx.size() != 1 || sy.size() != 1)
        throw std::invalid_argument("pair support is not of reflection shape");
    if (!subset_connected(d, p.supp))
        throw std::invalid_argument("pair support is disconnected");
    p.i = sx[0];
    p.j = sy[0];
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(),
                          std::back_inserter(p.zsupp));
    return p;
}

nlohmann::json diagram_to_json(const Diagram& d) {
    nlohmann::json j;
    j["vertices"] = d.verts;
    j["edges"] = nlohmann::json::array();
    for (auto [a, b] : d.edges) j["edges"].push_back({a, b});
    return j;
}

Diagram diagram_from_json(const nlohmann::json& j) {
    Diagram d;
    d.verts = j.at("vertices").get<VSet>();
    std::sort(d.verts.begin(), d.verts.end());
    for (const auto& e : j.at("edges")) {
        int a = e.at(0).get<int>(), b = e.at(1).get<int>();
        if (a > b) std::swap(a, b);
        d.edges.insert({a, b});
    }
    return d;
}

nlohmann::json mns_to_json(const std::vector<std::vector<VSet>>& list) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& f : list) {
        nlohmann::json jf = nlohmann::json::array();
        for (const auto& m : f) jf.push_back(m);
        out.push_back(jf);
    }
    return out;
}

}  // namespace kmc
