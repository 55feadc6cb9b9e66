#pragma once

#include "kmc/gcm.hpp"

#include "json.hpp"

#include <set>
#include <utility>
#include <vector>

namespace kmc {

using VSet = std::vector<int>;  // sorted vertex labels

struct Diagram {
    VSet verts;
    std::set<std::pair<int, int>> edges;  // pairs with first < second

    bool adjacent(int a, int b) const {
        if (a > b) std::swap(a, b);
        return edges.count({a, b}) > 0;
    }
};

Diagram make_diagram(int n, const std::vector<std::pair<int, int>>& edges);
Diagram diagram_from_gcm(const GCM& g);
Diagram induced_diagram(const Diagram& d, const VSet& verts);

std::vector<VSet> diagram_components(const Diagram& d);
bool subset_connected(const Diagram& d, const VSet& s);

struct NestedVerdict {
    bool nested = false;
    VSet bad_a, bad_b;  // offending pair when not nested
};

NestedVerdict is_nested_set(const Diagram& d, const std::vector<VSet>& members);
bool is_maximal_nested(const Diagram& d, const std::vector<VSet>& members);

std::vector<std::vector<VSet>> enumerate_mns(const Diagram& d, int bound = 8);

// Vertices V(D) minus B; i,j joined iff adjacent in D or both meet one component of B.
Diagram quotient_diagram(const Diagram& d, const VSet& b);

// F over B''/B', G over B'/B; members of F get saturated with the touching
// components of B'/B, G passes through.
std::vector<VSet> mns_union(const Diagram& full, const VSet& b, const VSet& bp,
                            const std::vector<VSet>& f, const std::vector<VSet>& g);

// member -> the one vertex it owns beyond its proper sub-members
std::vector<std::pair<VSet, int>> pf_bijection(const Diagram& d,
                                               const std::vector<VSet>& mns);

bool is_elementary_pair(const std::vector<VSet>& f, const std::vector<VSet>& g);

struct PairSupport {
    VSet supp, zsupp;
    int i = -1, j = -1;
};

// Defined when the differing members are supp minus one vertex each.
PairSupport pair_support(const Diagram& d, const std::vector<VSet>& f,
                         const std::vector<VSet>& g);

nlohmann::json diagram_to_json(const Diagram& d);
Diagram diagram_from_json(const nlohmann::json& j);
nlohmann::json mns_to_json(const std::vector<std::vector<VSet>>& list);

}  // namespace kmc
