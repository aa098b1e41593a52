#pragma once

#include <cstdint>
#include <map>

#include "hrc/graph.hpp"

namespace hrc {

constexpr std::size_t max_enumeration_nodes = 20;

// Bitmask of v's parents (n <= 64).
inline std::uint64_t parent_mask(const SubgoalGraph& g, node_id v) {
    std::uint64_t m = 0;
    for (node_id p : g.parents(v)) m |= std::uint64_t{1} << p;
    return m;
}

inline std::vector<std::uint64_t> parent_masks(const SubgoalGraph& g) {
    std::vector<std::uint64_t> out(g.size());
    for (node_id v = 0; v < g.size(); ++v) out[v] = parent_mask(g, v);
    return out;
}

// Every node that is 1 must be explained by its parents: an OR node needs a
// parent at 1, an AND node needs all parents at 1. Parentless nodes are free.
inline bool one_sided_valid(const SubgoalGraph& g, const std::vector<std::uint64_t>& masks, std::uint64_t x) {
    for (node_id v = 0; v < g.size(); ++v) {
        if (!((x >> v) & 1) || masks[v] == 0) continue;
        bool ok = g.kind(v) == NodeKind::And ? (x & masks[v]) == masks[v] : (x & masks[v]) != 0;
        if (!ok) return false;
    }
    return true;
}

inline bool one_sided_valid(const SubgoalGraph& g, std::uint64_t x) { return one_sided_valid(g, parent_masks(g), x); }

inline std::vector<std::uint64_t> valid_assignments(const SubgoalGraph& g) {
    if (g.size() > max_enumeration_nodes)
        throw capacity_error("assignment enumeration limited to " + std::to_string(max_enumeration_nodes) + " nodes");
    auto masks = parent_masks(g);
    std::vector<std::uint64_t> out;
    const std::uint64_t total = std::uint64_t{1} << g.size();
    for (std::uint64_t x = 0; x < total; ++x)
        if (one_sided_valid(g, masks, x)) out.push_back(x);
    return out;
}

inline std::map<node_id, NodeSet> discoverable_parents(const SubgoalGraph& g) {
    auto valid = valid_assignments(g);
    std::map<node_id, NodeSet> out;
    for (node_id v = 0; v < g.size(); ++v) {
        auto& ds = out[v];
        const auto& ps = g.parents(v);
        if (ps.empty()) continue;
        std::uint64_t pm = parent_mask(g, v);
        // Parent patterns the definition asks about; scan for which occur.
        std::set<std::uint64_t> wanted{g.kind(v) == NodeKind::Or ? std::uint64_t{0} : pm};
        for (node_id j : ps) wanted.insert(g.kind(v) == NodeKind::Or ? std::uint64_t{1} << j : pm & ~(std::uint64_t{1} << j));
        std::set<std::uint64_t> seen;
        for (auto x : valid)
            if (wanted.count(x & pm)) seen.insert(x & pm);
        for (node_id j : ps) {
            std::uint64_t bit = std::uint64_t{1} << j;
            bool ok = g.kind(v) == NodeKind::Or ? seen.count(bit) && seen.count(0)
                                                : seen.count(pm) && seen.count(pm & ~bit);
            if (ok) ds.insert(j);
        }
    }
    return out;
}

inline EdgeSet parent_map_edges(const std::map<node_id, NodeSet>& pm) {
    EdgeSet out;
    for (const auto& [c, ps] : pm)
        for (node_id p : ps) out.emplace(p, c);
    return out;
}

struct ShdReport {
    std::size_t missing = 0;
    std::size_t extra = 0;
    std::size_t shd = 0;
    bool operator==(const ShdReport&) const = default;
};

inline ShdReport shd(const EdgeSet& estimate, const EdgeSet& truth) {
    ShdReport r;
    for (const auto& e : truth)
        if (!estimate.count(e)) ++r.missing;
    for (const auto& e : estimate)
        if (!truth.count(e)) ++r.extra;
    r.shd = r.missing + r.extra;
    return r;
}

}  // namespace hrc
