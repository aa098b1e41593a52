#pragma once

#include <map>
#include <optional>

#include "hrc/graph.hpp"

namespace hrc {

// Recovered DAG restricted to leveled subgoals.
class HierarchicalStructure {
public:
    HierarchicalStructure() = default;
    explicit HierarchicalStructure(std::size_t n) : parents_(n), level_(n) {}

    std::size_t size() const { return level_.size(); }
    bool leveled(node_id v) const { return level_.at(v).has_value(); }

    std::size_t level(node_id v) const {
        if (!leveled(v)) throw std::invalid_argument("node " + std::to_string(v) + " has no level");
        return *level_[v];
    }

    const NodeSet& parents(node_id v) const { return parents_.at(v); }

    EdgeSet edges() const {
        EdgeSet out;
        for (node_id c = 0; c < size(); ++c)
            for (node_id p : parents_[c]) out.emplace(p, c);
        return out;
    }

    std::vector<node_id> leveled_nodes() const {
        std::vector<node_id> out;
        for (node_id v = 0; v < size(); ++v)
            if (leveled(v)) out.push_back(v);
        return out;
    }

    // Drops a subgoal whose training failed; children keep their levels.
    void remove(node_id v) {
        level_.at(v).reset();
        parents_[v].clear();
    }

    void set(node_id v, NodeSet ps, std::size_t lvl) {
        parents_.at(v) = std::move(ps);
        level_[v] = lvl;
    }

private:
    std::vector<NodeSet> parents_;
    std::vector<std::optional<std::size_t>> level_;
};

// Levels every child named in `nodes` or in `parent_edges`. A child that is
// already leveled with the same parents is left alone.
inline HierarchicalStructure update_hierarchy(HierarchicalStructure hs, const std::vector<node_id>& nodes,
                                              const EdgeSet& parent_edges) {
    std::map<node_id, NodeSet> incoming;
    for (node_id v : nodes) incoming[v];
    for (const auto& [p, c] : parent_edges) {
        if (p == c) throw std::invalid_argument("self edge in hierarchy update");
        incoming[c].insert(p);
    }
    for (const auto& [c, ps] : incoming) {
        if (c >= hs.size()) throw std::out_of_range("hierarchy node out of range");
        if (hs.leveled(c)) {
            if (hs.parents(c) != ps)
                throw std::invalid_argument("node " + std::to_string(c) + " already leveled with other parents");
            continue;
        }
        std::size_t lvl = 0;
        for (node_id p : ps) {
            if (p >= hs.size() || !hs.leveled(p))
                throw std::invalid_argument("parent " + std::to_string(p) + " of " + std::to_string(c) + " has no level");
            lvl = std::max(lvl, hs.level(p) + 1);
        }
        hs.set(c, ps, lvl);
    }
    return hs;
}

inline HierarchicalStructure update_hierarchy(HierarchicalStructure hs, const EdgeSet& parent_edges) {
    return update_hierarchy(std::move(hs), {}, parent_edges);
}

inline std::vector<node_id> causal_order(const HierarchicalStructure& hs, node_id v) {
    if (!hs.leveled(v)) throw std::invalid_argument("causal_order: node " + std::to_string(v) + " is not leveled");
    std::vector<bool> seen(hs.size(), false);
    std::vector<node_id> stack{v}, out;
    while (!stack.empty()) {
        node_id u = stack.back();
        stack.pop_back();
        if (seen[u]) continue;
        seen[u] = true;
        out.push_back(u);
        for (node_id p : hs.parents(u)) stack.push_back(p);
    }
    std::sort(out.begin(), out.end(), [&](node_id a, node_id b) {
        auto la = hs.level(a), lb = hs.level(b);
        return la != lb ? la < lb : a < b;
    });
    return out;
}

// Full scan of the level constraint over leveled nodes.
inline bool levels_consistent(const HierarchicalStructure& hs) {
    for (node_id v = 0; v < hs.size(); ++v) {
        if (!hs.leveled(v)) continue;
        std::size_t need = 0;
        for (node_id p : hs.parents(v)) {
            if (!hs.leveled(p)) return false;
            need = std::max(need, hs.level(p) + 1);
        }
        if (hs.parents(v).empty() ? hs.level(v) != 0 : hs.level(v) < need) return false;
    }
    return true;
}

}  // namespace hrc
