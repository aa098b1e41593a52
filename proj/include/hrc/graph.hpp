#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hrc {

using node_id = std::size_t;
using Edge = std::pair<node_id, node_id>;  // (parent, child)
using EdgeSet = std::set<Edge>;
using NodeSet = std::set<node_id>;

enum class NodeKind { And, Or };

inline const char* kind_name(NodeKind k) { return k == NodeKind::And ? "AND" : "OR"; }

// Raised when an exhaustive routine is asked to work past its size limit.
class capacity_error : public std::length_error {
public:
    using std::length_error::length_error;
};

class SubgoalGraph {
public:
    SubgoalGraph() = default;

    explicit SubgoalGraph(std::size_t n, node_id final_node = 0)
        : parents_(n), children_(n), kinds_(n, NodeKind::Or), final_(final_node) {
        if (n == 0) throw std::invalid_argument("graph needs at least one node");
        check(final_node);
    }

    std::size_t size() const { return parents_.size(); }
    node_id final_node() const { return final_; }
    void set_final(node_id v) {
        check(v);
        final_ = v;
    }

    const std::vector<node_id>& parents(node_id v) const { return parents_.at(v); }
    const std::vector<node_id>& children(node_id v) const { return children_.at(v); }
    NodeKind kind(node_id v) const { return kinds_.at(v); }
    void set_kind(node_id v, NodeKind k) { kinds_.at(v) = k; }

    void add_edge(node_id parent, node_id child) {
        check(parent);
        check(child);
        if (parent == child) throw std::invalid_argument("self-loop on node " + std::to_string(child));
        auto& ps = parents_[child];
        auto it = std::lower_bound(ps.begin(), ps.end(), parent);
        if (it != ps.end() && *it == parent) return;
        ps.insert(it, parent);
        auto& cs = children_[parent];
        cs.insert(std::lower_bound(cs.begin(), cs.end(), child), child);
    }

    bool has_edge(node_id parent, node_id child) const {
        const auto& ps = parents_.at(child);
        return std::binary_search(ps.begin(), ps.end(), parent);
    }

    EdgeSet edges() const {
        EdgeSet out;
        for (node_id c = 0; c < size(); ++c)
            for (node_id p : parents_[c]) out.emplace(p, c);
        return out;
    }

    std::size_t edge_count() const {
        std::size_t m = 0;
        for (const auto& ps : parents_) m += ps.size();
        return m;
    }

    std::vector<node_id> roots() const {
        std::vector<node_id> out;
        for (node_id v = 0; v < size(); ++v)
            if (parents_[v].empty()) out.push_back(v);
        return out;
    }

    bool operator==(const SubgoalGraph&) const = default;

private:
    void check(node_id v) const {
        if (v >= parents_.size()) throw std::out_of_range("node " + std::to_string(v) + " out of range");
    }

    std::vector<std::vector<node_id>> parents_;
    std::vector<std::vector<node_id>> children_;
    std::vector<NodeKind> kinds_;
    node_id final_ = 0;
};

// Kahn's algorithm; returns an empty vector when the graph has a cycle.
inline std::vector<node_id> topological_order(const SubgoalGraph& g) {
    std::vector<std::size_t> indeg(g.size());
    for (node_id v = 0; v < g.size(); ++v) indeg[v] = g.parents(v).size();
    std::priority_queue<node_id, std::vector<node_id>, std::greater<>> ready;
    for (node_id v = 0; v < g.size(); ++v)
        if (indeg[v] == 0) ready.push(v);
    std::vector<node_id> order;
    order.reserve(g.size());
    while (!ready.empty()) {
        node_id v = ready.top();
        ready.pop();
        order.push_back(v);
        for (node_id c : g.children(v))
            if (--indeg[c] == 0) ready.push(c);
    }
    if (order.size() != g.size()) return {};
    return order;
}

inline bool is_acyclic(const SubgoalGraph& g) { return !topological_order(g).empty(); }

inline void require_dag(const SubgoalGraph& g) {
    if (!is_acyclic(g)) throw std::invalid_argument("graph contains a cycle");
}

inline std::vector<bool> ancestor_mask(const SubgoalGraph& g, node_id v) {
    std::vector<bool> seen(g.size(), false);
    std::vector<node_id> stack(g.parents(v).begin(), g.parents(v).end());
    while (!stack.empty()) {
        node_id u = stack.back();
        stack.pop_back();
        if (seen[u]) continue;
        seen[u] = true;
        for (node_id p : g.parents(u)) stack.push_back(p);
    }
    return seen;
}

inline NodeSet ancestors(const SubgoalGraph& g, node_id v) {
    auto mask = ancestor_mask(g, v);
    NodeSet out;
    for (node_id u = 0; u < g.size(); ++u)
        if (mask[u]) out.insert(u);
    return out;
}

inline std::size_t depth_of(const SubgoalGraph& g, node_id v) {
    std::size_t d = 0;
    while (!g.parents(v).empty()) {
        v = g.parents(v).front();
        ++d;
    }
    return d;
}

// Complete b-ary tree numbered breadth-first; node i > 0 has parent (i-1)/b.
inline SubgoalGraph gen_tree(std::size_t n, std::size_t b, std::uint64_t seed = 0) {
    (void)seed;
    if (n < 1) throw std::invalid_argument("gen_tree: n must be >= 1");
    if (b < 2) throw std::invalid_argument("gen_tree: b must be >= 2");
    SubgoalGraph g(n, n - 1);
    for (node_id i = 1; i < n; ++i) g.add_edge((i - 1) / b, i);
    return g;
}

inline SubgoalGraph gen_upper_triangular(std::size_t n, double p, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("random DAG: n must be >= 2");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("random DAG: p outside [0,1]");
    SubgoalGraph g(n, n - 1);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    for (node_id i = 0; i < n; ++i)
        for (node_id j = i + 1; j < n; ++j)
            if (coin(rng)) g.add_edge(i, j);
    return g;
}

inline double semi_er_probability(std::size_t n, double c) {
    return c * std::log(static_cast<double>(n)) / static_cast<double>(n - 1);
}

inline SubgoalGraph gen_semi_er(std::size_t n, double c, std::uint64_t seed) {
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("gen_semi_er: c must lie in (0,1)");
    if (n < 2) throw std::invalid_argument("gen_semi_er: n must be >= 2");
    return gen_upper_triangular(n, std::min(1.0, semi_er_probability(n, c)), seed);
}

enum class KindMode { AllAnd, AllOr, Random };

inline KindMode parse_kind_mode(const std::string& s) {
    if (s == "all-and") return KindMode::AllAnd;
    if (s == "all-or") return KindMode::AllOr;
    if (s == "random") return KindMode::Random;
    throw std::invalid_argument("unknown kind mode: " + s);
}

inline SubgoalGraph assign_kinds(SubgoalGraph g, KindMode mode, std::uint64_t seed = 0) {
    std::mt19937_64 rng(seed ^ 0x6b696e6473ULL);
    std::bernoulli_distribution coin(0.5);
    for (node_id v = 0; v < g.size(); ++v) {
        switch (mode) {
            case KindMode::AllAnd: g.set_kind(v, NodeKind::And); break;
            case KindMode::AllOr: g.set_kind(v, NodeKind::Or); break;
            case KindMode::Random: g.set_kind(v, coin(rng) ? NodeKind::And : NodeKind::Or); break;
        }
    }
    return g;
}

// Stone=0, wood=1, pickaxe=2; pickaxe needs both.
namespace mini_craft {
constexpr node_id stone = 0;
constexpr node_id wood = 1;
constexpr node_id pickaxe = 2;

inline SubgoalGraph graph() {
    SubgoalGraph g(3, pickaxe);
    g.add_edge(stone, pickaxe);
    g.add_edge(wood, pickaxe);
    g.set_kind(pickaxe, NodeKind::And);
    return g;
}
}  // namespace mini_craft

}  // namespace hrc
