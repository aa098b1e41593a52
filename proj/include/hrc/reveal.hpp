#pragma once

#include <random>

#include "hrc/graph.hpp"
#include "hrc/ssd.hpp"

namespace hrc {

// Edge p->c is revealed once p is intervened on and c is OR or has all of
// its parents intervened on.
inline bool revealable(const SubgoalGraph& g, node_id p, node_id c, const std::vector<bool>& in_is) {
    if (!in_is[p]) return false;
    if (g.kind(c) == NodeKind::Or) return true;
    for (node_id q : g.parents(c))
        if (!in_is[q]) return false;
    return true;
}

inline std::vector<bool> membership(std::size_t n, const NodeSet& s) {
    std::vector<bool> m(n, false);
    for (node_id v : s) m.at(v) = true;
    return m;
}

// Roots plus every node with a revealable incoming edge.
inline std::vector<bool> reachable_under(const SubgoalGraph& g, const std::vector<bool>& in_is) {
    std::vector<bool> r(g.size(), false);
    for (node_id v = 0; v < g.size(); ++v) {
        const auto& ps = g.parents(v);
        if (ps.empty()) {
            r[v] = true;
            continue;
        }
        if (g.kind(v) == NodeKind::Or) {
            for (node_id p : ps)
                if (in_is[p]) r[v] = true;
        } else {
            bool all = true;
            for (node_id p : ps) all = all && in_is[p];
            r[v] = all;
        }
    }
    return r;
}

enum class ErrorSchedule { None, InverseT };

// Ground-truth discovery that remembers what it has revealed. With the
// inverse-t schedule each newly revealable edge is withheld with probability
// 1/(1+t) and offered again next time.
class ExactDiscovery {
public:
    ExactDiscovery(const SubgoalGraph& g, ErrorSchedule sched = ErrorSchedule::None)
        : g_(&g), sched_(sched), revealed_(g.size(), g.final_node()) {
        for (node_id v = 0; v < g.size(); ++v) revealed_.set_kind(v, g.kind(v));
    }

    // Full scan over children of IS. Returns the edges revealed now.
    template <class Rng>
    std::vector<Edge> update(const NodeSet& is, std::size_t t, Rng& rng) {
        std::vector<Edge> cand;
        for (node_id p : is)
            for (node_id c : g_->children(p)) cand.emplace_back(p, c);
        return offer(cand, membership(g_->size(), is), t, rng);
    }

    // Same result as update() when x_sel is the only new IS member and the
    // caller keeps `in_is` current.
    template <class Rng>
    std::vector<Edge> update_after(node_id x_sel, const std::vector<bool>& in_is, std::size_t t, Rng& rng) {
        std::vector<Edge> cand(pending_.begin(), pending_.end());
        pending_.clear();
        for (node_id c : g_->children(x_sel)) {
            if (g_->kind(c) == NodeKind::Or)
                cand.emplace_back(x_sel, c);
            else
                for (node_id p : g_->parents(c)) cand.emplace_back(p, c);
        }
        return offer(cand, in_is, t, rng);
    }

    RecoveredGraph recovered() const {
        RecoveredGraph rg(g_->size());
        for (node_id c = 0; c < g_->size(); ++c) {
            if (revealed_.parents(c).empty()) continue;
            rg.parents[c] = NodeSet(revealed_.parents(c).begin(), revealed_.parents(c).end());
            rg.kinds[c] = g_->kind(c);
        }
        return rg;
    }

    const SubgoalGraph& revealed() const { return revealed_; }

private:
    template <class Rng>
    std::vector<Edge> offer(const std::vector<Edge>& cand, const std::vector<bool>& in_is, std::size_t t, Rng& rng) {
        std::bernoulli_distribution withhold(1.0 / (1.0 + static_cast<double>(t)));
        std::vector<Edge> fresh;
        for (const auto& [p, c] : cand) {
            if (revealed_.has_edge(p, c) || !revealable(*g_, p, c, in_is)) continue;
            if (sched_ == ErrorSchedule::InverseT && withhold(rng)) {
                pending_.insert({p, c});
                continue;
            }
            pending_.erase({p, c});
            revealed_.add_edge(p, c);
            fresh.emplace_back(p, c);
        }
        return fresh;
    }

    const SubgoalGraph* g_;
    ErrorSchedule sched_;
    SubgoalGraph revealed_;
    EdgeSet pending_;
};

inline RecoveredGraph discovery_exact(const SubgoalGraph& g, const NodeSet& is) {
    ExactDiscovery d(g);
    std::mt19937_64 unused(0);
    d.update(is, 0, unused);
    return d.recovered();
}

// CCS: nodes outside IS and CS with a recovered parent in IS and every
// recovered parent in IS.
inline NodeSet candidate_controllable(const RecoveredGraph& rg, const NodeSet& is, const NodeSet& cs) {
    NodeSet out;
    for (const auto& [c, ps] : rg.parents) {
        if (is.count(c) || cs.count(c) || ps.empty()) continue;
        bool inside = true;
        for (node_id p : ps) inside = inside && is.count(p);
        if (inside) out.insert(c);
    }
    return out;
}

}  // namespace hrc
