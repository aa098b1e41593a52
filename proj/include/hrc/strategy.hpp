#pragma once

#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "hrc/graph.hpp"

namespace hrc {

constexpr double ece_zero_tol = 1e-9;
constexpr double infinite_cost = std::numeric_limits<double>::infinity();
constexpr std::size_t never = std::numeric_limits<std::size_t>::max();

struct EceQuery {
    NodeSet A;
    NodeSet B;
    node_id target = 0;
    std::size_t t_star = 0;
    std::size_t delta = 20;
    std::size_t rollouts = 1;
};

// First step at which each node is 1 in a deterministic persistent rollout
// started from `on`, with `force1` held at 1 and `force0` held at 0. Nodes
// that stay 0 through `delta` steps get `never`.
inline std::vector<std::size_t> activation_times(const SubgoalGraph& m, const NodeSet& on, const NodeSet& force1,
                                                 const NodeSet& force0, std::size_t delta) {
    const std::size_t n = m.size();
    std::vector<std::size_t> when(n, never);
    std::vector<std::size_t> lit(n, 0);
    std::vector<bool> blocked(n, false);
    for (node_id v : force0) blocked.at(v) = true;
    std::vector<node_id> layer;
    auto light = [&](node_id v, std::size_t t) {
        if (blocked[v] || when[v] != never) return;
        when[v] = t;
        layer.push_back(v);
    };
    for (node_id v : force1) light(v, 0);
    for (node_id v : on) light(v, 0);
    for (std::size_t t = 0; t < delta && !layer.empty(); ++t) {
        std::vector<node_id> next;
        std::swap(layer, next);
        // `next` holds the nodes lit at step t; light their children at t+1.
        for (node_id u : next)
            for (node_id c : m.children(u)) {
                if (when[c] != never || blocked[c]) continue;
                if (m.kind(c) == NodeKind::Or || ++lit[c] == m.parents(c).size()) light(c, t + 1);
            }
    }
    return when;
}

inline double estimate_ece(const SubgoalGraph& model, const EceQuery& q, const NodeSet& is) {
    if (q.target >= model.size()) throw std::out_of_range("estimate_ece: target out of range");
    if (q.A.count(q.target) || q.B.count(q.target)) throw std::invalid_argument("estimate_ece: target forced");
    if (q.delta < 1 || q.rollouts < 1) throw std::invalid_argument("estimate_ece: delta and rollouts must be >= 1");
    NodeSet off = q.B;
    off.insert(q.A.begin(), q.A.end());
    double hi = 0, lo = 0;
    for (std::size_t r = 0; r < q.rollouts; ++r) {
        hi += activation_times(model, is, q.A, q.B, q.delta)[q.target] != never;
        lo += activation_times(model, is, {}, off, q.delta)[q.target] != never;
    }
    return (hi - lo) / static_cast<double>(q.rollouts);
}

struct Decision {
    std::size_t iteration = 0;
    std::vector<node_id> candidates;
    std::vector<double> scores;
    node_id chosen = 0;
    std::string note;
};

// Index of the best score under `better`, earliest index on ties.
template <class Better>
std::size_t best_index(const std::vector<double>& s, Better better) {
    std::size_t b = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (better(s[i], s[b])) b = i;
    return b;
}

inline void require_candidates(const NodeSet& cs) {
    if (cs.empty()) throw std::invalid_argument("strategy: empty controllable set");
}

// Ranks by the effect of forcing the candidate given the current IS; ties
// fall to the effect measured with every other controllable subgoal
// achieved, then to the lowest index.
inline node_id pick_causal_effect(const NodeSet& cs, const SubgoalGraph& model, node_id target, const NodeSet& is,
                                  std::size_t delta = 20, Decision* log = nullptr) {
    require_candidates(cs);
    std::vector<node_id> cand(cs.begin(), cs.end());
    if (log) log->candidates = cand;
    if (cs.count(target)) {
        if (log) log->scores.assign(cand.size(), 0.0), log->note = "target controllable";
        return target;
    }
    std::vector<double> primary, secondary;
    for (node_id v : cand) {
        EceQuery q{{v}, {}, target, 0, delta, 1};
        primary.push_back(estimate_ece(model, q, is));
        NodeSet rest = is;
        for (node_id u : cand)
            if (u != v) rest.insert(u);
        secondary.push_back(estimate_ece(model, q, rest));
    }
    std::size_t b = 0;
    for (std::size_t i = 1; i < cand.size(); ++i) {
        double dp = primary[i] - primary[b];
        if (dp > ece_zero_tol || (std::abs(dp) <= ece_zero_tol && secondary[i] > secondary[b] + ece_zero_tol)) b = i;
    }
    if (log) log->scores = primary;
    return cand[b];
}

struct AstarState {
    std::map<node_id, double> g_cost;
    std::map<node_id, double> h_cost;
    std::map<node_id, node_id> parent_pointer;
    NodeSet open;
    NodeSet closed;

    double g(node_id v) const {
        auto it = g_cost.find(v);
        return it == g_cost.end() ? infinite_cost : it->second;
    }
    double h(node_id v) const {
        auto it = h_cost.find(v);
        return it == h_cost.end() ? infinite_cost : it->second;
    }
    double f(node_id v) const { return g(v) + h(v); }

    NodeSet backtrack(node_id v) const {
        NodeSet path{v};
        for (auto it = parent_pointer.find(v); it != parent_pointer.end(); it = parent_pointer.find(it->second))
            if (!path.insert(it->second).second) break;
        return path;
    }
};

// Dijkstra from `src` with w(u,v) = |CH(u) \ path(u)| + 1, path(u) being the
// tree path src..u. Returns the distance to `goal`, infinite if unreachable.
inline double dynamic_distance(const SubgoalGraph& m, node_id src, node_id goal) {
    std::vector<double> dist(m.size(), infinite_cost);
    std::vector<node_id> prev(m.size(), never);
    std::vector<bool> done(m.size(), false);
    using Item = std::pair<double, node_id>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = true;
        if (u == goal) return d;
        NodeSet path{u};
        for (node_id p = prev[u]; p != never; p = prev[p]) path.insert(p);
        double off_path = 0;
        for (node_id c : m.children(u)) off_path += !path.count(c);
        double w = off_path + 1;
        for (node_id c : m.children(u))
            if (d + w < dist[c]) {
                dist[c] = d + w;
                prev[c] = u;
                pq.emplace(dist[c], c);
            }
    }
    return infinite_cost;
}

inline void astar_track(AstarState& s, node_id v, const SubgoalGraph& model, node_id goal, bool refresh = false) {
    s.open.insert(v);
    if (refresh || !s.h_cost.count(v)) s.h_cost[v] = dynamic_distance(model, v, goal);
}

// Seeds the search frontier (the initial controllable set) at g = 0.
inline void astar_seed(AstarState& s, const NodeSet& cs, const SubgoalGraph& model, node_id goal) {
    for (node_id v : cs) {
        if (!s.g_cost.count(v)) s.g_cost[v] = 0.0;
        astar_track(s, v, model, goal);
    }
}

namespace detail {
inline void relax_from(AstarState& s, node_id p, const SubgoalGraph& revealed, const NodeSet& is) {
    auto path = s.backtrack(p);
    double off_path = 0;
    for (node_id c : revealed.children(p)) off_path += !path.count(c);
    double cand = s.g(p) + off_path + 1;
    for (node_id c : revealed.children(p)) {
        if (is.count(c)) continue;
        if (cand < s.g(c)) {
            s.g_cost[c] = cand;
            s.parent_pointer[c] = p;
        }
    }
}
}  // namespace detail

// After x_sel joins IS: relax its revealed children, give a cost to any other
// child of IS that appeared without one (delayed reveal), refresh h.
inline void astar_update(AstarState& s, node_id x_sel, const SubgoalGraph& revealed, const NodeSet& is,
                         const SubgoalGraph& model, node_id goal, bool refresh_h = false) {
    s.open.erase(x_sel);
    s.closed.insert(x_sel);
    if (!s.g_cost.count(x_sel)) s.g_cost[x_sel] = 0.0;
    detail::relax_from(s, x_sel, revealed, is);
    for (node_id p : is)
        for (node_id c : revealed.children(p))
            if (!is.count(c) && !s.g_cost.count(c)) detail::relax_from(s, p, revealed, is);
    for (node_id p : is)
        for (node_id c : revealed.children(p))
            if (!is.count(c) && !s.open.count(c)) astar_track(s, c, model, goal);
    if (refresh_h)
        for (node_id v : s.open) astar_track(s, v, model, goal, true);
}

// argmin f; infinite f last; ties by smaller h, then index.
inline node_id pick_shortest_path(const AstarState& s, const NodeSet& cs, node_id goal, Decision* log = nullptr) {
    require_candidates(cs);
    std::vector<node_id> cand(cs.begin(), cs.end());
    if (log) {
        log->candidates = cand;
        for (node_id v : cand) log->scores.push_back(s.f(v));
    }
    if (cs.count(goal)) return goal;
    node_id best = cand.front();
    for (node_id v : cand) {
        double fv = s.f(v), fb = s.f(best);
        if (fv < fb || (fv == fb && s.h(v) < s.h(best))) best = v;
    }
    return best;
}

// Nodes on some model path from a member of S to target, target excluded.
inline std::size_t path_node_count(const SubgoalGraph& m, const NodeSet& S, node_id target) {
    auto anc = ancestor_mask(m, target);
    std::vector<bool> seen(m.size(), false);
    std::vector<node_id> stack(S.begin(), S.end());
    std::size_t count = 0;
    while (!stack.empty()) {
        node_id u = stack.back();
        stack.pop_back();
        if (seen[u]) continue;
        seen[u] = true;
        if (!anc[u]) continue;
        ++count;
        for (node_id c : m.children(u)) stack.push_back(c);
    }
    return count;
}

// G(S): over distinct model parents p of S, g(p) + |CH(p) \ IS| + 1, with a
// missing g taken as 0.
inline double hybrid_g(const SubgoalGraph& m, const NodeSet& S, const NodeSet& is, const AstarState& s) {
    NodeSet pa;
    for (node_id v : S)
        for (node_id p : m.parents(v)) pa.insert(p);
    double total = 0;
    for (node_id p : pa) {
        double gp = s.g_cost.count(p) ? s.g_cost.at(p) : 0.0;
        double outside = 0;
        for (node_id c : m.children(p)) outside += !is.count(c);
        total += gp + outside + 1;
    }
    return total;
}

struct HybridScore {
    NodeSet set;
    double ece = 0, G = 0, H = 0;
    double F() const { return G + H; }
};

// Every subset of CS with nonzero ECE(S, CS \ S), by size then lexicographic.
inline std::vector<HybridScore> hybrid_candidates(const NodeSet& cs, const SubgoalGraph& model, node_id target,
                                                  const NodeSet& is, const AstarState& s, std::size_t delta) {
    std::vector<node_id> cand(cs.begin(), cs.end());
    const std::size_t k = cand.size();
    std::vector<std::vector<node_id>> subsets;
    for (std::uint64_t m = 1; m < (std::uint64_t{1} << k); ++m) {
        std::vector<node_id> sub;
        for (std::size_t i = 0; i < k; ++i)
            if ((m >> i) & 1) sub.push_back(cand[i]);
        subsets.push_back(std::move(sub));
    }
    std::stable_sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    std::vector<HybridScore> out;
    for (const auto& sub : subsets) {
        NodeSet S(sub.begin(), sub.end()), B;
        for (node_id v : cand)
            if (!S.count(v)) B.insert(v);
        double e = estimate_ece(model, EceQuery{S, B, target, 0, delta, 1}, is);
        if (std::abs(e) <= ece_zero_tol) continue;
        out.push_back(HybridScore{S, e, hybrid_g(model, S, is, s), static_cast<double>(path_node_count(model, S, target))});
    }
    return out;
}

inline node_id pick_hybrid(const NodeSet& cs, const SubgoalGraph& model, node_id target, const NodeSet& is,
                           std::deque<node_id>& queue, const AstarState& s, std::size_t subset_cap = 12,
                           std::size_t delta = 20, Decision* log = nullptr) {
    require_candidates(cs);
    while (!queue.empty() && !cs.count(queue.front())) queue.pop_front();
    if (!queue.empty()) {
        node_id v = queue.front();
        queue.pop_front();
        if (log) log->candidates.assign(cs.begin(), cs.end()), log->note = "queued";
        return v;
    }
    if (cs.count(target) || cs.size() > subset_cap) return pick_causal_effect(cs, model, target, is, delta, log);
    auto scored = hybrid_candidates(cs, model, target, is, s, delta);
    if (scored.empty()) return pick_causal_effect(cs, model, target, is, delta, log);
    std::size_t b = 0;
    for (std::size_t i = 1; i < scored.size(); ++i)
        if (scored[i].F() < scored[b].F()) b = i;
    for (node_id v : scored[b].set) queue.push_back(v);
    if (log) {
        log->candidates.assign(cs.begin(), cs.end());
        std::string note = "F=" + std::to_string(scored[b].F()) + " set=";
        for (node_id v : scored[b].set) note += std::to_string(v) + ";";
        log->note = note;
    }
    node_id v = queue.front();
    queue.pop_front();
    return v;
}

template <class Rng>
node_id pick_random(const NodeSet& cs, Rng& rng) {
    require_candidates(cs);
    std::uniform_int_distribution<std::size_t> d(0, cs.size() - 1);
    return *std::next(cs.begin(), static_cast<std::ptrdiff_t>(d(rng)));
}

enum class StrategyKind { Random, CausalEffect, ShortestPath, Hybrid };

inline StrategyKind parse_strategy(const std::string& s) {
    if (s == "random" || s == "baseline") return StrategyKind::Random;
    if (s == "causal-effect") return StrategyKind::CausalEffect;
    if (s == "shortest-path") return StrategyKind::ShortestPath;
    if (s == "hybrid") return StrategyKind::Hybrid;
    throw std::invalid_argument("unknown strategy: " + s);
}

inline const char* strategy_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::Random: return "random";
        case StrategyKind::CausalEffect: return "causal-effect";
        case StrategyKind::ShortestPath: return "shortest-path";
        case StrategyKind::Hybrid: return "hybrid";
    }
    return "?";
}

struct StrategyOptions {
    std::size_t delta = 20;
    std::size_t subset_cap = 12;
};

// Per-run selection rule with its own bookkeeping.
class Strategy {
public:
    Strategy(StrategyKind k, std::uint64_t seed, StrategyOptions opt = {}) : kind_(k), rng_(seed), opt_(opt) {}

    StrategyKind kind() const { return kind_; }
    const AstarState& astar() const { return astar_; }

    void begin(const NodeSet& cs, const SubgoalGraph& model, node_id goal) {
        if (kind_ == StrategyKind::ShortestPath || kind_ == StrategyKind::Hybrid) astar_seed(astar_, cs, model, goal);
    }

    node_id pick(const NodeSet& cs, const NodeSet& is, const SubgoalGraph& model, node_id goal, Decision* log = nullptr) {
        switch (kind_) {
            case StrategyKind::Random: {
                node_id v = pick_random(cs, rng_);
                if (log) log->candidates.assign(cs.begin(), cs.end());
                return v;
            }
            case StrategyKind::CausalEffect: return pick_causal_effect(cs, model, goal, is, opt_.delta, log);
            case StrategyKind::ShortestPath: return pick_shortest_path(astar_, cs, goal, log);
            case StrategyKind::Hybrid: return pick_hybrid(cs, model, goal, is, queue_, astar_, opt_.subset_cap, opt_.delta, log);
        }
        throw std::logic_error("unreachable");
    }

    void expanded(node_id x, const SubgoalGraph& revealed, const NodeSet& is, const SubgoalGraph& model, node_id goal,
                  bool model_changed) {
        if (kind_ == StrategyKind::ShortestPath || kind_ == StrategyKind::Hybrid)
            astar_update(astar_, x, revealed, is, model, goal, model_changed);
    }

private:
    StrategyKind kind_;
    std::mt19937_64 rng_;
    StrategyOptions opt_;
    AstarState astar_;
    std::deque<node_id> queue_;
};

}  // namespace hrc
