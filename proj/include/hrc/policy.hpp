#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <unordered_map>
#include <vector>

#include "hrc/gridworld.hpp"
#include "hrc/hierarchy.hpp"

namespace hrc {

struct QConfig {
    double learning_rate = 0.1;
    double gamma = 0.95;
    double eps_start = 1.0;
    double eps_end = 0.05;
    std::size_t eps_decay_episodes = 300;

    void validate() const {
        if (!(learning_rate > 0 && learning_rate <= 1)) throw std::invalid_argument("learning_rate must lie in (0, 1]");
        if (!(gamma >= 0 && gamma <= 1)) throw std::invalid_argument("gamma must lie in [0, 1]");
        if (!(eps_start >= 0 && eps_start <= 1 && eps_end >= 0 && eps_end <= 1))
            throw std::invalid_argument("epsilon must lie in [0, 1]");
        if (eps_decay_episodes < 1) throw std::invalid_argument("eps_decay_episodes must be >= 1");
    }
};

// Tabular goal-conditioned policy. Primitive values are keyed by
// (subgoal, agent cell, backpack); option values at a level >= 1 target by
// (target, achieved-subgoal bits) over the target's hs-parents plus one
// completion slot.
class TabularPolicy {
public:
    using Row = std::array<double, grid_action_count>;

    TabularPolicy() = default;
    explicit TabularPolicy(QConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    const QConfig& config() const { return cfg_; }

    // `relevant` selects the backpack entries that enter the signature.
    static std::uint64_t primitive_key(const GridWorld& w, node_id g, unsigned relevant = 0b111) {
        std::uint64_t k = g;
        k = k * 64 + w.agent.first;
        k = k * 64 + w.agent.second;
        for (std::size_t i = 0; i < w.backpack.size(); ++i)
            k = k * 3 + ((relevant >> i) & 1 ? static_cast<std::uint64_t>(std::min(w.backpack[i], 2)) : 0);
        return k;
    }

    static std::uint64_t option_key(const GridWorld& w, node_id target) {
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < grid::subgoal_count; ++i) bits |= std::uint64_t{w.ever[i]} << i;
        return target * 64 + bits;
    }

    Row& primitive(std::uint64_t key) { return prim_[key]; }
    std::vector<double>& options(std::uint64_t key, std::size_t width) {
        auto& v = opt_[key];
        if (v.size() != width) v.assign(width, 0.0);
        return v;
    }

    double epsilon(node_id g) const {
        auto it = episodes_.find(g);
        double k = it == episodes_.end() ? 0.0 : static_cast<double>(it->second);
        double frac = std::min(1.0, k / static_cast<double>(cfg_.eps_decay_episodes));
        return cfg_.eps_start + (cfg_.eps_end - cfg_.eps_start) * frac;
    }
    void count_episode(node_id g) { ++episodes_[g]; }

    std::size_t primitive_entries() const { return prim_.size(); }
    bool finite() const {
        for (const auto& [k, r] : prim_)
            for (double q : r)
                if (!std::isfinite(q)) return false;
        for (const auto& [k, r] : opt_)
            for (double q : r)
                if (!std::isfinite(q)) return false;
        return true;
    }

private:
    QConfig cfg_;
    std::unordered_map<std::uint64_t, Row> prim_;
    std::unordered_map<std::uint64_t, std::vector<double>> opt_;
    std::map<node_id, std::size_t> episodes_;
};

struct ExecConfig {
    std::size_t max_actions = 20;  // option choices per level
    std::size_t max_steps = 60;    // primitive actions per primitive call
};

// With learn set, every controller updates its own table and explores with
// its own schedule; otherwise all controllers use `epsilon`.
struct ExecContext {
    std::mt19937_64* rng = nullptr;
    double epsilon = 0.05;
    bool learn = false;

    double eps_for(const TabularPolicy& pi, node_id g) const { return learn ? pi.epsilon(g) : epsilon; }
};

struct ExecResult {
    bool done = false;
    bool achieved = false;
    std::size_t steps = 0;
};

inline bool parents_satisfied(const GridWorld& w, node_id g, const HierarchicalStructure& hs, NodeKind kind) {
    const auto& ps = hs.parents(g);
    if (ps.empty()) return true;
    std::size_t have = 0;
    for (node_id p : ps) have += w.ever[p];
    return kind == NodeKind::And ? have == ps.size() : have > 0;
}

// Subgoals a level >= 1 policy may emit: the target's unachieved hs-parents.
inline std::vector<node_id> option_mask(const GridWorld& w, node_id g, const HierarchicalStructure& hs) {
    std::vector<node_id> out;
    for (node_id p : hs.parents(g))
        if (!w.ever[p]) out.push_back(p);
    return out;
}

namespace detail {

template <class Row>
std::size_t greedy(const Row& q, const std::vector<std::size_t>& allowed, std::mt19937_64& rng) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> ties;
    for (std::size_t a : allowed) {
        if (q[a] > best + 1e-12) {
            best = q[a];
            ties.assign(1, a);
        } else if (std::abs(q[a] - best) <= 1e-12) {
            ties.push_back(a);
        }
    }
    return ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(rng)];
}

template <class Row>
std::size_t epsilon_greedy(const Row& q, const std::vector<std::size_t>& allowed, double eps, std::mt19937_64& rng) {
    if (std::bernoulli_distribution(eps)(rng))
        return allowed[std::uniform_int_distribution<std::size_t>(0, allowed.size() - 1)(rng)];
    return greedy(q, allowed, rng);
}

inline const std::vector<std::size_t>& all_actions() {
    static const std::vector<std::size_t> a{0, 1, 2, 3, 4, 5};
    return a;
}

// Backpack entries a controller for g keys on: its own item at level 0,
// everything above.
inline unsigned relevant_items(node_id g, const HierarchicalStructure& hs) {
    return hs.level(g) == 0 ? 1u << g : 0b111u;
}

// Primitive controller for subgoal g: actions until g, done, or the step cap.
inline ExecResult run_primitive(TabularPolicy& pi, GridWorld& w, node_id g, const HierarchicalStructure& hs,
                                const ExecConfig& ec, ExecContext& ctx) {
    ExecResult r;
    const unsigned rel = relevant_items(g, hs);
    const bool learn = ctx.learn;
    const double eps = ctx.eps_for(pi, g);
    const auto& qc = pi.config();
    for (std::size_t k = 0; k < ec.max_steps && !w.done() && !w.ever[g]; ++k) {
        auto key = pi.primitive_key(w, g, rel);
        std::size_t a = epsilon_greedy(pi.primitive(key), all_actions(), eps, *ctx.rng);
        grid_step(w, static_cast<GridAction>(a));
        ++r.steps;
        if (learn) {
            bool hit = w.ever[g];
            double target = hit ? 1.0 : 0.0;
            if (!hit && !w.done()) {
                const auto& next = pi.primitive(pi.primitive_key(w, g, rel));
                target += qc.gamma * *std::max_element(next.begin(), next.end());
            }
            auto& q = pi.primitive(key)[a];
            q += qc.learning_rate * (target - q);
        }
    }
    r.achieved = w.ever[g];
    r.done = w.done();
    return r;
}

}  // namespace detail

// Recursive execution of the policy for `g`. Level-0 targets act through
// primitives; higher targets emit their unachieved hs-parents and, once the
// parents satisfy the target's kind, hand over to a completion primitive
// controller.
inline ExecResult execute_hierarchical_policy(TabularPolicy& pi, GridWorld& w, node_id g,
                                              const HierarchicalStructure& hs, const std::map<node_id, NodeKind>& kinds,
                                              const ExecConfig& ec, ExecContext& ctx) {
    if (!hs.leveled(g)) throw std::invalid_argument("execute_hierarchical_policy: subgoal " + std::to_string(g) +
                                                    " has no level");
    ExecResult r;
    if (w.ever[g]) {
        r.achieved = true;
        r.done = w.done();
        return r;
    }
    if (hs.level(g) == 0) return detail::run_primitive(pi, w, g, hs, ec, ctx);

    const auto& ps = hs.parents(g);
    std::vector<node_id> slots(ps.begin(), ps.end());
    const std::size_t complete = slots.size();
    const NodeKind kind = kinds.count(g) ? kinds.at(g) : NodeKind::And;
    const bool learn = ctx.learn;
    const double eps = ctx.eps_for(pi, g);
    const auto& qc = pi.config();
    for (std::size_t k = 0; k < ec.max_actions && !w.done() && !w.ever[g]; ++k) {
        std::vector<std::size_t> allowed;
        if (parents_satisfied(w, g, hs, kind)) {
            allowed.push_back(complete);
        } else {
            for (std::size_t i = 0; i < slots.size(); ++i)
                if (!w.ever[slots[i]]) allowed.push_back(i);
        }
        auto key = pi.option_key(w, g);
        std::size_t o = detail::epsilon_greedy(pi.options(key, slots.size() + 1), allowed, eps, *ctx.rng);
        ExecResult sub;
        if (o == complete) {
            sub = detail::run_primitive(pi, w, g, hs, ec, ctx);
        } else {
            sub = execute_hierarchical_policy(pi, w, slots[o], hs, kinds, ec, ctx);
        }
        r.steps += sub.steps;
        if (learn) {
            bool hit = w.ever[g];
            double target = hit ? 1.0 : 0.0;
            if (!hit && !w.done()) {
                const auto& next = pi.options(pi.option_key(w, g), slots.size() + 1);
                target += qc.gamma * *std::max_element(next.begin(), next.end());
            }
            auto& q = pi.options(key, slots.size() + 1)[o];
            q += qc.learning_rate * (target - q);
        }
    }
    r.achieved = w.ever[g];
    r.done = w.done();
    return r;
}

}  // namespace hrc
