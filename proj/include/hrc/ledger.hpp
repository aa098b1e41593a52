#pragma once

#include <stdexcept>
#include <vector>

#include "hrc/reveal.hpp"

namespace hrc {

struct CostParams {
    double T = 1.0;
    double T_prime = 1.0;
    double w = 1.0;

    void validate() const {
        if (!(T > 0 && T_prime > 0 && w > 0)) throw std::invalid_argument("cost parameters must be positive");
    }
};

// Nodes reachable under I+{x} that were not reachable under I. Only children
// of x can change status.
inline std::vector<node_id> newly_reachable(const SubgoalGraph& g, const NodeSet& I, node_id x) {
    std::vector<node_id> out;
    for (node_id c : g.children(x)) {
        if (I.count(c)) continue;
        bool before = false, after = true;
        for (node_id p : g.parents(c)) {
            bool in = I.count(p) > 0;
            before = before || in;
            if (p != x) after = after && in;
        }
        if (g.kind(c) == NodeKind::Or)
            after = true;
        else
            before = false;
        if (after && !before) out.push_back(c);
    }
    return out;
}

inline double transition_cost(const NodeSet& I, node_id x, const SubgoalGraph& g, const CostParams& p) {
    if (I.count(x)) throw std::invalid_argument("transition_cost: x_sel already in I");
    const double k = static_cast<double>(I.size()) + 2.0;
    const double fresh = static_cast<double>(newly_reachable(g, I, x).size());
    return p.T * k * p.w + fresh * p.T_prime * k * p.w;
}

struct IterationCost {
    std::size_t t = 0;
    std::size_t intervention = 0;
    std::size_t exploration = 0;
    std::size_t training = 0;
    std::size_t total() const { return intervention + exploration + training; }
};

class CostLedger {
public:
    void begin(std::size_t t) { rows_.push_back(IterationCost{t}); }

    void charge_intervention(std::size_t k = 1) { current().intervention += k; intervention_ += k; }
    void charge_exploration(std::size_t k = 1) { current().exploration += k; exploration_ += k; }
    void charge_training(std::size_t k = 1) { current().training += k; training_ += k; }

    std::size_t intervention_probes() const { return intervention_; }
    std::size_t exploration_probes() const { return exploration_; }
    std::size_t training_probes() const { return training_; }
    std::size_t total() const { return intervention_ + exploration_ + training_; }
    const std::vector<IterationCost>& per_iteration() const { return rows_; }

    bool consistent() const {
        std::size_t a = 0, b = 0, c = 0;
        for (const auto& r : rows_) {
            a += r.intervention;
            b += r.exploration;
            c += r.training;
        }
        return a == intervention_ && b == exploration_ && c == training_;
    }

private:
    IterationCost& current() {
        if (rows_.empty()) begin(0);
        return rows_.back();
    }

    std::size_t intervention_ = 0, exploration_ = 0, training_ = 0;
    std::vector<IterationCost> rows_;
};

}  // namespace hrc
