#pragma once

#include <random>
#include <vector>

#include "hrc/ledger.hpp"
#include "hrc/reveal.hpp"
#include "hrc/strategy.hpp"

namespace hrc {

enum class RankingModel { Truth, Recovered };

struct SearchOptions {
    ErrorSchedule errors = ErrorSchedule::None;
    RankingModel ranking = RankingModel::Truth;
    StrategyOptions strategy;
    CostParams params;
    bool keep_decisions = false;
};

struct SearchResult {
    std::vector<node_id> order;  // IS in insertion order
    NodeSet IS;
    NodeSet CS;
    std::size_t c = 0;          // 2|IS| + |CS|
    std::size_t additions = 0;  // counted independently of c
    double formulated_cost = 0;  // sum of transition costs
    bool success = false;
    std::vector<Decision> decisions;
};

// Abstract HRC loop without probes: reveal follows the ground truth (with
// optional withholding), each selection is charged its transition cost.
inline SearchResult graph_search(const SubgoalGraph& g, StrategyKind kind, std::uint64_t seed,
                                 const SearchOptions& opt = {}) {
    require_dag(g);
    auto roots = g.roots();
    if (roots.empty()) throw std::invalid_argument("graph_search: no roots");
    const node_id goal = g.final_node();
    std::mt19937_64 reveal_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    Strategy strat(kind, seed, opt.strategy);
    ExactDiscovery disc(g, opt.errors);

    SearchResult r;
    r.CS.insert(roots.begin(), roots.end());
    r.additions = r.CS.size();
    auto model = [&]() -> const SubgoalGraph& {
        return opt.ranking == RankingModel::Truth ? g : disc.revealed();
    };
    strat.begin(r.CS, model(), goal);
    std::vector<bool> in_is(g.size(), false);
    std::size_t t = 0;
    while (!r.IS.count(goal) && !r.CS.empty()) {
        ++t;
        Decision d;
        d.iteration = t;
        node_id x = strat.pick(r.CS, r.IS, model(), goal, opt.keep_decisions ? &d : nullptr);
        r.formulated_cost += transition_cost(r.IS, x, g, opt.params);
        r.IS.insert(x);
        r.CS.erase(x);
        r.order.push_back(x);
        ++r.additions;
        in_is[x] = true;
        for (const auto& [p, c] : disc.update_after(x, in_is, t, reveal_rng))
            if (!r.IS.count(c) && r.CS.insert(c).second) ++r.additions;
        strat.expanded(x, disc.revealed(), r.IS, model(), goal, opt.ranking == RankingModel::Recovered);
        if (opt.keep_decisions) {
            d.chosen = x;
            r.decisions.push_back(std::move(d));
        }
    }
    r.c = 2 * r.IS.size() + r.CS.size();
    r.success = r.IS.count(goal) > 0;
    return r;
}

}  // namespace hrc
