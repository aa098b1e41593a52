#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "hrc/search.hpp"

namespace hrc {

struct MdpCostResult {
    double expected_cost = 0;
    std::size_t states_visited = 0;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace detail {

struct RandomCostRecursion {
    const SubgoalGraph& g;
    const CostParams& p;
    std::vector<std::uint32_t> pmask;
    std::unordered_map<std::uint32_t, double> memo;

    RandomCostRecursion(const SubgoalGraph& graph, const CostParams& params) : g(graph), p(params) {
        for (node_id v = 0; v < g.size(); ++v) {
            std::uint32_t m = 0;
            for (node_id q : g.parents(v)) m |= 1u << q;
            pmask.push_back(m);
        }
    }

    std::uint32_t reachable(std::uint32_t I) const {
        std::uint32_t r = 0;
        for (node_id v = 0; v < g.size(); ++v) {
            std::uint32_t m = pmask[v];
            bool ok = m == 0 || (g.kind(v) == NodeKind::Or ? (I & m) != 0 : (I & m) == m);
            if (ok) r |= 1u << v;
        }
        return r;
    }

    double cost(std::uint32_t I) {
        if ((I >> g.final_node()) & 1) return 0.0;
        if (auto it = memo.find(I); it != memo.end()) return it->second;
        std::uint32_t before = reachable(I);
        std::uint32_t cs = before & ~I;
        double total = 0;
        int count = 0;
        const double k = std::popcount(I) + 2.0;
        for (node_id x = 0; x < g.size(); ++x) {
            if (!((cs >> x) & 1)) continue;
            std::uint32_t J = I | (1u << x);
            double fresh = std::popcount(reachable(J) & ~before);
            total += p.T * k * p.w + fresh * p.T_prime * k * p.w + cost(J);
            ++count;
        }
        double c = count ? total / count : 0.0;
        memo.emplace(I, c);
        return c;
    }
};

}  // namespace detail

// Expected formulated cost from the empty intervention set. Random strategy
// averages uniformly over the controllable set at each state; targeted
// strategies follow their single deterministic path.
inline MdpCostResult expected_cost_exact(const SubgoalGraph& g, StrategyKind kind, const CostParams& params = {},
                                         std::size_t node_cap = 20, const StrategyOptions& sopt = {}) {
    require_dag(g);
    params.validate();
    if (g.size() > node_cap || g.size() > 31) throw capacity_error("expected_cost_exact: graph above node cap");
    MdpCostResult out;
    if (kind == StrategyKind::Random) {
        detail::RandomCostRecursion rec(g, params);
        out.expected_cost = rec.cost(0);
        out.states_visited = rec.memo.size();
    } else {
        SearchOptions so;
        so.params = params;
        so.strategy = sopt;
        auto r = graph_search(g, kind, 0, so);
        out.expected_cost = r.formulated_cost;
        out.states_visited = r.IS.size() + 1;
    }
    return out;
}

struct McCost {
    double mean = 0;
    double stderr_ = 0;
    std::size_t runs = 0;
};

inline McCost monte_carlo_cost(const SubgoalGraph& g, StrategyKind kind, const CostParams& params, std::size_t runs,
                               std::uint64_t seed, SearchOptions opt = {}) {
    if (runs < 1) throw std::invalid_argument("monte_carlo_cost: runs must be >= 1");
    params.validate();
    opt.params = params;
    double sum = 0, sumsq = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        double c = graph_search(g, kind, mix_seed(seed, r), opt).formulated_cost;
        sum += c;
        sumsq += c * c;
    }
    McCost out;
    out.runs = runs;
    out.mean = sum / static_cast<double>(runs);
    if (runs > 1) {
        double var = (sumsq - static_cast<double>(runs) * out.mean * out.mean) / static_cast<double>(runs - 1);
        out.stderr_ = std::sqrt(std::max(0.0, var) / static_cast<double>(runs));
    }
    return out;
}

}  // namespace hrc
