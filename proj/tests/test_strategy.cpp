#include <gtest/gtest.h>

#include "hrc/instances.hpp"
#include "hrc/strategy.hpp"

using namespace hrc;

namespace {

SubgoalGraph path3() {
    SubgoalGraph g(3, 2);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    return g;
}

AstarState after_expanding(const SubgoalGraph& g, node_id root) {
    AstarState s;
    astar_seed(s, {root}, g, g.final_node());
    astar_update(s, root, g, {root}, g, g.final_node());
    return s;
}

}  // namespace

TEST(ActivationTimes, ChainAndBlock) {
    auto g = path3();
    auto t = activation_times(g, {0}, {}, {}, 20);
    EXPECT_EQ(t, (std::vector<std::size_t>{0, 1, 2}));
    t = activation_times(g, {0}, {}, {1}, 20);
    EXPECT_EQ(t[2], never);
    t = activation_times(g, {0}, {}, {}, 1);
    EXPECT_EQ(t[2], never);
}

TEST(Ece, NoPathIsZero) {
    using namespace instances::shortcut;
    EXPECT_EQ(estimate_ece(graph(), EceQuery{{W}, {}, F}, {}), 0.0);
    EXPECT_EQ(estimate_ece(graph(), EceQuery{{S}, {}, F}, {}), 1.0);
}

TEST(Ece, MiniCraftNeedsWood) {
    using namespace mini_craft;
    EXPECT_EQ(estimate_ece(graph(), EceQuery{{stone}, {}, pickaxe}, {wood}), 1.0);
    EXPECT_EQ(estimate_ece(graph(), EceQuery{{stone}, {}, pickaxe}, {}), 0.0);
}

TEST(Ece, RejectsForcedTarget) {
    using namespace mini_craft;
    EXPECT_THROW(estimate_ece(graph(), EceQuery{{pickaxe}, {}, pickaxe}, {}), std::invalid_argument);
    EXPECT_THROW(estimate_ece(graph(), EceQuery{{stone}, {}, pickaxe, 0, 0}, {}), std::invalid_argument);
}

TEST(Ece, AllAndPositiveExactlyForAncestors) {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const std::size_t n = 2 + s % 9;
        auto g = assign_kinds(gen_upper_triangular(n, 0.4, s), KindMode::AllAnd);
        auto anc = ancestors(g, g.final_node());
        auto roots = g.roots();
        for (node_id v = 0; v < n; ++v) {
            if (v == g.final_node()) continue;
            NodeSet is(roots.begin(), roots.end());
            is.erase(v);
            double e = estimate_ece(g, EceQuery{{v}, {}, g.final_node()}, is);
            EXPECT_EQ(e > 0, anc.count(v) > 0) << "seed " << s << " node " << v;
        }
    }
}

TEST(CausalEffect, Singleton) { EXPECT_EQ(pick_causal_effect({4}, instances::hybrid::graph(), 10, {0}), 4u); }

TEST(CausalEffect, ShortcutPrefersDirectParent) {
    using namespace instances::shortcut;
    EXPECT_EQ(pick_causal_effect({S, W}, graph(), F, {}), S);
    EXPECT_EQ(pick_causal_effect({W, S}, graph(), F, {}), S);
}

TEST(CausalEffect, AllZeroLowestIndex) {
    SubgoalGraph g(4, 3);
    EXPECT_EQ(pick_causal_effect({2, 1, 0}, g, 3, {}), 0u);
}

TEST(CausalEffect, ControllableTargetWins) {
    using namespace mini_craft;
    EXPECT_EQ(pick_causal_effect({stone, pickaxe}, graph(), pickaxe, {wood}), pickaxe);
}

TEST(CausalEffect, SecondaryBreaksAndTies) {
    // Under AND neither root helps alone; the one that feeds the target
    // still outranks an unrelated root.
    SubgoalGraph g(4, 3);
    g.add_edge(1, 3);
    g.add_edge(2, 3);
    g.set_kind(3, NodeKind::And);
    EXPECT_EQ(pick_causal_effect({0, 1, 2}, g, 3, {}), 1u);
}

TEST(CausalEffect, Empty) { EXPECT_THROW(pick_causal_effect({}, path3(), 2, {}), std::invalid_argument); }

TEST(ShortestPath, PathGraphCosts) {
    auto g = path3();
    auto s = after_expanding(g, 0);
    EXPECT_EQ(s.g(1), 2.0);
    EXPECT_EQ(s.h(1), dynamic_distance(g, 1, 2));
    EXPECT_EQ(s.h(1), 2.0);
    EXPECT_EQ(s.parent_pointer.at(1), 0u);
}

TEST(ShortestPath, UnreachableIsInfinite) {
    SubgoalGraph g(3, 2);
    g.add_edge(0, 1);
    EXPECT_EQ(dynamic_distance(g, 0, 2), infinite_cost);
    AstarState s;
    astar_seed(s, {0, 1}, g, 2);
    EXPECT_EQ(s.h(0), infinite_cost);
    EXPECT_EQ(pick_shortest_path(s, {1, 0}, 2), 0u);
}

TEST(ShortestPath, ShortcutPicksS) {
    using namespace instances::shortcut;
    AstarState s;
    astar_seed(s, {S, W}, graph(), F);
    EXPECT_LT(s.f(S), s.f(W));
    EXPECT_EQ(pick_shortest_path(s, {S, W}, F), S);
}

TEST(ShortestPath, SingletonAndEmpty) {
    AstarState s;
    EXPECT_EQ(pick_shortest_path(s, {7}, 2), 7u);
    EXPECT_THROW(pick_shortest_path(s, {}, 2), std::invalid_argument);
}

TEST(ShortestPath, UnknownChildGetsFormulaCost) {
    // Root with three children: g(child) = 0 + 3 off-path children + 1 when
    // none is on the backtracked path of the root.
    SubgoalGraph g(4, 3);
    for (node_id c : {1, 2, 3}) g.add_edge(0, c);
    auto s = after_expanding(g, 0);
    for (node_id c : {1, 2, 3}) EXPECT_EQ(s.g(c), 4.0);
}

TEST(Hybrid, WorkedExampleScores) {
    using namespace instances::hybrid;
    auto g = graph();
    auto s = after_expanding(g, root);
    auto scored = hybrid_candidates({1, 2, 3, 4}, g, target, {root}, s, 20);
    std::map<NodeSet, double> H;
    for (const auto& sc : scored) H[sc.set] = sc.H;
    EXPECT_EQ(H.at(NodeSet{1, 2}), 5.0);
    EXPECT_EQ(H.at(NodeSet{3, 4}), 3.0);
    EXPECT_EQ(H.at(NodeSet{1, 2, 3, 4}), 8.0);
    EXPECT_FALSE(H.count(NodeSet{1}));
    std::deque<node_id> queue;
    node_id first = pick_hybrid({1, 2, 3, 4}, g, target, {root}, queue, s);
    EXPECT_EQ(first, 3u);
    EXPECT_EQ(queue, std::deque<node_id>{4});
}

TEST(Hybrid, PureAndGateQueuesBoth) {
    SubgoalGraph g(3, 2);
    g.add_edge(0, 2);
    g.add_edge(1, 2);
    g.set_kind(2, NodeKind::And);
    AstarState s;
    astar_seed(s, {0, 1}, g, 2);
    auto scored = hybrid_candidates({0, 1}, g, 2, {}, s, 20);
    ASSERT_EQ(scored.size(), 1u);
    EXPECT_EQ(scored[0].set, (NodeSet{0, 1}));
    std::deque<node_id> q;
    EXPECT_EQ(pick_hybrid({0, 1}, g, 2, {}, q, s), 0u);
    EXPECT_EQ(q, std::deque<node_id>{1});
    EXPECT_EQ(pick_hybrid({1}, g, 2, {0}, q, s), 1u);
    EXPECT_TRUE(q.empty());
}

TEST(Hybrid, SingletonWithEffect) {
    auto g = path3();
    AstarState s;
    std::deque<node_id> q;
    EXPECT_EQ(pick_hybrid({0}, g, 2, {}, q, s), 0u);
}

TEST(RandomPick, SingletonAndEmpty) {
    std::mt19937_64 rng(0);
    EXPECT_EQ(pick_random(NodeSet{5}, rng), 5u);
    EXPECT_THROW(pick_random(NodeSet{}, rng), std::invalid_argument);
}

TEST(RandomPick, UniformOverTwo) {
    std::mt19937_64 rng(12);
    std::size_t first = 0;
    for (int k = 0; k < 10000; ++k) first += pick_random(NodeSet{3, 8}, rng) == 3;
    EXPECT_NEAR(first / 10000.0, 0.5, 0.015);
}

TEST(StrategyClass, DeterministicPicks) {
    auto g = instances::hybrid::graph();
    for (auto kind : {StrategyKind::Random, StrategyKind::CausalEffect, StrategyKind::ShortestPath, StrategyKind::Hybrid}) {
        Strategy a(kind, 9), b(kind, 9);
        a.begin({0}, g, 10);
        b.begin({0}, g, 10);
        EXPECT_EQ(a.pick({0}, {}, g, 10), b.pick({0}, {}, g, 10));
        a.expanded(0, g, {0}, g, 10, false);
        b.expanded(0, g, {0}, g, 10, false);
        for (int k = 0; k < 5; ++k) EXPECT_EQ(a.pick({1, 2, 3, 4}, {0}, g, 10), b.pick({1, 2, 3, 4}, {0}, g, 10));
    }
}

TEST(StrategyNames, RoundTrip) {
    for (auto kind : {StrategyKind::Random, StrategyKind::CausalEffect, StrategyKind::ShortestPath, StrategyKind::Hybrid})
        EXPECT_EQ(parse_strategy(strategy_name(kind)), kind);
    EXPECT_THROW(parse_strategy("greedy"), std::invalid_argument);
}
