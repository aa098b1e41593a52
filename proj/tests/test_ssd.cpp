#include <gtest/gtest.h>

#include "hrc/instances.hpp"
#include "hrc/ssd.hpp"

using namespace hrc;

namespace {

Dataset one_step(const SubgoalGraph& g) { return assignment_dataset(g, 0, 0.0, 0); }

std::vector<double> lambda_grid() {
    std::vector<double> out;
    for (int i = 0; i < 10; ++i) out.push_back(1e-4 * std::pow(1e3, i / 9.0));
    return out;
}

}  // namespace

TEST(BuildDesign, AllZeroLabels) {
    Dataset d{2, {{Transition{{0, 0}, {1, 0}, {}}, Transition{{1, 0}, {1, 0}, {}}}}};
    auto des = build_design(d, 1);
    EXPECT_EQ(des.size(), 2u);
    for (auto y : des.y) EXPECT_EQ(y, 0);
}

TEST(BuildDesign, StickyFilterDropsAfterFlip) {
    Dataset d;
    d.n = 2;
    Trajectory tr;
    for (std::size_t t = 0; t < 9; ++t) {
        std::uint8_t before = t >= 5, after = t >= 4;
        tr.push_back(Transition{{1, before}, {1, after}, {}});
    }
    d.trajectories.push_back(tr);
    auto des = build_design(d, 1, true);
    EXPECT_EQ(des.size(), 5u);
    EXPECT_EQ(des.y.back(), 1);
    EXPECT_EQ(build_design(d, 1, false).size(), 9u);
}

TEST(BuildDesign, ForcedTargetDropped) {
    Dataset d{2, {{Transition{{1, 0}, {1, 1}, {{1, 1}}}, Transition{{1, 1}, {1, 1}, {{1, 1}}}}}};
    EXPECT_EQ(build_design(d, 1, false).size(), 0u);
    EXPECT_THROW(build_design(Dataset{2, {}}, 1), std::invalid_argument);
    EXPECT_THROW(build_design(d, 5), std::out_of_range);
}

TEST(FitL1, SingleOrParent) {
    SubgoalGraph g(3, 2);
    g.add_edge(0, 2);
    auto des = build_design(one_step(g), 2, false);
    auto fr = fit_l1(des, 1e-3);
    EXPECT_EQ(fr.parents, NodeSet{0});
    EXPECT_TRUE(fr.converged);
}

TEST(FitL1, ConstantZeroLabelGivesEmptySet) {
    SubgoalGraph g(3, 2);
    auto fr = fit_l1(build_design(one_step(g), 2, false), 1e-3);
    EXPECT_TRUE(fr.parents.empty());
}

TEST(FitL1, AndPairRecovered) {
    SubgoalGraph g(3, 2);
    g.add_edge(0, 2);
    g.add_edge(1, 2);
    g.set_kind(2, NodeKind::And);
    auto fr = fit_l1(build_design(one_step(g), 2, false), 1e-3);
    EXPECT_EQ(fr.parents, (NodeSet{0, 1}));
    EXPECT_EQ(fr.kind_guess, NodeKind::And);
}

TEST(FitL1, RejectsBadInput) {
    SubgoalGraph g(2, 1);
    auto des = build_design(one_step(g), 1, false);
    EXPECT_THROW(fit_l1(des, -1.0), std::invalid_argument);
    EXPECT_THROW(fit_l1(Design{}, 0.1), std::invalid_argument);
}

TEST(FitOracle, ExactOrParentsZeroLoss) {
    SubgoalGraph g(4, 3);
    g.add_edge(0, 3);
    g.add_edge(1, 3);
    auto fr = fit_oracle(build_design(one_step(g), 3, false), 0.01);
    EXPECT_EQ(fr.parents, (NodeSet{0, 1}));
    EXPECT_EQ(fr.kind_guess, NodeKind::Or);
    EXPECT_EQ(fr.empirical_loss, 0.0);
}

TEST(FitOracle, LargeLambdaEmptiesParents) {
    SubgoalGraph g(4, 3);
    g.add_edge(0, 3);
    g.add_edge(1, 3);
    auto fr = fit_oracle(build_design(one_step(g), 3, false), 0.51);
    EXPECT_TRUE(fr.parents.empty());
}

TEST(FitOracle, MaskedParentNeverSelected) {
    using namespace instances::masked_parent;
    auto des = build_design(one_step(graph()), X3, false);
    for (double lam : lambda_grid()) EXPECT_EQ(fit_oracle(des, lam).parents, NodeSet{X2});
}

TEST(FitOracle, CapacityLimits) {
    SubgoalGraph g(3, 2);
    auto des = build_design(one_step(g), 2, false);
    EXPECT_THROW(fit_oracle(des, 0.1, OracleOptions{6, {}}), capacity_error);
}

TEST(FitOracle, LambdaMonotone) {
    for (std::uint64_t s = 0; s < 40; ++s) {
        auto g = assign_kinds(gen_upper_triangular(6, 0.5, s), KindMode::Random, s);
        auto d = assignment_dataset(g, 400, 0.1, s);
        for (node_id v = 1; v < g.size(); ++v) {
            auto des = build_design(d, v, false);
            std::size_t prev = std::numeric_limits<std::size_t>::max();
            for (double lam : lambda_grid()) {
                auto k = fit_oracle(des, lam).parents.size();
                EXPECT_LE(k, prev);
                prev = k;
            }
        }
    }
}

TEST(FitOracle, ExactOnSmallGraphs) {
    // Every DAG on four ordered nodes with every kind assignment.
    std::vector<Edge> slots;
    for (node_id i = 0; i < 4; ++i)
        for (node_id j = i + 1; j < 4; ++j) slots.emplace_back(i, j);
    std::size_t checked = 0;
    for (std::uint32_t em = 0; em < (1u << slots.size()); ++em)
        for (std::uint32_t km = 0; km < 16; ++km) {
            SubgoalGraph g(4, 3);
            for (std::size_t k = 0; k < slots.size(); ++k)
                if ((em >> k) & 1) g.add_edge(slots[k].first, slots[k].second);
            for (node_id v = 0; v < 4; ++v) g.set_kind(v, (km >> v) & 1 ? NodeKind::And : NodeKind::Or);
            DiscoverOptions opt;
            opt.engine = SsdEngine::Oracle;
            opt.sticky = false;
            auto rg = discover_full(one_step(g), opt);
            ASSERT_EQ(rg.edges(), parent_map_edges(discoverable_parents(g))) << to_text(g);
            ++checked;
        }
    EXPECT_EQ(checked, 64u * 16u);
}

TEST(FitL1, AgreesWithOracleForSomeLambda) {
    std::size_t total = 0, agree = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const std::size_t n = 3 + s % 6;
        auto g = assign_kinds(gen_upper_triangular(n, 0.5, s), KindMode::Random, s);
        auto d = one_step(g);
        for (node_id v = 0; v < n; ++v) {
            auto des = build_design(d, v, false);
            auto want = fit_oracle(des, default_lambda).parents;
            bool hit = false;
            for (double lam : lambda_grid())
                if (fit_l1(des, lam).parents == want) {
                    hit = true;
                    break;
                }
            ++total;
            agree += hit;
        }
    }
    EXPECT_GE(static_cast<double>(agree), 0.95 * static_cast<double>(total));
}

TEST(Discover, MiniCraftBothParents) {
    using namespace mini_craft;
    AscmEnv env(graph(), AscmConfig{}, 3);
    auto d = collect_interventional(env, {stone, wood}, 5);
    for (auto engine : {SsdEngine::Oracle, SsdEngine::L1}) {
        DiscoverOptions opt;
        opt.engine = engine;
        auto rg = discover(d, {stone, wood}, {stone, wood, pickaxe}, opt);
        EXPECT_EQ(rg.parents_of(pickaxe), (NodeSet{stone, wood}));
        EXPECT_EQ(rg.kinds.at(pickaxe), NodeKind::And);
    }
}

TEST(Discover, MiniCraftStoneAloneFindsNothing) {
    using namespace mini_craft;
    AscmEnv env(graph(), AscmConfig{}, 3);
    auto d = collect_interventional(env, {stone}, 5);
    auto rg = discover(d, {stone}, {stone, wood, pickaxe});
    EXPECT_TRUE(rg.parents_of(pickaxe).empty());
}

TEST(Discover, EmptyDataset) {
    Dataset d;
    d.n = 3;
    EXPECT_TRUE(discover(d, {0}, {0, 1, 2}).parents.empty());
}

TEST(Discover, ParentsStayInsideInterventionSet) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto g = assign_kinds(gen_upper_triangular(8, 0.4, s), KindMode::Random, s);
        AscmConfig cfg;
        cfg.noise_rho = 0.05;
        AscmEnv env(g, cfg, s);
        NodeSet is{0, 1, 2};
        auto d = collect_interventional(env, is, 5);
        NodeSet all;
        for (node_id v = 0; v < g.size(); ++v) all.insert(v);
        for (auto engine : {SsdEngine::Oracle, SsdEngine::L1}) {
            DiscoverOptions opt;
            opt.engine = engine;
            auto rg = discover(d, is, all, opt);
            for (const auto& [c, ps] : rg.parents) {
                EXPECT_FALSE(is.count(c));
                for (node_id p : ps) EXPECT_TRUE(is.count(p));
            }
        }
    }
}

TEST(CoefficientsCsv, Header) {
    using namespace mini_craft;
    AscmEnv env(graph(), AscmConfig{}, 3);
    auto d = collect_interventional(env, {stone, wood}, 2);
    std::ostringstream os;
    write_coefficients_csv(os, discover(d, {stone, wood}, {pickaxe}));
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "node,beta0,beta_0,beta_1,beta_2,kind,loss,converged");
}
