#include <gtest/gtest.h>

#include <cstdlib>

#include "hrc/experiment.hpp"
#include "hrc/instances.hpp"

using namespace hrc;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("hrc_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::size_t line_count(const fs::path& p) {
    auto s = slurp(p);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(HRC_CLI) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(ExperimentConfig, ParsesAndRejectsUnknownKeys) {
    auto cfg = ExperimentConfig::from_text("# comment\nfamily = semi-er\n\nn=16, 32\nc = 0.2 # trailing\n");
    EXPECT_EQ(cfg.str("family"), "semi-er");
    EXPECT_EQ(cfg.counts("n"), (std::vector<std::size_t>{16, 32}));
    EXPECT_EQ(cfg.nums("c"), std::vector<double>{0.2});
    EXPECT_THROW(ExperimentConfig::from_text("famliy=tree\n"), std::invalid_argument);
    EXPECT_THROW(ExperimentConfig::from_text("family\n"), std::runtime_error);
    EXPECT_THROW(ExperimentConfig::from_text("seeds=ten\n").count("seeds"), std::invalid_argument);
    EXPECT_THROW(ExperimentConfig::from_text("rho=0.1x\n").num("rho"), std::invalid_argument);
}

TEST(ExperimentConfig, ShippedConfigsParse) {
    for (const auto& e : fs::directory_iterator(HRC_CONFIG_DIR)) {
        auto cfg = ExperimentConfig::from_file(e.path());
        EXPECT_FALSE(family_params(cfg).empty()) << e.path();
        for (const auto& s : cfg.list("strategies")) EXPECT_NO_THROW(parse_strategy(s));
    }
}

TEST(TailSlope, RecoversPowerLaw) {
    std::vector<std::pair<double, double>> pts;
    for (double n : {10.0, 20.0, 40.0, 80.0, 160.0}) pts.emplace_back(n, 3.0 * n * n);
    EXPECT_NEAR(tail_slope(pts), 2.0, 1e-12);
    pts[0].second = 1e9;  // outside the largest three
    EXPECT_NEAR(tail_slope(pts), 2.0, 1e-12);
    EXPECT_TRUE(std::isnan(tail_slope({{5.0, 1.0}})));
}

TEST(CmdGen, TreeFile) {
    auto out = scratch("gen_tree");
    auto cfg = ExperimentConfig::from_text("family=tree\nn=13\nb=3\nseeds=1\n");
    auto rep = cmd_gen(cfg, out);
    EXPECT_EQ(rep.exit_code(), 0);
    auto g = from_text(slurp(out / "graphs" / "tree_n13_cb3_s0.graph"));
    EXPECT_EQ(g.edge_count(), 12u);
    auto manifest = slurp(out / "manifest.csv");
    EXPECT_EQ(manifest, "graph_id,family,n,c_or_b,seed,edges,final_ancestors\ntree_n13_cb3_s0,tree,13,3,0,12,2\n");
}

TEST(CmdGen, EmptyRandomDag) {
    auto out = scratch("gen_empty");
    cmd_gen(ExperimentConfig::from_text("family=upper\nn=5\np=0\nseeds=1\n"), out);
    EXPECT_EQ(from_text(slurp(out / "graphs" / "upper_n5_cb0_s0.graph")).edge_count(), 0u);
}

TEST(CmdGen, DistinctStableNames) {
    auto out = scratch("gen_many");
    auto cfg = ExperimentConfig::from_text("family=semi-er\nn=20\nc=0.5\nseeds=100\nseed=7\n");
    EXPECT_EQ(cmd_gen(cfg, out).items, 100u);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(out / "graphs")) ++files;
    EXPECT_EQ(files, 100u);
    EXPECT_TRUE(fs::exists(out / "graphs" / "semi-er_n20_cb0.5_s7.graph"));
    EXPECT_TRUE(fs::exists(out / "graphs" / "semi-er_n20_cb0.5_s106.graph"));
    auto first = slurp(out / "manifest.csv");
    cmd_gen(cfg, out);
    EXPECT_EQ(slurp(out / "manifest.csv"), first);
}

TEST(CmdSweep, RowCountsAndSlopes) {
    auto out = scratch("sweep_tree");
    auto cfg = ExperimentConfig::from_text(
        "family=tree\nn=13,40,121,364,1093\nb=3\nseeds=100\nstrategies=random,causal-effect\n");
    auto res = cmd_sweep(cfg, out, 2);
    EXPECT_EQ(res.report.exit_code(), 0);
    EXPECT_EQ(res.rows.size(), 1000u);
    EXPECT_EQ(line_count(out / "sweep.csv"), 1001u);
    ASSERT_EQ(res.series.size(), 2u);
    EXPECT_EQ(line_count(out / "slopes.csv"), 3u);
    double random_slope = 0, ce_slope = 0;
    for (const auto& s : res.series) (s.strategy == "random" ? random_slope : ce_slope) = s.slope;
    EXPECT_GT(random_slope, ce_slope);
    EXPECT_TRUE(fs::exists(out / "sweep.plot.txt"));
}

TEST(CmdSweep, ResumeSkipsFinishedCells) {
    auto out = scratch("sweep_resume");
    auto cfg = ExperimentConfig::from_text("family=semi-er\nn=16,32\nc=0.5\nseeds=5\nstrategies=random,shortest-path\n");
    auto first = cmd_sweep(cfg, out, 1);
    EXPECT_EQ(first.report.items, 4u);
    auto merged = slurp(out / "sweep.csv");
    fs::remove(out / "cells" / "semi-er_n32_cb0.5_random.csv");
    auto second = cmd_sweep(cfg, out, 3);
    EXPECT_EQ(second.report.skipped, 3u);
    EXPECT_EQ(second.report.items, 1u);
    EXPECT_EQ(slurp(out / "sweep.csv"), merged);
}

TEST(CmdSweep, DeterministicStrategyRepeatsExactly) {
    auto a = scratch("sweep_det_a"), b = scratch("sweep_det_b");
    auto cfg = ExperimentConfig::from_text("family=semi-er\nn=64\nc=0.8\nseeds=4\nstrategies=causal-effect\nerrors=inverse-t\n");
    cmd_sweep(cfg, a, 1);
    cmd_sweep(cfg, b, 4);
    EXPECT_EQ(slurp(a / "sweep.csv"), slurp(b / "sweep.csv"));
}

TEST(CmdSweep, FailedCellsReported) {
    auto out = scratch("sweep_fail");
    auto res = cmd_sweep(ExperimentConfig::from_text("family=tree\nn=13\nb=1\nseeds=2\n"), out, 1);
    EXPECT_EQ(res.report.failures, 2u);
    EXPECT_EQ(res.report.exit_code(), 2);
    EXPECT_TRUE(fs::exists(out / "errors.log"));
}

TEST(DiscoverEval, OracleExhaustiveIsExact) {
    auto out = scratch("disc_oracle");
    std::vector<DiscoverEvalRow> rows;
    auto cfg = ExperimentConfig::from_text("family=upper\nn=4,5,6\np=0.5\nseeds=10\nengines=oracle\nsamples=0\n");
    cmd_discover_eval(cfg, out, &rows);
    ASSERT_EQ(rows.size(), 60u);
    for (const auto& r : rows)
        if (r.truth == "discoverable") EXPECT_EQ(r.shd.shd, 0u) << r.graph_id;
    EXPECT_EQ(slurp(out / "discover_eval.csv").substr(0, 41), "graph_id,engine,lambda,truth,missing,extr");
}

TEST(DiscoverEval, MaskedEdgeCountsOnlyAgainstRawGraph) {
    auto g = instances::masked_parent::graph();
    auto rows = evaluate_discovery("masked", g, assignment_dataset(g, 0, 0.0, 0), {"oracle", "l1"}, {1e-4, 1e-3});
    for (const auto& r : rows) {
        if (r.engine != "oracle") {
            EXPECT_GE(r.shd.missing, r.truth == "raw" ? 1u : 0u);
            continue;
        }
        if (r.truth == "raw")
            EXPECT_EQ(r.shd, (ShdReport{1, 0, 1}));
        else
            EXPECT_EQ(r.shd.shd, 0u);
    }
}

TEST(DiscoverEval, LargeLambdaDropsEdges) {
    std::size_t miss_small = 0, miss_large = 0, extra_large = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto g = assign_kinds(gen_upper_triangular(6, 0.5, s), KindMode::Random, s);
        auto rows = evaluate_discovery("g", g, assignment_dataset(g, 2000, 0.05, s), {"l1"}, {1e-4, 0.6});
        for (const auto& r : rows) {
            if (r.truth != "discoverable") continue;
            if (r.lambda < 0.5) {
                miss_small += r.shd.missing;
            } else {
                miss_large += r.shd.missing;
                extra_large += r.shd.extra;
            }
        }
    }
    EXPECT_GT(miss_large, miss_small);
    EXPECT_EQ(extra_large, 0u);
}

TEST(CostExact, ReportRows) {
    auto out = scratch("cost_exact");
    std::vector<CostReportRow> rows;
    auto cfg = ExperimentConfig::from_text(
        "family=upper\nn=6\np=0.5\nseeds=3\nstrategies=random,causal-effect\nmc_runs=2000\n");
    EXPECT_EQ(cmd_cost_exact(cfg, out, &rows).exit_code(), 0);
    ASSERT_EQ(rows.size(), 6u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.mc.runs, 2000u);
        if (r.strategy == "causal-effect") EXPECT_DOUBLE_EQ(r.exact_cost, r.mc.mean);
    }
    EXPECT_EQ(line_count(out / "cost_report.csv"), 7u);
}

TEST(CostExact, OverCapacityIsAFailure) {
    auto out = scratch("cost_cap");
    auto cfg = ExperimentConfig::from_text("family=tree\nn=30\nb=3\nseeds=1\nstrategies=random\nnode_cap=20\n");
    EXPECT_EQ(cmd_cost_exact(cfg, out).exit_code(), 2);
}

TEST(Gridworld, CurvesAndSummary) {
    auto out = scratch("grid");
    std::vector<GridSummaryRow> rows;
    auto cfg = ExperimentConfig::from_text("strategies=causal-effect\ndiscovery=exact\nseeds=2\n");
    EXPECT_EQ(cmd_gridworld(cfg, out, &rows).exit_code(), 0);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) EXPECT_TRUE(r.reached);
    EXPECT_TRUE(fs::exists(out / "gridworld" / "causal-effect_s0.csv"));
    auto again = scratch("grid_again");
    cmd_gridworld(cfg, again);
    EXPECT_EQ(slurp(out / "gridworld.csv"), slurp(again / "gridworld.csv"));
    EXPECT_EQ(slurp(out / "gridworld" / "causal-effect_s1.csv"), slurp(again / "gridworld" / "causal-effect_s1.csv"));
}

TEST(Binary, ExitCodes) {
    auto out = scratch("binary");
    auto good = out / "good.cfg", bad = out / "bad.cfg", unknown = out / "unknown.cfg";
    std::ofstream(good) << "family=tree\nn=13,40\nseeds=3\n";
    std::ofstream(bad) << "family=tree\nn=13\nb=1\nseeds=1\n";
    std::ofstream(unknown) << "colour=blue\n";
    EXPECT_EQ(run_cli("gen --config " + good.string() + " --out " + (out / "g").string()), 0);
    EXPECT_EQ(run_cli("sweep --config " + good.string() + " --out " + (out / "s").string() + " --workers 2 --seed 4"), 0);
    EXPECT_NE(slurp(out / "s" / "sweep.csv").find(",4,"), std::string::npos);
    EXPECT_EQ(run_cli("sweep --config " + bad.string() + " --out " + (out / "b").string()), 2);
    EXPECT_EQ(run_cli("sweep --config " + unknown.string() + " --out " + (out / "u").string()), 2);
    EXPECT_EQ(run_cli("frobnicate"), 2);
    EXPECT_EQ(run_cli("--help"), 0);
}
