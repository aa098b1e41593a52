#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "hrc/cost.hpp"
#include "hrc/discoverable.hpp"
#include "hrc/graph_io.hpp"
#include "hrc/hrc_grid.hpp"
#include "hrc/ssd.hpp"

namespace hrc {

namespace fs = std::filesystem;

// Flat key=value configuration. Every key has a default; unknown keys are
// an error.
class ExperimentConfig {
public:
    static const std::map<std::string, std::string>& defaults() {
        static const std::map<std::string, std::string> d{
            {"family", "tree"},
            {"n", "13,40,121"},
            {"b", "3"},
            {"c", "0.5"},
            {"p", "0.5"},
            {"kinds", "random"},
            {"strategies", "random,causal-effect"},
            {"engines", "oracle,l1"},
            {"errors", "none"},
            {"metric", "formulated"},
            {"seeds", "10"},
            {"seed", "0"},
            {"T", "20"},
            {"T_prime", "10"},
            {"cost_T", "1"},
            {"cost_T_prime", "1"},
            {"cost_w", "1"},
            {"rho", "0"},
            {"lambdas", "0.0001"},
            {"samples", "0"},
            {"mc_runs", "1000"},
            {"node_cap", "20"},
            {"out", "out"},
            {"workers", "1"},
            {"discovery", "ssd-oracle"},
            {"phi_causal", "0.9"},
            {"mix_p", "0.1"},
            {"max_actions", "20"},
            {"max_steps", "60"},
            {"layout", ""},
            {"episode_budget", "100"},
            {"explore_delta", "20"},
            {"probe_budget", "200000"},
            {"learning_rate", "0.1"},
            {"gamma", "0.95"},
            {"eps_start", "1.0"},
            {"eps_end", "0.05"},
            {"eps_decay_episodes", "300"},
            {"eval_epsilon", "0.05"},
            {"eval_episodes", "100"},
            {"eval_target", "0.9"},
        };
        return d;
    }

    ExperimentConfig() : values_(defaults()) {}

    static ExperimentConfig parse(std::istream& is) {
        ExperimentConfig cfg;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key=value");
            cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
        return cfg;
    }

    static ExperimentConfig from_text(const std::string& text) {
        std::istringstream is(text);
        return parse(is);
    }

    static ExperimentConfig from_file(const fs::path& p) {
        std::ifstream is(p);
        if (!is) throw std::runtime_error("cannot open config " + p.string());
        return parse(is);
    }

    void set(const std::string& key, const std::string& value) {
        if (!defaults().count(key)) throw std::invalid_argument("unknown config key: " + key);
        values_[key] = value;
    }

    const std::string& str(const std::string& key) const {
        auto it = values_.find(key);
        if (it == values_.end()) throw std::invalid_argument("unknown config key: " + key);
        return it->second;
    }

    double num(const std::string& key) const { return to_double(key, str(key)); }
    std::size_t count(const std::string& key) const { return to_count(key, str(key)); }

    std::vector<std::string> list(const std::string& key) const {
        std::vector<std::string> out;
        std::istringstream is(str(key));
        std::string item;
        while (std::getline(is, item, ','))
            if (!trim(item).empty()) out.push_back(trim(item));
        return out;
    }
    std::vector<double> nums(const std::string& key) const {
        std::vector<double> out;
        for (const auto& s : list(key)) out.push_back(to_double(key, s));
        return out;
    }
    std::vector<std::size_t> counts(const std::string& key) const {
        std::vector<std::size_t> out;
        for (const auto& s : list(key)) out.push_back(to_count(key, s));
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
    }
    static double to_double(const std::string& key, const std::string& s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw std::invalid_argument("config " + key + ": not a number: " + s);
        return v;
    }
    static std::size_t to_count(const std::string& key, const std::string& s) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("config " + key + ": not a non-negative integer: " + s);
        return std::stoull(s);
    }

    std::map<std::string, std::string> values_;
};

inline std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Density parameter list for a family: b for trees, c for semi-ER, p for
// the plain upper-triangular generator.
inline std::vector<double> family_params(const ExperimentConfig& cfg) {
    const auto& f = cfg.str("family");
    if (f == "tree") return cfg.nums("b");
    if (f == "semi-er") return cfg.nums("c");
    if (f == "upper") return cfg.nums("p");
    throw std::invalid_argument("unknown family: " + f);
}

inline SubgoalGraph make_graph(const std::string& family, std::size_t n, double param, KindMode kinds,
                               std::uint64_t seed) {
    SubgoalGraph g;
    if (family == "tree") {
        if (param < 2 || param != std::floor(param)) throw std::invalid_argument("tree branching must be an integer >= 2");
        g = gen_tree(n, static_cast<std::size_t>(param), seed);
    } else if (family == "semi-er") {
        g = gen_semi_er(n, param, seed);
    } else if (family == "upper") {
        g = gen_upper_triangular(n, param, seed);
    } else {
        throw std::invalid_argument("unknown family: " + family);
    }
    return assign_kinds(std::move(g), kinds, seed);
}

inline std::string graph_id(const std::string& family, std::size_t n, double param, std::uint64_t seed) {
    return family + "_n" + std::to_string(n) + "_cb" + format_number(param) + "_s" + std::to_string(seed);
}

// Writes `text` to `p` through a temporary file so a partial file never
// looks complete.
inline void write_atomically(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        os << text;
    }
    fs::rename(tmp, p);
}

struct CommandReport {
    std::size_t items = 0;
    std::size_t failures = 0;
    std::size_t skipped = 0;
    std::vector<std::string> errors;
    int exit_code() const { return failures ? 2 : 0; }
};

// ---- gen ----------------------------------------------------------------

inline CommandReport cmd_gen(const ExperimentConfig& cfg, const fs::path& out) {
    CommandReport rep;
    const auto family = cfg.str("family");
    const auto kinds = parse_kind_mode(cfg.str("kinds"));
    const std::uint64_t base = cfg.count("seed");
    std::ostringstream manifest;
    manifest << "graph_id,family,n,c_or_b,seed,edges,final_ancestors\n";
    for (std::size_t n : cfg.counts("n"))
        for (double cb : family_params(cfg))
            for (std::size_t s = 0; s < cfg.count("seeds"); ++s) {
                const std::uint64_t seed = base + s;
                auto id = graph_id(family, n, cb, seed);
                try {
                    auto g = make_graph(family, n, cb, kinds, seed);
                    write_atomically(out / "graphs" / (id + ".graph"), to_text(g));
                    manifest << id << ',' << family << ',' << n << ',' << format_number(cb) << ',' << seed << ','
                             << g.edge_count() << ',' << ancestors(g, g.final_node()).size() << '\n';
                    ++rep.items;
                } catch (const std::exception& e) {
                    ++rep.failures;
                    rep.errors.push_back(id + ": " + e.what());
                }
            }
    write_atomically(out / "manifest.csv", manifest.str());
    return rep;
}

// ---- sweep --------------------------------------------------------------

struct SweepRow {
    std::string family;
    std::size_t n = 0;
    double c_or_b = 0;
    std::string strategy;
    std::uint64_t seed = 0;
    double cost = 0;
    std::size_t additions = 0;
    bool success = false;
};

inline const char* sweep_header() { return "family,n,c_or_b,strategy,seed,cost,additions,success\n"; }

inline std::string format_row(const SweepRow& r) {
    std::ostringstream os;
    os << std::setprecision(12) << r.family << ',' << r.n << ',' << format_number(r.c_or_b) << ',' << r.strategy << ','
       << r.seed << ',' << r.cost << ',' << r.additions << ',' << (r.success ? 1 : 0) << '\n';
    return os.str();
}

inline std::vector<SweepRow> read_sweep_rows(const fs::path& p) {
    std::ifstream is(p);
    if (!is) throw std::runtime_error("cannot read " + p.string());
    std::string line;
    std::getline(is, line);
    std::vector<SweepRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string f[8];
        for (auto& s : f) std::getline(ls, s, ',');
        rows.push_back(SweepRow{f[0], std::stoull(f[1]), std::stod(f[2]), f[3], std::stoull(f[4]), std::stod(f[5]),
                                std::stoull(f[6]), f[7] == "1"});
    }
    return rows;
}

// Ordinary least squares slope of ln(cost) on ln(n) over the `tail` largest n.
inline double tail_slope(std::vector<std::pair<double, double>> points, std::size_t tail = 3) {
    std::sort(points.begin(), points.end());
    if (points.size() > tail) points.erase(points.begin(), points.end() - static_cast<std::ptrdiff_t>(tail));
    if (points.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double sx = 0, sy = 0;
    for (auto& [n, c] : points) {
        if (n <= 0 || c <= 0) return std::numeric_limits<double>::quiet_NaN();
        sx += std::log(n);
        sy += std::log(c);
    }
    const double k = static_cast<double>(points.size()), mx = sx / k, my = sy / k;
    double num = 0, den = 0;
    for (auto& [n, c] : points) {
        num += (std::log(n) - mx) * (std::log(c) - my);
        den += (std::log(n) - mx) * (std::log(n) - mx);
    }
    return num / den;
}

struct SweepSeries {
    std::string family;
    double c_or_b = 0;
    std::string strategy;
    std::map<std::size_t, double> mean_cost;  // n -> mean
    double slope = 0;
};

inline std::vector<SweepSeries> summarize_sweep(const std::vector<SweepRow>& rows) {
    std::map<std::tuple<std::string, double, std::string>, std::map<std::size_t, std::pair<double, std::size_t>>> acc;
    for (const auto& r : rows) {
        auto& cell = acc[{r.family, r.c_or_b, r.strategy}][r.n];
        cell.first += r.cost;
        ++cell.second;
    }
    std::vector<SweepSeries> out;
    for (const auto& [key, by_n] : acc) {
        SweepSeries s{std::get<0>(key), std::get<1>(key), std::get<2>(key), {}, 0};
        std::vector<std::pair<double, double>> pts;
        for (const auto& [n, sum_count] : by_n) {
            double m = sum_count.first / static_cast<double>(sum_count.second);
            s.mean_cost[n] = m;
            pts.emplace_back(static_cast<double>(n), m);
        }
        s.slope = tail_slope(pts);
        out.push_back(std::move(s));
    }
    return out;
}

struct SweepCell {
    std::string family;
    std::size_t n;
    double c_or_b;
    StrategyKind strategy;

    std::string name() const {
        return family + "_n" + std::to_string(n) + "_cb" + format_number(c_or_b) + "_" + strategy_name(strategy);
    }
};

inline std::vector<SweepRow> run_sweep_cell(const SweepCell& cell, const ExperimentConfig& cfg) {
    const auto kinds = parse_kind_mode(cfg.str("kinds"));
    const bool additions = cfg.str("metric") == "additions";
    if (!additions && cfg.str("metric") != "formulated") throw std::invalid_argument("metric must be formulated or additions");
    SearchOptions so;
    const auto& errs = cfg.str("errors");
    if (errs == "inverse-t")
        so.errors = ErrorSchedule::InverseT;
    else if (errs != "none")
        throw std::invalid_argument("errors must be none or inverse-t");
    so.params = CostParams{cfg.num("cost_T"), cfg.num("cost_T_prime"), cfg.num("cost_w")};
    std::vector<SweepRow> rows;
    const std::uint64_t base = cfg.count("seed");
    for (std::size_t s = 0; s < cfg.count("seeds"); ++s) {
        const std::uint64_t seed = base + s;
        auto g = make_graph(cell.family, cell.n, cell.c_or_b, kinds, seed);
        auto r = graph_search(g, cell.strategy, seed, so);
        rows.push_back(SweepRow{cell.family, cell.n, cell.c_or_b, strategy_name(cell.strategy), seed,
                                additions ? static_cast<double>(r.c) : r.formulated_cost, r.additions, r.success});
    }
    return rows;
}

struct SweepResult {
    CommandReport report;
    std::vector<SweepRow> rows;
    std::vector<SweepSeries> series;
};

// Runs each (n, c_or_b, strategy) cell into its own file, skipping cells whose
// file already exists, then merges all cell files.
inline SweepResult cmd_sweep(const ExperimentConfig& cfg, const fs::path& out, std::size_t workers) {
    std::vector<SweepCell> cells;
    for (std::size_t n : cfg.counts("n"))
        for (double cb : family_params(cfg))
            for (const auto& s : cfg.list("strategies")) cells.push_back(SweepCell{cfg.str("family"), n, cb, parse_strategy(s)});

    SweepResult res;
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            const auto& cell = cells[i];
            fs::path file = out / "cells" / (cell.name() + ".csv");
            if (fs::exists(file)) {
                std::lock_guard lk(mu);
                ++res.report.skipped;
                continue;
            }
            try {
                std::string text = sweep_header();
                for (const auto& r : run_sweep_cell(cell, cfg)) text += format_row(r);
                write_atomically(file, text);
                std::lock_guard lk(mu);
                ++res.report.items;
            } catch (const std::exception& e) {
                std::lock_guard lk(mu);
                ++res.report.failures;
                res.report.errors.push_back(cell.name() + ": " + e.what());
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::max<std::size_t>(1, workers); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (const auto& cell : cells) {
        fs::path file = out / "cells" / (cell.name() + ".csv");
        if (!fs::exists(file)) continue;
        auto rows = read_sweep_rows(file);
        res.rows.insert(res.rows.end(), rows.begin(), rows.end());
    }
    std::sort(res.rows.begin(), res.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return std::tie(a.family, a.c_or_b, a.strategy, a.n, a.seed) < std::tie(b.family, b.c_or_b, b.strategy, b.n, b.seed);
    });
    std::string merged = sweep_header();
    for (const auto& r : res.rows) merged += format_row(r);
    write_atomically(out / "sweep.csv", merged);

    res.series = summarize_sweep(res.rows);
    std::ostringstream slopes;
    slopes << "family,c_or_b,strategy,slope\n";
    for (const auto& s : res.series)
        slopes << s.family << ',' << format_number(s.c_or_b) << ',' << s.strategy << ',' << format_number(s.slope) << '\n';
    write_atomically(out / "slopes.csv", slopes.str());

    std::ostringstream plot;
    plot << "source: sweep.csv\n"
         << "x: n (log scale)\n"
         << "y: mean " << cfg.str("metric") << " cost (log scale)\n"
         << "group: family, c_or_b\n";
    for (const auto& s : res.series)
        plot << "series: " << s.family << " c_or_b=" << format_number(s.c_or_b) << " strategy=" << s.strategy
             << " slope=" << format_number(s.slope) << '\n';
    write_atomically(out / "sweep.plot.txt", plot.str());
    if (!res.report.errors.empty()) {
        std::string log;
        for (const auto& e : res.report.errors) log += e + "\n";
        write_atomically(out / "errors.log", log);
    }
    return res;
}

// ---- discover-eval ------------------------------------------------------

struct DiscoverEvalRow {
    std::string graph_id;
    std::string engine;
    double lambda = 0;
    std::string truth;  // "discoverable" or "raw"
    ShdReport shd;
};

inline std::vector<DiscoverEvalRow> evaluate_discovery(const std::string& id, const SubgoalGraph& g, const Dataset& d,
                                                       const std::vector<std::string>& engines,
                                                       const std::vector<double>& lambdas) {
    auto disc = parent_map_edges(discoverable_parents(g));
    auto raw = g.edges();
    std::vector<DiscoverEvalRow> rows;
    for (const auto& e : engines) {
        auto engine = parse_ssd_engine(e);
        for (double lam : lambdas) {
            DiscoverOptions opt;
            opt.engine = engine;
            opt.lambda = lam;
            opt.sticky = false;
            auto est = discover_full(d, opt).edges();
            const char* name = engine == SsdEngine::Oracle ? "oracle" : "l1";
            rows.push_back(DiscoverEvalRow{id, name, lam, "discoverable", shd(est, disc)});
            rows.push_back(DiscoverEvalRow{id, name, lam, "raw", shd(est, raw)});
        }
    }
    return rows;
}

inline CommandReport cmd_discover_eval(const ExperimentConfig& cfg, const fs::path& out,
                                       std::vector<DiscoverEvalRow>* rows_out = nullptr) {
    CommandReport rep;
    const auto family = cfg.str("family");
    const auto kinds = parse_kind_mode(cfg.str("kinds"));
    const std::uint64_t base = cfg.count("seed");
    std::vector<DiscoverEvalRow> rows;
    for (std::size_t n : cfg.counts("n"))
        for (double cb : family_params(cfg))
            for (std::size_t s = 0; s < cfg.count("seeds"); ++s) {
                const std::uint64_t seed = base + s;
                auto id = graph_id(family, n, cb, seed);
                try {
                    auto g = make_graph(family, n, cb, kinds, seed);
                    auto d = assignment_dataset(g, cfg.count("samples"), cfg.num("rho"), seed);
                    auto r = evaluate_discovery(id, g, d, cfg.list("engines"), cfg.nums("lambdas"));
                    rows.insert(rows.end(), r.begin(), r.end());
                    ++rep.items;
                } catch (const std::exception& e) {
                    ++rep.failures;
                    rep.errors.push_back(id + ": " + e.what());
                }
            }
    std::ostringstream os;
    os << "graph_id,engine,lambda,truth,missing,extra,shd\n";
    for (const auto& r : rows)
        os << r.graph_id << ',' << r.engine << ',' << format_number(r.lambda) << ',' << r.truth << ',' << r.shd.missing
           << ',' << r.shd.extra << ',' << r.shd.shd << '\n';
    write_atomically(out / "discover_eval.csv", os.str());
    if (rows_out) *rows_out = std::move(rows);
    return rep;
}

// ---- cost-exact ---------------------------------------------------------

struct CostReportRow {
    std::string graph_id;
    std::size_t n = 0;
    double c_or_b = 0;
    std::string strategy;
    double exact_cost = 0;
    McCost mc;
};

inline CommandReport cmd_cost_exact(const ExperimentConfig& cfg, const fs::path& out,
                                    std::vector<CostReportRow>* rows_out = nullptr) {
    CommandReport rep;
    const auto family = cfg.str("family");
    const auto kinds = parse_kind_mode(cfg.str("kinds"));
    const std::uint64_t base = cfg.count("seed");
    const CostParams params{cfg.num("cost_T"), cfg.num("cost_T_prime"), cfg.num("cost_w")};
    std::vector<CostReportRow> rows;
    for (std::size_t n : cfg.counts("n"))
        for (double cb : family_params(cfg))
            for (std::size_t s = 0; s < cfg.count("seeds"); ++s) {
                const std::uint64_t seed = base + s;
                auto id = graph_id(family, n, cb, seed);
                for (const auto& name : cfg.list("strategies")) {
                    try {
                        auto g = make_graph(family, n, cb, kinds, seed);
                        auto kind = parse_strategy(name);
                        CostReportRow row{id, n, cb, strategy_name(kind), 0, {}};
                        row.exact_cost = expected_cost_exact(g, kind, params, cfg.count("node_cap")).expected_cost;
                        row.mc = monte_carlo_cost(g, kind, params, cfg.count("mc_runs"), seed);
                        rows.push_back(row);
                        ++rep.items;
                    } catch (const std::exception& e) {
                        ++rep.failures;
                        rep.errors.push_back(id + "/" + name + ": " + e.what());
                    }
                }
            }
    std::ostringstream os;
    os << std::setprecision(12) << "graph_id,n,c_or_b,strategy,exact_cost,mc_mean,mc_stderr,runs\n";
    for (const auto& r : rows)
        os << r.graph_id << ',' << r.n << ',' << format_number(r.c_or_b) << ',' << r.strategy << ',' << r.exact_cost
           << ',' << r.mc.mean << ',' << r.mc.stderr_ << ',' << r.mc.runs << '\n';
    write_atomically(out / "cost_report.csv", os.str());
    if (rows_out) *rows_out = std::move(rows);
    return rep;
}

// ---- gridworld ----------------------------------------------------------

inline GridHrcConfig grid_config_from(const ExperimentConfig& cfg) {
    GridHrcConfig g;
    g.hrc.T = cfg.count("T");
    g.hrc.T_prime = cfg.count("T_prime");
    g.hrc.phi_causal = cfg.num("phi_causal");
    g.hrc.mix_p = cfg.num("mix_p");
    g.hrc.discovery_engine = parse_discovery_engine(cfg.str("discovery"));
    g.hrc.lambda = cfg.nums("lambdas").at(0);
    g.hrc.max_actions = cfg.count("max_actions");
    g.hrc.max_steps = cfg.count("max_steps");
    g.q.learning_rate = cfg.num("learning_rate");
    g.q.gamma = cfg.num("gamma");
    g.q.eps_start = cfg.num("eps_start");
    g.q.eps_end = cfg.num("eps_end");
    g.q.eps_decay_episodes = cfg.count("eps_decay_episodes");
    if (!cfg.str("layout").empty()) {
        std::ifstream is(cfg.str("layout"));
        if (!is) throw std::runtime_error("cannot open layout " + cfg.str("layout"));
        std::stringstream ss;
        ss << is.rdbuf();
        g.layout = ss.str();
    }
    g.episode_budget = cfg.count("episode_budget");
    g.explore_delta = cfg.count("explore_delta");
    g.probe_budget = cfg.count("probe_budget");
    g.eval_epsilon = cfg.num("eval_epsilon");
    g.eval_episodes = cfg.count("eval_episodes");
    g.eval_target = cfg.num("eval_target");
    return g;
}

struct GridSummaryRow {
    std::string strategy;
    std::uint64_t seed = 0;
    bool reached = false;
    std::size_t probes_at_target = 0;
    std::size_t total_probes = 0;
    double final_success = 0;
};

inline CommandReport cmd_gridworld(const ExperimentConfig& cfg, const fs::path& out,
                                   std::vector<GridSummaryRow>* rows_out = nullptr) {
    CommandReport rep;
    auto base_cfg = grid_config_from(cfg);
    const std::uint64_t base = cfg.count("seed");
    std::vector<GridSummaryRow> rows;
    for (const auto& name : cfg.list("strategies")) {
        auto kind = parse_strategy(name);
        for (std::size_t s = 0; s < cfg.count("seeds"); ++s) {
            const std::uint64_t seed = base + s;
            try {
                auto gc = base_cfg;
                gc.hrc.strategy = kind;
                auto r = run_hrc_grid(gc, seed);
                std::ostringstream curve;
                write_curve_csv(curve, r.curve);
                write_atomically(out / "gridworld" / (std::string(strategy_name(kind)) + "_s" + std::to_string(seed) + ".csv"),
                                 curve.str());
                rows.push_back(GridSummaryRow{strategy_name(kind), seed, r.reached_target, r.probes_at_target,
                                              r.state.ledger.total(), r.curve.empty() ? 0.0 : r.curve.back().success});
                ++rep.items;
                if (!r.reached_target) rep.errors.push_back(name + "/" + std::to_string(seed) + ": target not reached");
            } catch (const std::exception& e) {
                ++rep.failures;
                rep.errors.push_back(name + "/" + std::to_string(seed) + ": " + e.what());
            }
        }
    }
    std::ostringstream os;
    os << "strategy,seed,reached,probes_at_target,total_probes,final_success\n";
    for (const auto& r : rows)
        os << r.strategy << ',' << r.seed << ',' << (r.reached ? 1 : 0) << ',' << r.probes_at_target << ','
           << r.total_probes << ',' << format_number(r.final_success) << '\n';
    write_atomically(out / "gridworld.csv", os.str());
    if (rows_out) *rows_out = std::move(rows);
    return rep;
}

}  // namespace hrc
