#pragma once

#include <ostream>
#include <random>
#include <string>

#include "hrc/ascm.hpp"
#include "hrc/cost.hpp"
#include "hrc/hierarchy.hpp"
#include "hrc/ledger.hpp"
#include "hrc/reveal.hpp"
#include "hrc/search.hpp"
#include "hrc/ssd.hpp"
#include "hrc/strategy.hpp"

namespace hrc {

enum class DiscoveryEngine { SsdL1, SsdOracle, Exact, ExactWithError };

inline DiscoveryEngine parse_discovery_engine(const std::string& s) {
    if (s == "ssd-l1") return DiscoveryEngine::SsdL1;
    if (s == "ssd-oracle") return DiscoveryEngine::SsdOracle;
    if (s == "exact") return DiscoveryEngine::Exact;
    if (s == "exact-with-error") return DiscoveryEngine::ExactWithError;
    throw std::invalid_argument("unknown discovery engine: " + s);
}

inline bool is_exact(DiscoveryEngine e) { return e == DiscoveryEngine::Exact || e == DiscoveryEngine::ExactWithError; }

struct HrcConfig {
    std::size_t T = 20;
    std::size_t T_prime = 10;
    double phi_causal = 0.5;
    double mix_p = 0.1;
    DiscoveryEngine discovery_engine = DiscoveryEngine::SsdOracle;
    double lambda = default_lambda;
    std::size_t max_actions = 20;
    std::size_t max_steps = 60;
    StrategyKind strategy = StrategyKind::CausalEffect;
    StrategyOptions strategy_options;
    RankingModel ranking = RankingModel::Recovered;
    std::size_t probe_budget = 0;  // 0: unlimited
    std::size_t training_rounds = 1;
    std::optional<double> training_success;

    ErrorSchedule error_schedule() const {
        return discovery_engine == DiscoveryEngine::ExactWithError ? ErrorSchedule::InverseT : ErrorSchedule::None;
    }

    void validate() const {
        if (!(phi_causal > 0 && phi_causal <= 1)) throw std::invalid_argument("phi_causal must lie in (0, 1]");
        if (!(mix_p >= 0 && mix_p <= 1)) throw std::invalid_argument("mix_p must lie in [0, 1]");
        if (T < 1 || T_prime < 1) throw std::invalid_argument("T and T_prime must be >= 1");
        if (training_rounds < 1) throw std::invalid_argument("training_rounds must be >= 1");
    }
};

struct RunLogRow {
    std::size_t t = 0;
    std::optional<node_id> x_sel;
    std::size_t is_size = 0, cs_size = 0, ccs_size = 0;
    std::size_t probes_this_iter = 0, cumulative_probes = 0;
};

inline void write_run_log_csv(std::ostream& os, const std::vector<RunLogRow>& rows) {
    os << "t,x_sel,is_size,cs_size,ccs_size,probes_this_iter,cumulative_probes\n";
    for (const auto& r : rows) {
        os << r.t << ',';
        if (r.x_sel) os << *r.x_sel;
        os << ',' << r.is_size << ',' << r.cs_size << ',' << r.ccs_size << ',' << r.probes_this_iter << ','
           << r.cumulative_probes << '\n';
    }
}

inline void write_decisions_csv(std::ostream& os, const std::vector<Decision>& ds) {
    os << "iteration,candidates,scores,chosen\n";
    for (const auto& d : ds) {
        os << d.iteration << ',';
        for (std::size_t i = 0; i < d.candidates.size(); ++i) os << (i ? ";" : "") << d.candidates[i];
        os << ',';
        for (std::size_t i = 0; i < d.scores.size(); ++i) os << (i ? ";" : "") << d.scores[i];
        os << ',' << d.chosen << '\n';
    }
}

struct HrcRunState {
    NodeSet IS, CS, CCS;
    std::vector<node_id> order;
    HierarchicalStructure hs;
    std::size_t t = 0;
    CostLedger ledger;
    RecoveredGraph recovered;
    std::map<node_id, NodeKind> kinds;
    std::vector<RunLogRow> log;
    std::vector<Decision> decisions;
};

struct HrcResult {
    HrcRunState state;
    bool success = false;
    bool budget_exhausted = false;
};

// Ranking model assembled from what the run knows: hierarchy edges, the
// latest recovered edges, and kinds learned so far.
inline SubgoalGraph known_model(const HrcRunState& s, std::size_t n, node_id goal) {
    SubgoalGraph m(n, goal);
    for (const auto& [p, c] : s.hs.edges()) m.add_edge(p, c);
    for (const auto& [p, c] : s.recovered.edges())
        if (!m.has_edge(c, p)) m.add_edge(p, c);
    for (const auto& [v, k] : s.kinds) m.set_kind(v, k);
    return m;
}

inline EdgeSet edges_into(const RecoveredGraph& rg, const NodeSet& nodes) {
    EdgeSet out;
    for (node_id c : nodes)
        for (node_id p : rg.parents_of(c)) out.emplace(p, c);
    return out;
}

namespace detail {

// Steps the env along the causal order of `u`, one do-attempt per
// unachieved node. Returns false once the horizon is hit.
template <class Rng>
bool execute_by_intervention(AscmEnv& env, const HierarchicalStructure& hs, node_id u, double p, CostLedger& ledger,
                             Rng& rng) {
    std::bernoulli_distribution lands(p);
    for (node_id v : causal_order(hs, u)) {
        if (env.achieved(v)) continue;
        if (env.state().t >= env.config().horizon_H) return false;
        if (lands(rng)) env.intervene(v, 1);
        env.step();
        ledger.charge_training();
    }
    return true;
}

}  // namespace detail

// Simulated subgoal training: each trajectory interleaves executions of
// random unachieved IS members (probability mix_p) before one attempt at the
// target. Targets below phi_causal are removed from hs.
template <class Rng>
NodeSet subgoal_training(AscmEnv& env, HierarchicalStructure& hs, const NodeSet& is, const NodeSet& ccs,
                         const HrcConfig& cfg, double success_prob, CostLedger& ledger, Rng& rng,
                         bool final_only = true) {
    const node_id goal = env.graph().final_node();
    NodeSet targets = final_only && ccs.count(goal) ? NodeSet{goal} : ccs;
    NodeSet trained;
    std::bernoulli_distribution interleave(cfg.mix_p);
    for (node_id g : targets) {
        std::size_t wins = 0;
        for (std::size_t k = 0; k < cfg.T_prime; ++k) {
            env.reset();
            bool alive = true;
            while (alive) {
                std::vector<node_id> open;
                for (node_id v : is)
                    if (!env.achieved(v)) open.push_back(v);
                if (!open.empty() && interleave(rng)) {
                    node_id u = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
                    alive = detail::execute_by_intervention(env, hs, u, success_prob, ledger, rng);
                    continue;
                }
                detail::execute_by_intervention(env, hs, g, success_prob, ledger, rng);
                break;
            }
            wins += env.achieved(g);
        }
        if (static_cast<double>(wins) >= cfg.phi_causal * static_cast<double>(cfg.T_prime))
            trained.insert(g);
        else
            hs.remove(g);
    }
    // Skipped candidates stay unleveled so a later iteration can re-level them.
    for (node_id v : ccs)
        if (!targets.count(v)) hs.remove(v);
    return trained;
}

// The HRC loop on an A-SCM environment.
inline HrcResult run_hrc(AscmEnv& env, const HrcConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const SubgoalGraph& truth = env.graph();
    const std::size_t n = truth.size();
    const node_id goal = truth.final_node();
    const double train_p = cfg.training_success.value_or(env.config().intervention_success);
    std::mt19937_64 rng(mix_seed(seed, 1));
    std::mt19937_64 reveal_rng(mix_seed(seed, 2));
    Strategy strat(cfg.strategy, mix_seed(seed, 3), cfg.strategy_options);
    ExactDiscovery exact(truth, cfg.error_schedule());
    const std::size_t steps_at_start = env.total_steps();

    HrcResult res;
    auto& s = res.state;
    s.hs = HierarchicalStructure(n);
    s.recovered = RecoveredGraph(n);

    // Pre-train roots.
    s.ledger.begin(0);
    auto roots = truth.roots();
    s.hs = update_hierarchy(s.hs, roots, {});
    s.CS = subgoal_training(env, s.hs, {}, NodeSet(roots.begin(), roots.end()), cfg, train_p, s.ledger, rng,
                            false);
    s.log.push_back(RunLogRow{0, std::nullopt, 0, s.CS.size(), 0, s.ledger.total(), s.ledger.total()});

    auto model_for_ranking = [&]() { return cfg.ranking == RankingModel::Truth ? truth : known_model(s, n, goal); };
    strat.begin(s.CS, model_for_ranking(), goal);

    NodeSet all_nodes;
    for (node_id v = 0; v < n; ++v) all_nodes.insert(v);

    while (!s.IS.count(goal) && !s.CS.empty()) {
        if (cfg.probe_budget && s.ledger.total() >= cfg.probe_budget) {
            res.budget_exhausted = true;
            break;
        }
        ++s.t;
        s.ledger.begin(s.t);
        const std::size_t before = s.ledger.total();
        Decision d;
        d.iteration = s.t;
        node_id x = strat.pick(s.CS, s.IS, model_for_ranking(), goal, &d);
        d.chosen = x;
        s.decisions.push_back(d);
        s.IS.insert(x);
        s.CS.erase(x);
        s.order.push_back(x);

        SamplingTally tally;
        Dataset data = collect_interventional(env, s.IS, cfg.T, &tally);
        s.ledger.charge_intervention(tally.intervention);
        s.ledger.charge_exploration(tally.exploration);

        if (is_exact(cfg.discovery_engine)) {
            exact.update(s.IS, s.t, reveal_rng);
            s.recovered = exact.recovered();
            for (const auto& [v, k] : s.recovered.kinds) s.kinds[v] = k;
        } else {
            DiscoverOptions opt;
            opt.lambda = cfg.lambda;
            opt.engine = cfg.discovery_engine == DiscoveryEngine::SsdOracle ? SsdEngine::Oracle : SsdEngine::L1;
            opt.sticky = env.config().mode == AscmMode::Persistent;
            s.recovered = discover(data, s.IS, all_nodes, opt);
            for (const auto& [v, k] : s.recovered.kinds)
                if (!s.hs.leveled(v)) s.kinds[v] = k;
        }

        s.CCS = candidate_controllable(s.recovered, s.IS, s.CS);
        s.hs = update_hierarchy(s.hs, std::vector<node_id>(s.CCS.begin(), s.CCS.end()), edges_into(s.recovered, s.CCS));
        auto trained = subgoal_training(env, s.hs, s.IS, s.CCS, cfg, train_p, s.ledger, rng);
        s.CS.insert(trained.begin(), trained.end());

        auto model = model_for_ranking();
        strat.expanded(x, known_model(s, n, goal), s.IS, model, goal, cfg.ranking == RankingModel::Recovered);
        const std::size_t spent = s.ledger.total() - before;
        s.log.push_back(RunLogRow{s.t, x, s.IS.size(), s.CS.size(), s.CCS.size(), spent, s.ledger.total()});
    }
    res.success = s.IS.count(goal) > 0;
    if (env.total_steps() - steps_at_start != s.ledger.total())
        throw std::logic_error("ledger does not match environment step count");
    return res;
}

}  // namespace hrc
