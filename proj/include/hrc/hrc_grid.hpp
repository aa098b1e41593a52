#pragma once

#include <random>
#include <string>

#include "hrc/gridworld.hpp"
#include "hrc/hrc.hpp"
#include "hrc/policy.hpp"

namespace hrc {

inline HrcConfig grid_hrc_defaults() {
    HrcConfig c;
    c.phi_causal = 0.9;
    return c;
}

struct GridHrcConfig {
    HrcConfig hrc = grid_hrc_defaults();
    QConfig q;
    std::string layout = grid::default_layout;
    std::size_t episode_budget = 100;
    std::size_t explore_delta = 20;
    std::size_t probe_budget = 200000;
    double eval_epsilon = 0.05;
    std::size_t eval_episodes = 100;
    double eval_target = 0.9;
    std::size_t max_batches = 100;  // per subgoal per training call

    void validate() const {
        hrc.validate();
        q.validate();
        if (episode_budget < 1) throw std::invalid_argument("episode_budget must be >= 1");
        if (!(eval_epsilon >= 0 && eval_epsilon <= 1)) throw std::invalid_argument("eval_epsilon must lie in [0, 1]");
        if (eval_episodes < 1) throw std::invalid_argument("eval_episodes must be >= 1");
        if (max_batches < 1) throw std::invalid_argument("max_batches must be >= 1");
    }
};

struct CurvePoint {
    std::size_t probes = 0;
    double success = 0;
};

struct GridRunResult {
    HrcRunState state;
    TabularPolicy policy;
    std::vector<CurvePoint> curve;
    bool structure_found = false;  // g_n entered IS
    bool reached_target = false;   // eval success >= eval_target
    std::size_t probes_at_target = 0;
    std::size_t env_steps = 0;
};

// Training environment with a step counter that survives resets.
struct CountingGrid {
    GridWorld world;
    std::size_t retired = 0;

    explicit CountingGrid(GridWorld w) : world(std::move(w)) {}
    void reset() {
        retired += world.steps;
        world.reset();
    }
    std::size_t total_steps() const { return retired + world.steps; }
};

inline double evaluate_grid_policy(TabularPolicy pi, const GridLayout& lay, node_id goal,
                                   const HierarchicalStructure& hs, const std::map<node_id, NodeKind>& kinds,
                                   const GridHrcConfig& cfg, std::uint64_t seed) {
    if (!hs.leveled(goal)) return 0.0;
    GridWorld w(lay, cfg.episode_budget);
    std::mt19937_64 rng(seed);
    ExecConfig ec{cfg.hrc.max_actions, cfg.hrc.max_steps};
    ExecContext ctx{&rng, cfg.eval_epsilon, false};
    std::size_t wins = 0;
    for (std::size_t e = 0; e < cfg.eval_episodes; ++e) {
        w.reset();
        while (!w.done() && !w.ever[goal]) {
            auto r = execute_hierarchical_policy(pi, w, goal, hs, kinds, ec, ctx);
            if (r.steps == 0) break;
        }
        wins += w.ever[goal];
    }
    return static_cast<double>(wins) / static_cast<double>(cfg.eval_episodes);
}

namespace detail {

class GridHrc {
public:
    GridHrc(const GridHrcConfig& cfg, std::uint64_t seed)
        : cfg_(cfg), seed_(seed), layout_(parse_layout(cfg.layout)), env_(GridWorld(layout_, cfg.episode_budget)),
          truth_(grid::subgoal_graph()), ec_{cfg.hrc.max_actions, cfg.hrc.max_steps} {
        cfg_.validate();
        res_.policy = TabularPolicy(cfg.q);
        res_.state.hs = HierarchicalStructure(truth_.size());
        res_.state.recovered = RecoveredGraph(truth_.size());
    }

    GridRunResult run() {
        auto& s = res_.state;
        const node_id goal = truth_.final_node();
        Strategy strat(cfg_.hrc.strategy, mix_seed(seed_, 4000), cfg_.hrc.strategy_options);
        ExactDiscovery exact(truth_, cfg_.hrc.error_schedule());
        std::mt19937_64 reveal_rng(mix_seed(seed_, 5000));

        s.ledger.begin(0);
        auto roots = truth_.roots();
        s.hs = update_hierarchy(s.hs, roots, {});
        for (node_id r : roots) s.kinds[r] = NodeKind::Or;
        s.CS = train(NodeSet(roots.begin(), roots.end()), {}, false);
        s.log.push_back(RunLogRow{0, std::nullopt, 0, s.CS.size(), 0, s.ledger.total(), s.ledger.total()});
        record_eval();
        strat.begin(s.CS, known_model(s, truth_.size(), goal), goal);

        NodeSet all_nodes;
        for (node_id v = 0; v < truth_.size(); ++v) all_nodes.insert(v);
        while (!s.IS.count(goal) && !s.CS.empty() && s.ledger.total() < cfg_.probe_budget) {
            ++s.t;
            s.ledger.begin(s.t);
            const std::size_t before = s.ledger.total();
            Decision d;
            d.iteration = s.t;
            node_id x = strat.pick(s.CS, s.IS, known_model(s, truth_.size(), goal), goal, &d);
            d.chosen = x;
            s.decisions.push_back(d);
            s.IS.insert(x);
            s.CS.erase(x);
            s.order.push_back(x);

            Dataset data = sample_interventions(s.IS, mix_seed(seed_, 2000 + s.t));
            if (is_exact(cfg_.hrc.discovery_engine)) {
                exact.update(s.IS, s.t, reveal_rng);
                s.recovered = exact.recovered();
            } else {
                DiscoverOptions opt;
                opt.lambda = cfg_.hrc.lambda;
                opt.engine = cfg_.hrc.discovery_engine == DiscoveryEngine::SsdOracle ? SsdEngine::Oracle : SsdEngine::L1;
                opt.sticky = true;
                s.recovered = discover(data, s.IS, all_nodes, opt);
            }
            for (const auto& [v, k] : s.recovered.kinds)
                if (!s.hs.leveled(v)) s.kinds[v] = k;

            s.CCS = candidate_controllable(s.recovered, s.IS, s.CS);
            s.hs = update_hierarchy(s.hs, std::vector<node_id>(s.CCS.begin(), s.CCS.end()),
                                    edges_into(s.recovered, s.CCS));
            auto trained = train(s.CCS, s.IS, true);
            s.CS.insert(trained.begin(), trained.end());
            strat.expanded(x, known_model(s, truth_.size(), goal), s.IS, known_model(s, truth_.size(), goal), goal,
                           true);
            s.log.push_back(RunLogRow{s.t, x, s.IS.size(), s.CS.size(), s.CCS.size(), s.ledger.total() - before,
                                      s.ledger.total()});
            record_eval();
        }
        res_.structure_found = s.IS.count(goal) > 0;

        // Keep training the final subgoal until evaluation clears the target.
        if (s.hs.leveled(goal)) {
            s.ledger.begin(s.t + 1);
            while (!res_.reached_target && s.ledger.total() < cfg_.probe_budget) {
                train_batch(goal, s.IS);
                record_eval();
            }
        }
        res_.env_steps = env_.total_steps();
        if (res_.env_steps != s.ledger.total()) throw std::logic_error("ledger does not match environment step count");
        return std::move(res_);
    }

private:
    std::mt19937_64& train_rng(node_id g) {
        auto it = train_rngs_.find(g);
        if (it == train_rngs_.end()) it = train_rngs_.emplace(g, std::mt19937_64(mix_seed(seed_, 1000 + g))).first;
        return it->second;
    }

    // One training episode for target g: a random-action prefix of up to
    // explore_delta steps, then unachieved IS members interleaved with
    // probability mix_p before the target. Returns whether g was achieved.
    bool episode(node_id g, const NodeSet& is, bool learn) {
        auto& rng = train_rng(g);
        auto& s = res_.state;
        std::bernoulli_distribution interleave(cfg_.hrc.mix_p);
        ExecContext target_ctx{&rng, cfg_.eval_epsilon, learn};
        ExecContext play_ctx{&rng, cfg_.eval_epsilon, false};
        env_.reset();
        auto& w = env_.world;
        const std::size_t prefix = std::uniform_int_distribution<std::size_t>(0, cfg_.explore_delta)(rng);
        std::uniform_int_distribution<std::size_t> act(0, grid_action_count - 1);
        for (std::size_t k = 0; k < prefix && !w.done() && !w.ever[g]; ++k) {
            grid_step(w, static_cast<GridAction>(act(rng)));
            s.ledger.charge_training();
        }
        while (!w.done() && !w.ever[g]) {
            std::vector<node_id> open;
            for (node_id v : is)
                if (!w.ever[v] && s.hs.leveled(v)) open.push_back(v);
            if (!open.empty() && interleave(rng)) {
                node_id u = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
                s.ledger.charge_training(execute_hierarchical_policy(res_.policy, w, u, s.hs, s.kinds, ec_, play_ctx).steps);
                continue;
            }
            s.ledger.charge_training(execute_hierarchical_policy(res_.policy, w, g, s.hs, s.kinds, ec_, target_ctx).steps);
            break;
        }
        if (learn) res_.policy.count_episode(g);
        return w.ever[g];
    }

    // T' learning episodes, then T' near-greedy episodes whose success ratio
    // is returned.
    double train_batch(node_id g, const NodeSet& is) {
        for (std::size_t k = 0; k < cfg_.hrc.T_prime; ++k) episode(g, is, true);
        std::size_t wins = 0;
        for (std::size_t k = 0; k < cfg_.hrc.T_prime; ++k) wins += episode(g, is, false);
        return static_cast<double>(wins) / static_cast<double>(cfg_.hrc.T_prime);
    }

    // Batches until the success ratio reaches phi_causal; failures leave hs.
    NodeSet train(const NodeSet& ccs, const NodeSet& is, bool final_only) {
        const node_id goal = truth_.final_node();
        NodeSet targets = final_only && ccs.count(goal) ? NodeSet{goal} : ccs;
        NodeSet passed;
        for (node_id g : targets) {
            bool ok = false;
            for (std::size_t b = 0; b < cfg_.max_batches && !ok && res_.state.ledger.total() < cfg_.probe_budget; ++b)
                ok = train_batch(g, is) >= cfg_.hrc.phi_causal;
            if (ok)
                passed.insert(g);
            else
                res_.state.hs.remove(g);
        }
        return passed;
    }

    // Intervention sampling where do(u = 1) is the execution of u's
    // policy. Each policy execution and each exploration step that changes
    // the subgoal vector becomes one abstract transition.
    Dataset sample_interventions(const NodeSet& is, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        auto& s = res_.state;
        ExecContext ctx{&rng, cfg_.eval_epsilon, false};
        std::uniform_int_distribution<std::size_t> act(0, grid_action_count - 1);
        Dataset d;
        d.n = truth_.size();
        for (std::size_t k = 0; k < cfg_.hrc.T; ++k) {
            env_.reset();
            auto& w = env_.world;
            Trajectory traj;
            while (!w.done()) {
                std::vector<node_id> open;
                for (node_id v : is)
                    if (!w.ever[v]) open.push_back(v);
                if (open.empty()) break;
                node_id u = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
                BitVec before = grid_subgoal_vector(w);
                auto r = execute_hierarchical_policy(res_.policy, w, u, s.hs, s.kinds, ec_, ctx);
                s.ledger.charge_intervention(r.steps);
                BitVec after = grid_subgoal_vector(w);
                if (after != before) {
                    Forcing f;
                    if (w.ever[u]) f[u] = 1;
                    traj.push_back(Transition{before, after, f});
                }
                if (r.steps == 0) break;
                for (std::size_t e = 0; e < cfg_.explore_delta && !w.done(); ++e) {
                    BitVec b = grid_subgoal_vector(w);
                    grid_step(w, static_cast<GridAction>(act(rng)));
                    s.ledger.charge_exploration();
                    BitVec a = grid_subgoal_vector(w);
                    if (a != b) traj.push_back(Transition{b, a, {}});
                }
            }
            d.trajectories.push_back(std::move(traj));
        }
        return d;
    }

    void record_eval() {
        const auto& s = res_.state;
        double sr = evaluate_grid_policy(res_.policy, layout_, truth_.final_node(), s.hs, s.kinds, cfg_,
                                         mix_seed(seed_, 3000 + res_.curve.size()));
        res_.curve.push_back(CurvePoint{s.ledger.total(), sr});
        if (!res_.reached_target && sr >= cfg_.eval_target) {
            res_.reached_target = true;
            res_.probes_at_target = s.ledger.total();
        }
    }

    GridHrcConfig cfg_;
    std::uint64_t seed_;
    GridLayout layout_;
    CountingGrid env_;
    SubgoalGraph truth_;
    ExecConfig ec_;
    GridRunResult res_;
    std::map<node_id, std::mt19937_64> train_rngs_;
};

}  // namespace detail

inline GridRunResult run_hrc_grid(const GridHrcConfig& cfg, std::uint64_t seed) {
    return detail::GridHrc(cfg, seed).run();
}

inline void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve) {
    os << "probes,success_ratio\n";
    for (const auto& p : curve) os << p.probes << ',' << p.success << '\n';
}

}  // namespace hrc
