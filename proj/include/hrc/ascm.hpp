#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hrc/graph.hpp"

namespace hrc {

enum class AscmMode { Persistent, Noisy };

struct AscmConfig {
    double noise_rho = 0.0;
    AscmMode mode = AscmMode::Persistent;
    std::size_t horizon_H = 200;
    std::size_t explore_delta = 20;
    double intervention_success = 1.0;

    void validate() const {
        if (!(noise_rho >= 0.0 && noise_rho < 0.5)) throw std::invalid_argument("noise_rho must lie in [0, 0.5)");
        if (horizon_H < 1) throw std::invalid_argument("horizon_H must be >= 1");
        if (explore_delta < 1) throw std::invalid_argument("explore_delta must be >= 1");
        if (!(intervention_success > 0.0 && intervention_success <= 1.0))
            throw std::invalid_argument("intervention_success must lie in (0, 1]");
    }
};

using BitVec = std::vector<std::uint8_t>;
using Forcing = std::map<node_id, std::uint8_t>;

struct AscmState {
    BitVec x;
    std::size_t t = 0;
    bool operator==(const AscmState&) const = default;
};

struct Transition {
    BitVec x_before;
    BitVec x_after;
    Forcing forced;
    bool operator==(const Transition&) const = default;
};

using Trajectory = std::vector<Transition>;

struct Dataset {
    std::size_t n = 0;
    std::vector<Trajectory> trajectories;

    std::size_t transition_count() const {
        std::size_t m = 0;
        for (const auto& tr : trajectories) m += tr.size();
        return m;
    }
    bool empty() const { return transition_count() == 0; }
    bool operator==(const Dataset&) const = default;
};

inline bool mechanism(const SubgoalGraph& g, node_id v, const BitVec& x) {
    const auto& ps = g.parents(v);
    if (ps.empty()) return false;
    if (g.kind(v) == NodeKind::And) {
        for (node_id p : ps)
            if (!x[p]) return false;
        return true;
    }
    for (node_id p : ps)
        if (x[p]) return true;
    return false;
}

template <class Rng>
AscmState ascm_step(const SubgoalGraph& g, const AscmConfig& cfg, const AscmState& s, const Forcing& forced, Rng& rng) {
    if (s.x.size() != g.size()) throw std::invalid_argument("ascm_step: state length does not match graph");
    std::bernoulli_distribution noise(cfg.noise_rho);
    AscmState next{BitVec(g.size(), 0), s.t + 1};
    for (node_id v = 0; v < g.size(); ++v) {
        if (auto it = forced.find(v); it != forced.end()) {
            next.x[v] = it->second;
            continue;
        }
        bool val = mechanism(g, v, s.x);
        if (cfg.noise_rho > 0.0 && noise(rng)) val = !val;
        next.x[v] = cfg.mode == AscmMode::Persistent ? static_cast<std::uint8_t>(s.x[v] || val) : val;
    }
    return next;
}

// Stateful A-SCM with persistent do-forcing and a lifetime step counter.
class AscmEnv {
public:
    AscmEnv(SubgoalGraph g, AscmConfig cfg, std::uint64_t seed) : g_(std::move(g)), cfg_(cfg), rng_(seed) {
        cfg_.validate();
        reset();
    }

    const SubgoalGraph& graph() const { return g_; }
    const AscmConfig& config() const { return cfg_; }
    const AscmState& state() const { return s_; }
    const Forcing& forcing() const { return forced_; }
    std::mt19937_64& rng() { return rng_; }
    std::size_t total_steps() const { return steps_; }
    bool achieved(node_id v) const { return s_.x.at(v) != 0; }

    void reset() {
        s_ = AscmState{BitVec(g_.size(), 0), 0};
        forced_.clear();
    }

    void intervene(node_id v, std::uint8_t value) {
        if (v >= g_.size()) throw std::out_of_range("intervene: node out of range");
        forced_[v] = value ? 1 : 0;
    }
    void clear(node_id v) { forced_.erase(v); }

    Transition step() {
        Transition tr{s_.x, {}, forced_};
        s_ = ascm_step(g_, cfg_, s_, forced_, rng_);
        tr.x_after = s_.x;
        ++steps_;
        return tr;
    }

private:
    SubgoalGraph g_;
    AscmConfig cfg_;
    std::mt19937_64 rng_;
    AscmState s_;
    Forcing forced_;
    std::size_t steps_ = 0;
};

struct SamplingTally {
    std::size_t intervention = 0;
    std::size_t exploration = 0;
};

inline Dataset collect_interventional(AscmEnv& env, const NodeSet& targets, std::size_t T,
                                      SamplingTally* tally = nullptr) {
    if (targets.empty()) throw std::invalid_argument("collect_interventional: empty intervention set");
    const auto& cfg = env.config();
    Dataset d;
    d.n = env.graph().size();
    std::bernoulli_distribution lands(cfg.intervention_success);
    for (std::size_t k = 0; k < T; ++k) {
        env.reset();
        Trajectory traj;
        while (env.state().t < cfg.horizon_H) {
            std::vector<node_id> open;
            for (node_id v : targets)
                if (!env.achieved(v)) open.push_back(v);
            if (open.empty()) break;
            node_id u = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(env.rng())];
            if (lands(env.rng())) env.intervene(u, 1);
            traj.push_back(env.step());
            if (tally) ++tally->intervention;
            for (std::size_t s = 0; s < cfg.explore_delta && env.state().t < cfg.horizon_H; ++s) {
                traj.push_back(env.step());
                if (tally) ++tally->exploration;
            }
        }
        d.trajectories.push_back(std::move(traj));
    }
    return d;
}

// CSV rows: one per state; row 0 of each trajectory is the start state with
// an empty forced mask, each later row carries the forcing of the step that
// produced it.
inline void write_dataset_csv(std::ostream& os, const Dataset& d) {
    os << "t,trajectory_id,forced_mask";
    for (std::size_t i = 0; i < d.n; ++i) os << ",x_" << i;
    os << '\n';
    auto row = [&](std::size_t t, std::size_t id, const BitVec& x, const Forcing& f) {
        std::string mask(d.n, '0');
        for (const auto& kv : f) mask[kv.first] = '1';
        os << t << ',' << id << ',' << mask;
        for (auto b : x) os << ',' << int(b);
        os << '\n';
    };
    for (std::size_t id = 0; id < d.trajectories.size(); ++id) {
        const auto& traj = d.trajectories[id];
        if (traj.empty()) continue;
        row(0, id, traj.front().x_before, {});
        for (std::size_t t = 0; t < traj.size(); ++t) row(t + 1, id, traj[t].x_after, traj[t].forced);
    }
}

inline Dataset read_dataset_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("dataset csv: missing header");
    Dataset d;
    {
        std::istringstream hs(line);
        std::string col;
        std::size_t cols = 0;
        while (std::getline(hs, col, ',')) ++cols;
        if (cols < 3) throw std::runtime_error("dataset csv: bad header");
        d.n = cols - 3;
    }
    std::map<std::size_t, std::vector<std::pair<BitVec, Forcing>>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != d.n + 3) throw std::runtime_error("dataset csv: ragged row");
        std::size_t id = std::stoull(cells[1]);
        const std::string& mask = cells[2];
        if (mask.size() != d.n) throw std::runtime_error("dataset csv: bad forced mask");
        BitVec x(d.n);
        for (std::size_t i = 0; i < d.n; ++i) x[i] = cells[3 + i] == "1";
        Forcing f;
        for (std::size_t i = 0; i < d.n; ++i)
            if (mask[i] == '1') f[i] = x[i];
        rows[id].emplace_back(std::move(x), std::move(f));
    }
    std::size_t max_id = rows.empty() ? 0 : rows.rbegin()->first + 1;
    d.trajectories.resize(max_id);
    for (auto& [id, rs] : rows)
        for (std::size_t t = 1; t < rs.size(); ++t)
            d.trajectories[id].push_back(Transition{rs[t - 1].first, rs[t].first, rs[t].second});
    return d;
}

}  // namespace hrc
