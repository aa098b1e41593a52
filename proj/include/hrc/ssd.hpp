#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>

#include "hrc/ascm.hpp"
#include "hrc/discoverable.hpp"
#include "hrc/graph.hpp"
#include "hrc/graph_io.hpp"

namespace hrc {

constexpr double coef_tol = 1e-6;
constexpr double default_lambda = 1e-4;

struct Design {
    std::size_t n = 0;
    node_id target = 0;
    std::vector<BitVec> x;
    std::vector<std::uint8_t> y;
    std::size_t size() const { return y.size(); }
};

// Pairs (X^t, X_target^{t+1}). With `sticky` set, pairs whose target is already
// 1 are dropped; pairs where the target is forced are always dropped.
inline Design build_design(const Dataset& d, node_id target, bool sticky = true) {
    if (d.empty()) throw std::invalid_argument("build_design: empty dataset");
    if (target >= d.n) throw std::out_of_range("build_design: target out of range");
    Design out{d.n, target, {}, {}};
    for (const auto& traj : d.trajectories)
        for (const auto& tr : traj) {
            if (tr.forced.count(target)) continue;
            if (sticky && tr.x_before[target]) continue;
            out.x.push_back(tr.x_before);
            out.y.push_back(tr.x_after[target]);
        }
    return out;
}

struct FitResult {
    std::vector<double> beta;
    double beta0 = 0.0;
    NodeSet parents;
    NodeKind kind_guess = NodeKind::Or;
    double empirical_loss = 0.0;
    bool converged = true;
    std::size_t iterations = 0;
};

namespace detail {

// Distinct candidate patterns with label counts.
struct Compressed {
    std::vector<node_id> cols;
    std::vector<std::uint64_t> pattern;
    std::vector<double> c0, c1;
    double total = 0.0;
};

inline Compressed compress(const Design& d, const std::vector<node_id>& cols) {
    if (cols.size() > 63) throw capacity_error("at most 63 candidate regressors");
    Compressed c;
    c.cols = cols;
    std::unordered_map<std::uint64_t, std::size_t> index;
    for (std::size_t r = 0; r < d.size(); ++r) {
        std::uint64_t key = 0;
        for (std::size_t k = 0; k < cols.size(); ++k)
            if (d.x[r][cols[k]]) key |= std::uint64_t{1} << k;
        auto [it, fresh] = index.emplace(key, c.pattern.size());
        if (fresh) {
            c.pattern.push_back(key);
            c.c0.push_back(0);
            c.c1.push_back(0);
        }
        (d.y[r] ? c.c1 : c.c0)[it->second] += 1;
    }
    c.total = static_cast<double>(d.size());
    return c;
}

inline std::vector<node_id> default_candidates(const Design& d, const std::optional<NodeSet>& cands) {
    std::vector<node_id> out;
    if (cands) {
        for (node_id v : *cands)
            if (v != d.target) out.push_back(v);
    } else {
        for (node_id v = 0; v < d.n; ++v)
            if (v != d.target) out.push_back(v);
    }
    return out;
}

inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }
inline double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace detail

inline NodeKind kind_from_coefficients(double beta0, const std::vector<double>& beta) {
    double mx = -std::numeric_limits<double>::infinity(), sum = 0.0;
    bool any = false;
    for (double b : beta)
        if (b > coef_tol) {
            any = true;
            mx = std::max(mx, b);
            sum += b;
        }
    if (!any) return NodeKind::Or;
    return (beta0 + mx <= 0.0 && 0.0 < beta0 + sum) ? NodeKind::And : NodeKind::Or;
}

struct L1Options {
    std::size_t max_sweeps = 5000;
    double tol = 1e-7;
    std::optional<NodeSet> candidates;
    const FitResult* warm_start = nullptr;
};

// L1-penalised logistic regression by coordinate-wise Newton steps with
// Armijo backtracking; the intercept is unpenalised.
inline FitResult fit_l1(const Design& d, double lambda, const L1Options& opt = {}) {
    if (d.size() == 0) throw std::invalid_argument("fit_l1: no pairs");
    if (lambda < 0) throw std::invalid_argument("fit_l1: negative lambda");
    auto cols = detail::default_candidates(d, opt.candidates);
    auto c = detail::compress(d, cols);
    const std::size_t K = c.pattern.size(), P = cols.size();

    std::vector<double> b(P + 1, 0.0);  // b[0] intercept
    if (opt.warm_start) {
        b[0] = opt.warm_start->beta0;
        for (std::size_t k = 0; k < P; ++k) b[k + 1] = opt.warm_start->beta.at(cols[k]);
    } else {
        double pos = 0;
        for (double v : c.c1) pos += v;
        double frac = std::clamp(pos / c.total, 1e-4, 1 - 1e-4);
        b[0] = std::log(frac / (1 - frac));
    }
    auto bit = [&](std::size_t k, std::size_t j) -> bool {
        return j == 0 || ((c.pattern[k] >> (j - 1)) & 1);
    };
    std::vector<double> z(K, 0.0);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j <= P; ++j)
            if (bit(k, j)) z[k] += b[j];

    auto loss_delta = [&](std::size_t j, double step) {
        double dl = 0;
        for (std::size_t k = 0; k < K; ++k) {
            if (!bit(k, j)) continue;
            double zn = z[k] + step;
            dl += c.c1[k] * (detail::softplus(-zn) - detail::softplus(-z[k])) +
                  c.c0[k] * (detail::softplus(zn) - detail::softplus(z[k]));
        }
        return dl / c.total;
    };

    FitResult out;
    out.converged = false;
    for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        double violation = 0.0;
        for (std::size_t j = 0; j <= P; ++j) {
            double lam = j == 0 ? 0.0 : lambda;
            double g = 0, h = 0;
            for (std::size_t k = 0; k < K; ++k) {
                if (!bit(k, j)) continue;
                double s = detail::sigmoid(z[k]);
                double nk = c.c0[k] + c.c1[k];
                g += nk * s - c.c1[k];
                h += nk * s * (1 - s);
            }
            g /= c.total;
            h = h / c.total + 1e-12;
            double bj = b[j];
            double v = bj > 0 ? std::abs(g + lam) : bj < 0 ? std::abs(g - lam) : std::max(0.0, std::abs(g) - lam);
            violation = std::max(violation, v);
            double dir;
            if (g + lam <= h * bj)
                dir = -(g + lam) / h;
            else if (g - lam >= h * bj)
                dir = -(g - lam) / h;
            else
                dir = -bj;
            if (dir == 0.0) continue;
            double decrease = g * dir + lam * (std::abs(bj + dir) - std::abs(bj));
            double step = 1.0;
            for (int ls = 0; ls < 40; ++ls, step *= 0.5) {
                double change = loss_delta(j, step * dir) + lam * (std::abs(bj + step * dir) - std::abs(bj));
                if (change <= 0.01 * step * decrease) break;
            }
            double delta = step * dir;
            b[j] += delta;
            for (std::size_t k = 0; k < K; ++k)
                if (bit(k, j)) z[k] += delta;
        }
        out.iterations = sweep + 1;
        if (violation < opt.tol) {
            out.converged = true;
            break;
        }
    }

    out.beta.assign(d.n, 0.0);
    out.beta0 = b[0];
    for (std::size_t k = 0; k < P; ++k) {
        out.beta[cols[k]] = b[k + 1];
        if (b[k + 1] > coef_tol) out.parents.insert(cols[k]);
    }
    out.kind_guess = kind_from_coefficients(out.beta0, out.beta);
    double wrong = 0;
    for (std::size_t k = 0; k < K; ++k) wrong += z[k] > 0 ? c.c0[k] : c.c1[k];
    out.empirical_loss = wrong / c.total;
    return out;
}

struct OracleOptions {
    std::size_t max_parents = 5;
    std::optional<NodeSet> candidates;
};

constexpr std::size_t oracle_max_nodes = 20;

// Exhaustive search over (parent set, AND/OR). Enumeration runs by size,
// then lexicographically, OR before AND; only strict improvements replace
// the incumbent, which realises the tie rule.
inline FitResult fit_oracle(const Design& d, double lambda, const OracleOptions& opt = {}) {
    if (d.size() == 0) throw std::invalid_argument("fit_oracle: no pairs");
    if (opt.max_parents > 5) throw capacity_error("fit_oracle: max_parents above 5");
    auto cols = detail::default_candidates(d, opt.candidates);
    if (cols.size() > oracle_max_nodes) throw capacity_error("fit_oracle: more than 20 candidate regressors");
    auto c = detail::compress(d, cols);
    const std::size_t K = c.pattern.size(), P = cols.size();

    double pos = 0;
    for (double v : c.c1) pos += v;
    bool majority_one = pos * 2 > c.total;
    double best_err = majority_one ? c.total - pos : pos;
    double best = best_err / c.total;
    std::vector<std::size_t> best_set;
    NodeKind best_kind = NodeKind::Or;

    std::vector<std::size_t> sel;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t want) {
        if (sel.size() == want) {
            std::uint64_t m = 0;
            for (auto k : sel) m |= std::uint64_t{1} << k;
            for (NodeKind kind : {NodeKind::Or, NodeKind::And}) {
                if (want == 1 && kind == NodeKind::And) continue;
                double err = 0;
                for (std::size_t k = 0; k < K; ++k) {
                    bool pred = kind == NodeKind::And ? (c.pattern[k] & m) == m : (c.pattern[k] & m) != 0;
                    err += pred ? c.c0[k] : c.c1[k];
                }
                double score = err / c.total + lambda * static_cast<double>(want);
                if (score < best - 1e-12) {
                    best = score;
                    best_err = err;
                    best_set = sel;
                    best_kind = kind;
                }
            }
            return;
        }
        for (std::size_t k = start; k < P; ++k) {
            sel.push_back(k);
            rec(k + 1, want);
            sel.pop_back();
        }
    };
    for (std::size_t size = 1; size <= std::min(opt.max_parents, P); ++size) rec(0, size);

    FitResult out;
    out.beta.assign(d.n, 0.0);
    out.kind_guess = best_kind;
    out.empirical_loss = best_err / c.total;
    const double k = static_cast<double>(best_set.size());
    if (best_set.empty()) {
        out.beta0 = majority_one ? 0.5 : -0.5;
    } else {
        // Coefficients that realise the chosen gate under the sign rule.
        out.beta0 = best_kind == NodeKind::And ? -(k - 0.5) : -0.5;
        for (auto i : best_set) {
            out.beta[cols[i]] = 1.0;
            out.parents.insert(cols[i]);
        }
    }
    return out;
}

enum class SsdEngine { L1, Oracle };

inline SsdEngine parse_ssd_engine(const std::string& s) {
    if (s == "l1" || s == "ssd-l1") return SsdEngine::L1;
    if (s == "oracle" || s == "ssd-oracle") return SsdEngine::Oracle;
    throw std::invalid_argument("unknown ssd engine: " + s);
}

struct RecoveredGraph {
    std::size_t n = 0;
    std::map<node_id, NodeSet> parents;
    std::map<node_id, FitResult> evidence;
    std::map<node_id, std::string> errors;
    std::map<node_id, NodeKind> kinds;

    explicit RecoveredGraph(std::size_t size = 0) : n(size) {}

    const NodeSet& parents_of(node_id v) const {
        static const NodeSet none;
        auto it = parents.find(v);
        return it == parents.end() ? none : it->second;
    }

    NodeSet children_of(node_id v) const {
        NodeSet out;
        for (const auto& [c, ps] : parents)
            if (ps.count(v)) out.insert(c);
        return out;
    }

    EdgeSet edges() const { return parent_map_edges(parents); }

    SubgoalGraph as_graph(node_id final_node) const {
        SubgoalGraph g(n, final_node);
        for (const auto& [c, ps] : parents)
            for (node_id p : ps) g.add_edge(p, c);
        for (const auto& [v, k] : kinds) g.set_kind(v, k);
        return g;
    }
};

struct DiscoverOptions {
    double lambda = default_lambda;
    SsdEngine engine = SsdEngine::L1;
    bool sticky = true;
    std::size_t max_parents = 5;
};

// Fits each node in `nodes` outside the intervention set against IS members.
inline RecoveredGraph discover(const Dataset& d, const NodeSet& is, const NodeSet& nodes,
                               const DiscoverOptions& opt = {}) {
    RecoveredGraph rg(d.n);
    if (d.empty()) return rg;
    for (node_id v : nodes) {
        if (is.count(v)) continue;
        NodeSet cands = is;
        cands.erase(v);
        if (cands.empty()) continue;
        try {
            Design des = build_design(d, v, opt.sticky);
            if (des.size() == 0) continue;
            FitResult fr;
            if (opt.engine == SsdEngine::Oracle) {
                fr = fit_oracle(des, opt.lambda, OracleOptions{std::min(opt.max_parents, cands.size()), cands});
            } else {
                fr = fit_l1(des, opt.lambda, L1Options{.candidates = cands});
            }
            if (!fr.parents.empty()) {
                rg.parents[v] = fr.parents;
                rg.kinds[v] = fr.kind_guess;
            }
            rg.evidence[v] = std::move(fr);
        } catch (const std::exception& e) {
            rg.errors[v] = e.what();
        }
    }
    return rg;
}

// Every node regressed on every other node, as when all subgoals are
// intervened on.
inline RecoveredGraph discover_full(const Dataset& d, const DiscoverOptions& opt = {}) {
    NodeSet all, none;
    for (node_id v = 0; v < d.n; ++v) all.insert(v);
    RecoveredGraph rg(d.n);
    if (d.empty()) return rg;
    for (node_id v = 0; v < d.n; ++v) {
        NodeSet cands = all;
        cands.erase(v);
        if (cands.empty()) continue;
        try {
            Design des = build_design(d, v, opt.sticky);
            if (des.size() == 0) continue;
            FitResult fr = opt.engine == SsdEngine::Oracle
                               ? fit_oracle(des, opt.lambda, OracleOptions{std::min(opt.max_parents, cands.size()), cands})
                               : fit_l1(des, opt.lambda, L1Options{.candidates = cands});
            if (!fr.parents.empty()) {
                rg.parents[v] = fr.parents;
                rg.kinds[v] = fr.kind_guess;
            }
            rg.evidence[v] = std::move(fr);
        } catch (const std::exception& e) {
            rg.errors[v] = e.what();
        }
    }
    return rg;
}

// One-step dataset whose start states are one-sided valid assignments: every
// assignment once when samples == 0, else `samples` uniform draws.
inline Dataset assignment_dataset(const SubgoalGraph& g, std::size_t samples, double rho, std::uint64_t seed) {
    auto valid = valid_assignments(g);
    AscmConfig cfg;
    cfg.mode = AscmMode::Noisy;
    cfg.noise_rho = rho;
    std::mt19937_64 rng(seed);
    Dataset d;
    d.n = g.size();
    auto add = [&](std::uint64_t bits) {
        AscmState s{BitVec(g.size()), 0};
        for (node_id v = 0; v < g.size(); ++v) s.x[v] = (bits >> v) & 1;
        auto nx = ascm_step(g, cfg, s, {}, rng);
        d.trajectories.push_back(Trajectory{Transition{s.x, nx.x, {}}});
    };
    if (samples == 0) {
        for (auto bits : valid) add(bits);
    } else {
        std::uniform_int_distribution<std::size_t> pick(0, valid.size() - 1);
        for (std::size_t i = 0; i < samples; ++i) add(valid[pick(rng)]);
    }
    return d;
}

inline void write_coefficients_csv(std::ostream& os, const RecoveredGraph& rg) {
    os << "node,beta0";
    for (std::size_t j = 0; j < rg.n; ++j) os << ",beta_" << j;
    os << ",kind,loss,converged\n";
    for (const auto& [v, fr] : rg.evidence) {
        os << v << ',' << fr.beta0;
        for (double b : fr.beta) os << ',' << b;
        os << ',' << kind_name(fr.kind_guess) << ',' << fr.empirical_loss << ',' << (fr.converged ? 1 : 0) << '\n';
    }
}

}  // namespace hrc
