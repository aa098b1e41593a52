// Runs the HRC loop on the three-node crafting instance and prints what it learned.
#include <iostream>

#include "hrc/hrc.hpp"
#include "hrc/instances.hpp"

int main(int argc, char** argv) {
    using namespace hrc;
    const std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 0;
    const char* names[] = {"stone", "wood", "pickaxe"};

    AscmEnv env(mini_craft::graph(), AscmConfig{}, seed);
    HrcConfig cfg;
    cfg.strategy = StrategyKind::CausalEffect;
    auto r = run_hrc(env, cfg, seed);

    std::cout << "success: " << r.success << "\n";
    for (node_id v : r.state.order) std::cout << "intervened " << names[v] << "\n";
    for (node_id v : r.state.hs.leveled_nodes()) {
        std::cout << names[v] << " level " << r.state.hs.level(v) << " parents {";
        for (node_id p : r.state.hs.parents(v)) std::cout << ' ' << names[p];
        std::cout << " }\n";
    }
    std::cout << "probes: " << r.state.ledger.total() << "\n\n";
    write_run_log_csv(std::cout, r.state.log);
}
