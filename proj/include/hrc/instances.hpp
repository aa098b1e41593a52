#pragma once

#include "hrc/graph.hpp"

namespace hrc::instances {

// All-OR: S reaches the final node directly, W only fans out to dead ends.
namespace shortcut {
constexpr node_id S = 0, W = 1, P = 2, K = 3, H = 4, F = 5;
inline SubgoalGraph graph() {
    SubgoalGraph g(6, F);
    g.add_edge(S, F);
    g.add_edge(W, P);
    g.add_edge(W, K);
    g.add_edge(W, H);
    return g;
}
}  // namespace shortcut

// Eleven-node hybrid-rule example; node i here is g_{i+1}. After the root
// is expanded the controllable set is {1, 2, 3, 4}.
namespace hybrid {
constexpr node_id root = 0, target = 10;
inline SubgoalGraph graph() {
    SubgoalGraph g(11, target);
    for (node_id c : {1, 2, 3, 4}) g.add_edge(root, c);
    g.add_edge(1, 5);
    g.add_edge(2, 5);
    g.add_edge(2, 6);
    g.add_edge(3, 7);
    g.add_edge(4, 7);
    g.add_edge(5, 8);
    g.add_edge(5, 9);
    g.add_edge(8, 9);
    g.add_edge(9, 10);
    g.add_edge(7, 10);
    for (node_id v : {5, 7, 9}) g.set_kind(v, NodeKind::And);
    return g;
}
}  // namespace hybrid

// X1 -> X2, {X1, X2} -> X3 with X3 AND. X1 is a true parent of X3 that no
// one-sided valid assignment can expose.
namespace masked_parent {
constexpr node_id X1 = 0, X2 = 1, X3 = 2;
inline SubgoalGraph graph() {
    SubgoalGraph g(3, X3);
    g.add_edge(X1, X2);
    g.add_edge(X1, X3);
    g.add_edge(X2, X3);
    g.set_kind(X3, NodeKind::And);
    return g;
}
}  // namespace masked_parent

}  // namespace hrc::instances
