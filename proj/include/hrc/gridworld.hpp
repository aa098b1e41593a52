#pragma once

#include <array>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hrc/ascm.hpp"
#include "hrc/graph.hpp"

namespace hrc {

enum class GridAction { Up, Down, Left, Right, Pick, Craft };
constexpr std::size_t grid_action_count = 6;

namespace grid {
// Subgoal indices in the gridworld's own vector: (wood, stone, pickaxe).
constexpr node_id wood = 0;
constexpr node_id stone = 1;
constexpr node_id pickaxe = 2;
constexpr std::size_t subgoal_count = 3;

inline SubgoalGraph subgoal_graph() {
    SubgoalGraph g(subgoal_count, pickaxe);
    g.add_edge(wood, pickaxe);
    g.add_edge(stone, pickaxe);
    g.set_kind(pickaxe, NodeKind::And);
    return g;
}

inline const char* default_layout =
    "A....\n"
    ".....\n"
    "W....\n"
    ".....\n"
    "....S\n";
}  // namespace grid

using Cell = std::pair<std::size_t, std::size_t>;  // (row, col)

struct GridLayout {
    std::size_t width = 0;
    std::size_t height = 0;
    Cell start{0, 0};
    std::map<Cell, int> resources;  // cell -> grid::wood or grid::stone
};

inline GridLayout parse_layout(const std::string& text) {
    GridLayout lay;
    std::istringstream is(text);
    std::string line;
    bool have_agent = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lay.width == 0) lay.width = line.size();
        if (line.size() != lay.width) throw std::runtime_error("layout: ragged row " + std::to_string(lay.height));
        for (std::size_t c = 0; c < line.size(); ++c) {
            Cell cell{lay.height, c};
            switch (line[c]) {
                case '.': break;
                case 'W': lay.resources[cell] = grid::wood; break;
                case 'S': lay.resources[cell] = grid::stone; break;
                case 'A':
                    if (have_agent) throw std::runtime_error("layout: more than one agent");
                    have_agent = true;
                    lay.start = cell;
                    break;
                default: throw std::runtime_error(std::string("layout: unknown symbol '") + line[c] + "'");
            }
        }
        ++lay.height;
    }
    if (!have_agent) throw std::runtime_error("layout: no agent start");
    return lay;
}

struct GridWorld {
    GridLayout layout;
    Cell agent;
    std::map<Cell, int> resources;
    std::array<int, 3> backpack{};  // wood, stone, pickaxe
    std::array<bool, 3> ever{};     // sticky achievement
    std::size_t steps = 0;
    std::size_t budget = 100;

    GridWorld() = default;
    GridWorld(GridLayout lay, std::size_t step_budget) : layout(std::move(lay)), budget(step_budget) { reset(); }

    void reset() {
        agent = layout.start;
        resources = layout.resources;
        backpack = {};
        ever = {};
        steps = 0;
    }

    bool done() const { return steps >= budget || ever[grid::pickaxe]; }
};

inline bool grid_step(GridWorld& w, GridAction a) {
    auto& [r, c] = w.agent;
    switch (a) {
        case GridAction::Up: if (r > 0) --r; break;
        case GridAction::Down: if (r + 1 < w.layout.height) ++r; break;
        case GridAction::Left: if (c > 0) --c; break;
        case GridAction::Right: if (c + 1 < w.layout.width) ++c; break;
        case GridAction::Pick:
            if (auto it = w.resources.find(w.agent); it != w.resources.end()) {
                ++w.backpack[it->second];
                w.resources.erase(it);
            }
            break;
        case GridAction::Craft:
            if (w.backpack[grid::wood] >= 1 && w.backpack[grid::stone] >= 1) {
                --w.backpack[grid::wood];
                --w.backpack[grid::stone];
                ++w.backpack[grid::pickaxe];
            }
            break;
    }
    for (std::size_t i = 0; i < 3; ++i)
        if (w.backpack[i] >= 1) w.ever[i] = true;
    ++w.steps;
    return w.done();
}

inline BitVec grid_subgoal_vector(const GridWorld& w) {
    return BitVec{w.ever[0], w.ever[1], w.ever[2]};
}

}  // namespace hrc
