#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "hrc/graph.hpp"

namespace hrc {

inline void write_graph(std::ostream& os, const SubgoalGraph& g) {
    os << "n=" << g.size() << " final=" << g.final_node() << '\n';
    for (node_id v = 0; v < g.size(); ++v) {
        os << "node=" << v << " kind=" << kind_name(g.kind(v)) << " parents=";
        const auto& ps = g.parents(v);
        for (std::size_t k = 0; k < ps.size(); ++k) os << (k ? "," : "") << ps[k];
        os << '\n';
    }
}

inline std::string to_text(const SubgoalGraph& g) {
    std::ostringstream os;
    write_graph(os, g);
    return os.str();
}

namespace detail {

inline std::string expect_field(std::istringstream& ls, const std::string& key, std::size_t lineno) {
    std::string tok;
    if (!(ls >> tok) || tok.rfind(key + "=", 0) != 0)
        throw std::runtime_error("graph text line " + std::to_string(lineno) + ": expected " + key + "=");
    return tok.substr(key.size() + 1);
}

inline std::size_t parse_index(const std::string& s, std::size_t lineno) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw std::runtime_error("graph text line " + std::to_string(lineno) + ": bad integer '" + s + "'");
    return std::stoull(s);
}

}  // namespace detail

inline SubgoalGraph read_graph(std::istream& is) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(is, line)) throw std::runtime_error("graph text: missing header");
    std::istringstream hs(line);
    std::size_t n = detail::parse_index(detail::expect_field(hs, "n", lineno), lineno);
    node_id fin = detail::parse_index(detail::expect_field(hs, "final", lineno), lineno);
    SubgoalGraph g(n, fin);
    for (node_id v = 0; v < n; ++v) {
        ++lineno;
        if (!std::getline(is, line)) throw std::runtime_error("graph text: truncated at node " + std::to_string(v));
        std::istringstream ls(line);
        if (detail::parse_index(detail::expect_field(ls, "node", lineno), lineno) != v)
            throw std::runtime_error("graph text line " + std::to_string(lineno) + ": nodes out of order");
        std::string kind = detail::expect_field(ls, "kind", lineno);
        if (kind == "AND")
            g.set_kind(v, NodeKind::And);
        else if (kind == "OR")
            g.set_kind(v, NodeKind::Or);
        else
            throw std::runtime_error("graph text line " + std::to_string(lineno) + ": bad kind " + kind);
        std::string plist = detail::expect_field(ls, "parents", lineno);
        std::istringstream ps(plist);
        std::string item;
        while (std::getline(ps, item, ',')) g.add_edge(detail::parse_index(item, lineno), v);
    }
    return g;
}

inline SubgoalGraph from_text(const std::string& text) {
    std::istringstream is(text);
    return read_graph(is);
}

}  // namespace hrc
