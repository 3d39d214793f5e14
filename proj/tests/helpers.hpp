#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pegasus/graph.hpp"
#include "pegasus/summary.hpp"

namespace test {

using pegasus::Graph;
using pegasus::node_t;

// The 5-node toy graph: a=0, b=1, c=2, d=3, e=4.
// Edges: a-c, a-d, b-c, b-d, c-e, d-e.
inline Graph toy_graph() {
    return Graph::from_edges(5, {{0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 4}, {3, 4}});
}

// Grouping with exact reconstruction: {a,b}, {c,d}, {e};
// superedges {AB,CD} and {CD,E}.
inline pegasus::SummaryGraph exact_toy_summary() {
    return pegasus::SummaryGraph::from_parts({0, 0, 1, 1, 2}, {{0, 1}, {1, 2}});
}

// The lossy grouping: {a,d}, {b,c}, {e}; cross superedge plus self-loops.
inline pegasus::SummaryGraph lossy_toy_summary(bool include_e_edge) {
    std::vector<std::pair<node_t, node_t>> p{{0, 1}, {0, 0}, {1, 1}};
    if (include_e_edge) p.push_back({0, 2});
    return pegasus::SummaryGraph::from_parts({0, 1, 1, 0, 2}, p);
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents, const std::string& name = "pegasus_test.tmp") {
        path = (std::filesystem::temp_directory_path() / name).string();
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

inline Graph random_connected_graph(node_t n, double extra_edge_prob, std::uint64_t seed) {
    auto rng = pegasus::make_rng(seed, "randgraph");
    std::vector<std::pair<node_t, node_t>> edges;
    // random spanning tree then extra edges
    auto perm = pegasus::random_permutation(n, rng);
    for (node_t i = 1; i < n; ++i) {
        std::uniform_int_distribution<node_t> pick(0, i - 1);
        node_t p = perm[pick(rng)];
        node_t u = std::min(perm[i], p), v = std::max(perm[i], p);
        edges.emplace_back(u, v);
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (node_t u = 0; u < n; ++u)
        for (node_t v = u + 1; v < n; ++v)
            if (coin(rng) < extra_edge_prob) edges.emplace_back(u, v);
    return Graph::from_edges(n, std::move(edges), /*dedupe=*/true);
}

}  // namespace test
