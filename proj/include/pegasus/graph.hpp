#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pegasus/errors.hpp"
#include "pegasus/rng.hpp"

namespace pegasus {

using node_t = std::uint32_t;

// Immutable undirected simple graph in CSR form. Node ids are dense
// 0..node_count()-1; neighbor lists are sorted ascending, no self-loops.
class Graph {
public:
    Graph() = default;

    // Edges may be listed in any order/orientation; duplicates are an error
    // unless dedupe is set.
    static Graph from_edges(node_t n, std::vector<std::pair<node_t, node_t>> edges,
                            bool dedupe = false) {
        for (auto& [u, v] : edges) {
            if (u == v) throw parameter_error("self-loop in edge list");
            if (u >= n || v >= n) throw parameter_error("edge endpoint out of range");
            if (u > v) std::swap(u, v);
        }
        std::sort(edges.begin(), edges.end());
        if (dedupe) {
            edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        } else if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
            throw parameter_error("duplicate edge in edge list");
        }
        Graph g;
        g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (auto [u, v] : edges) {
            ++g.offsets_[u + 1];
            ++g.offsets_[v + 1];
        }
        for (std::size_t i = 1; i < g.offsets_.size(); ++i) g.offsets_[i] += g.offsets_[i - 1];
        g.neighbors_.resize(2 * edges.size());
        std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
        for (auto [u, v] : edges) {
            g.neighbors_[cursor[u]++] = v;
            g.neighbors_[cursor[v]++] = u;
        }
        for (node_t u = 0; u < n; ++u)
            std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u]),
                      g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[u + 1]));
        g.edge_count_ = edges.size();
        return g;
    }

    node_t node_count() const { return static_cast<node_t>(offsets_.empty() ? 0 : offsets_.size() - 1); }
    std::size_t edge_count() const { return edge_count_; }

    std::span<const node_t> neighbors(node_t u) const {
        return {neighbors_.data() + offsets_[u], neighbors_.data() + offsets_[u + 1]};
    }
    std::size_t degree(node_t u) const { return offsets_[u + 1] - offsets_[u]; }

    bool has_edge(node_t u, node_t v) const {
        auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    std::vector<std::pair<node_t, node_t>> edges() const {
        std::vector<std::pair<node_t, node_t>> out;
        out.reserve(edge_count_);
        for (node_t u = 0; u < node_count(); ++u)
            for (node_t v : neighbors(u))
                if (u < v) out.emplace_back(u, v);
        return out;
    }

    bool connected() const {
        node_t n = node_count();
        if (n == 0) return false;
        std::vector<char> seen(n, 0);
        std::deque<node_t> q{0};
        seen[0] = 1;
        std::size_t cnt = 1;
        while (!q.empty()) {
            node_t u = q.front();
            q.pop_front();
            for (node_t v : neighbors(u))
                if (!seen[v]) {
                    seen[v] = 1;
                    ++cnt;
                    q.push_back(v);
                }
        }
        return cnt == n;
    }

private:
    std::vector<std::size_t> offsets_;
    std::vector<node_t> neighbors_;
    std::size_t edge_count_ = 0;
};

struct LoadResult {
    Graph graph;
    // original_ids[i] is the id the i-th internal node carried in the input
    // file; identity when no remapping happened.
    std::vector<std::uint64_t> original_ids;
};

namespace detail {

inline std::vector<node_t> bfs_distances(const Graph& g, std::span<const node_t> sources) {
    constexpr node_t UNSEEN = static_cast<node_t>(-1);
    std::vector<node_t> dist(g.node_count(), UNSEEN);
    std::deque<node_t> q;
    for (node_t s : sources) {
        if (dist[s] == UNSEEN) {
            dist[s] = 0;
            q.push_back(s);
        }
    }
    while (!q.empty()) {
        node_t u = q.front();
        q.pop_front();
        for (node_t v : g.neighbors(u))
            if (dist[v] == UNSEEN) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    return dist;
}

}  // namespace detail

// Parses one edge per line ("u v", '#' comments, blank lines, CRLF ok).
// With preprocess: drop self-loops and duplicate/reverse edges, keep the
// largest connected component (ties: component holding the smallest original
// id), remap ids densely. Without it, ids must already be dense and simple.
inline LoadResult load_edge_list(const std::string& path, bool preprocess) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open edge list: " + path);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        std::uint64_t u, v;
        std::string extra;
        if (!(ls >> u >> v)) {
            throw parse_error(path + ":" + std::to_string(lineno) + ": expected two integer tokens");
        }
        raw.emplace_back(u, v);
    }
    if (!preprocess) {
        std::uint64_t maxid = 0;
        for (auto [u, v] : raw) maxid = std::max({maxid, u, v});
        if (raw.empty()) throw empty_graph_error("edge list is empty: " + path);
        node_t n = static_cast<node_t>(maxid + 1);
        std::vector<std::pair<node_t, node_t>> edges;
        edges.reserve(raw.size());
        for (auto [u, v] : raw) edges.emplace_back(static_cast<node_t>(u), static_cast<node_t>(v));
        LoadResult r;
        r.graph = Graph::from_edges(n, std::move(edges), /*dedupe=*/false);
        r.original_ids.resize(n);
        for (node_t i = 0; i < n; ++i) r.original_ids[i] = i;
        return r;
    }

    // Preprocess path: arbitrary ids, self-loops and duplicates tolerated.
    std::vector<std::uint64_t> ids;
    ids.reserve(2 * raw.size());
    for (auto [u, v] : raw) {
        if (u == v) continue;
        ids.push_back(u);
        ids.push_back(v);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.empty()) throw empty_graph_error("graph is empty after preprocessing: " + path);
    std::unordered_map<std::uint64_t, node_t> remap;
    remap.reserve(ids.size());
    for (node_t i = 0; i < ids.size(); ++i) remap[ids[i]] = i;
    std::vector<std::pair<node_t, node_t>> edges;
    edges.reserve(raw.size());
    for (auto [u, v] : raw) {
        if (u == v) continue;
        edges.emplace_back(remap[u], remap[v]);
    }
    Graph full = Graph::from_edges(static_cast<node_t>(ids.size()), std::move(edges), /*dedupe=*/true);

    // Largest connected component; ties broken toward the component that
    // contains the smallest original id (= smallest internal id, since the
    // remap is order-preserving).
    node_t n = full.node_count();
    std::vector<node_t> comp(n, static_cast<node_t>(-1));
    std::vector<std::size_t> comp_size;
    for (node_t s = 0; s < n; ++s) {
        if (comp[s] != static_cast<node_t>(-1)) continue;
        node_t c = static_cast<node_t>(comp_size.size());
        comp_size.push_back(0);
        std::deque<node_t> q{s};
        comp[s] = c;
        while (!q.empty()) {
            node_t u = q.front();
            q.pop_front();
            ++comp_size[c];
            for (node_t v : full.neighbors(u))
                if (comp[v] == static_cast<node_t>(-1)) {
                    comp[v] = c;
                    q.push_back(v);
                }
        }
    }
    node_t best = 0;
    for (node_t c = 1; c < comp_size.size(); ++c)
        if (comp_size[c] > comp_size[best]) best = c;

    std::vector<node_t> local(n, static_cast<node_t>(-1));
    LoadResult r;
    r.original_ids.reserve(comp_size[best]);
    node_t next = 0;
    for (node_t u = 0; u < n; ++u)
        if (comp[u] == best) {
            local[u] = next++;
            r.original_ids.push_back(ids[u]);
        }
    std::vector<std::pair<node_t, node_t>> kept;
    kept.reserve(full.edge_count());
    for (node_t u = 0; u < n; ++u) {
        if (comp[u] != best) continue;
        for (node_t v : full.neighbors(u))
            if (u < v) kept.emplace_back(local[u], local[v]);
    }
    r.graph = Graph::from_edges(next, std::move(kept), /*dedupe=*/false);
    return r;
}

inline void save_edge_list(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write edge list: " + path);
    for (node_t u = 0; u < g.node_count(); ++u)
        for (node_t v : g.neighbors(u))
            if (u < v) out << u << ' ' << v << '\n';
}

// Size of the input graph in bits: 2|E| log2 |V|.
inline double graph_size_bits(const Graph& g) {
    if (g.node_count() < 1) throw parameter_error("graph_size_bits: empty graph");
    if (g.edge_count() == 0) return 0.0;
    return 2.0 * static_cast<double>(g.edge_count()) * std::log2(static_cast<double>(g.node_count()));
}

// Barabasi-Albert preferential attachment: m initial edgeless nodes, each new
// node attaches to m distinct existing nodes sampled proportionally to degree.
inline Graph generate_ba(node_t n, node_t m, std::uint64_t seed) {
    if (m < 1 || n <= m) throw parameter_error("generate_ba: need n > m >= 1");
    auto rng = make_rng(seed, "ba");
    std::vector<std::pair<node_t, node_t>> edges;
    edges.reserve(static_cast<std::size_t>(m) * (n - m));
    std::vector<node_t> repeated;  // node repeated once per incident edge
    repeated.reserve(2 * static_cast<std::size_t>(m) * (n - m));
    std::vector<node_t> targets(m);
    std::iota(targets.begin(), targets.end(), 0u);
    for (node_t u = m; u < n; ++u) {
        for (node_t t : targets) {
            edges.emplace_back(u, t);
            repeated.push_back(u);
            repeated.push_back(t);
        }
        // Next targets: m distinct draws from the degree-weighted multiset.
        targets.clear();
        while (targets.size() < m) {
            std::uniform_int_distribution<std::size_t> dist(0, repeated.size() - 1);
            node_t cand = repeated[dist(rng)];
            if (std::find(targets.begin(), targets.end(), cand) == targets.end())
                targets.push_back(cand);
        }
    }
    return Graph::from_edges(n, std::move(edges));
}

// Watts-Strogatz: ring lattice of even degree k, each clockwise edge rewired
// with probability p to a uniform non-duplicate endpoint.
inline Graph generate_ws(node_t n, node_t k, double p, std::uint64_t seed) {
    if (k < 2 || k % 2 != 0 || n <= k) throw parameter_error("generate_ws: need n > k >= 2, k even");
    if (p < 0.0 || p > 1.0) throw parameter_error("generate_ws: p must be in [0,1]");
    auto rng = make_rng(seed, "ws");
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<node_t> pick(0, n - 1);
    std::vector<std::vector<node_t>> adj(n);
    auto has = [&](node_t u, node_t v) {
        return std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end();
    };
    auto link = [&](node_t u, node_t v) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    };
    for (node_t j = 1; j <= k / 2; ++j)
        for (node_t u = 0; u < n; ++u) link(u, (u + j) % n);
    for (node_t j = 1; j <= k / 2; ++j) {
        for (node_t u = 0; u < n; ++u) {
            if (coin(rng) >= p) continue;
            node_t v = (u + j) % n;
            if (adj[u].size() >= n - 1) continue;  // u already saturated
            node_t w = pick(rng);
            while (w == u || has(u, w)) w = pick(rng);
            auto& au = adj[u];
            au.erase(std::find(au.begin(), au.end(), v));
            auto& av = adj[v];
            av.erase(std::find(av.begin(), av.end(), u));
            link(u, w);
        }
    }
    std::vector<std::pair<node_t, node_t>> edges;
    for (node_t u = 0; u < n; ++u)
        for (node_t v : adj[u])
            if (u < v) edges.emplace_back(u, v);
    return Graph::from_edges(n, std::move(edges));
}

// Minimum h such that at least `percentile` of ordered reachable pairs lie
// within h hops. Exact all-pairs BFS up to 20k nodes, stratified pair
// sampling above that.
inline double effective_diameter(const Graph& g, double percentile,
                                 std::uint64_t seed = 0) {
    if (percentile <= 0.0 || percentile > 1.0)
        throw parameter_error("effective_diameter: percentile must be in (0,1]");
    if (!g.connected())
        throw disconnected_graph_error(
            "effective_diameter: graph is disconnected; preprocess to the largest component first");
    node_t n = g.node_count();
    if (n == 1) return 0.0;
    std::vector<std::uint64_t> hist;  // hist[h] = #ordered pairs at distance h
    std::vector<node_t> sources;
    if (n <= 20000) {
        sources.resize(n);
        std::iota(sources.begin(), sources.end(), 0u);
    } else {
        std::size_t want = (100000 + n - 2) / (n - 1);  // pairs per source = n-1
        auto rng = make_rng(seed, "effdiam");
        std::uniform_int_distribution<node_t> pick(0, n - 1);
        std::vector<char> used(n, 0);
        while (sources.size() < want) {
            node_t s = pick(rng);
            if (!used[s]) {
                used[s] = 1;
                sources.push_back(s);
            }
        }
    }
    for (node_t s : sources) {
        std::vector<node_t> one{s};
        auto dist = detail::bfs_distances(g, one);
        for (node_t v = 0; v < n; ++v) {
            if (v == s) continue;
            node_t d = dist[v];
            if (hist.size() <= d) hist.resize(d + 1, 0);
            ++hist[d];
        }
    }
    std::uint64_t total = 0;
    for (auto c : hist) total += c;
    std::uint64_t need = static_cast<std::uint64_t>(std::ceil(percentile * static_cast<double>(total) - 1e-9));
    std::uint64_t cum = 0;
    for (std::size_t h = 0; h < hist.size(); ++h) {
        cum += hist[h];
        if (cum >= need) return static_cast<double>(h);
    }
    return static_cast<double>(hist.size() - 1);
}

}  // namespace pegasus
