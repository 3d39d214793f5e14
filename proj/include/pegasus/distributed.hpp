#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <vector>

#include "pegasus/engine.hpp"
#include "pegasus/errors.hpp"
#include "pegasus/graph.hpp"
#include "pegasus/query.hpp"
#include "pegasus/summary.hpp"

namespace pegasus {

enum class PartitionMethod { label_propagation, louvain };

inline PartitionMethod parse_partition_method(const std::string& s) {
    if (s == "label_propagation" || s == "lp") return PartitionMethod::label_propagation;
    if (s == "louvain") return PartitionMethod::louvain;
    throw parameter_error("unknown partition method: " + s);
}

namespace detail {

// Seeded asynchronous label propagation, at most `rounds` sweeps.
inline std::vector<node_t> label_propagation_communities(const Graph& g, std::uint64_t seed,
                                                         std::size_t rounds = 10) {
    node_t n = g.node_count();
    std::vector<node_t> label(n);
    std::iota(label.begin(), label.end(), 0u);
    auto rng = make_rng(seed, "labelprop");
    auto order = random_permutation(n, rng);
    std::unordered_map<node_t, std::size_t> freq;
    for (std::size_t r = 0; r < rounds; ++r) {
        bool changed = false;
        for (node_t u : order) {
            if (g.degree(u) == 0) continue;
            freq.clear();
            for (node_t v : g.neighbors(u)) ++freq[label[v]];
            node_t best = label[u];
            std::size_t best_cnt = 0;
            for (auto [lab, cnt] : freq)
                if (cnt > best_cnt || (cnt == best_cnt && lab < best)) {
                    best = lab;
                    best_cnt = cnt;
                }
            if (best != label[u]) {
                label[u] = best;
                changed = true;
            }
        }
        if (!changed) break;
    }
    return label;
}

// Compact multi-level Louvain on an unweighted input; internal levels use
// weighted self-looped graphs.
inline std::vector<node_t> louvain_communities(const Graph& g, std::uint64_t seed) {
    node_t n = g.node_count();
    // adjacency as (neighbor, weight); self-loops hold intra-community weight
    std::vector<std::vector<std::pair<node_t, double>>> adj(n);
    for (node_t u = 0; u < n; ++u)
        for (node_t v : g.neighbors(u)) adj[u].emplace_back(v, 1.0);
    std::vector<node_t> node2final(n);
    std::iota(node2final.begin(), node2final.end(), 0u);
    double total_w = 2.0 * static_cast<double>(g.edge_count());
    if (total_w == 0.0) return node2final;
    auto rng = make_rng(seed, "louvain");

    for (int level = 0; level < 10; ++level) {
        node_t nn = static_cast<node_t>(adj.size());
        std::vector<node_t> comm(nn);
        std::iota(comm.begin(), comm.end(), 0u);
        std::vector<double> deg_w(nn, 0.0), comm_tot(nn, 0.0), self_w(nn, 0.0);
        for (node_t u = 0; u < nn; ++u) {
            for (auto [v, w] : adj[u]) {
                deg_w[u] += w;
                if (v == u) self_w[u] = w;  // self-loop weight counted once per direction
            }
            comm_tot[u] = deg_w[u];
        }
        auto order = random_permutation(nn, rng);
        bool improved_any = false;
        for (int sweep = 0; sweep < 20; ++sweep) {
            bool moved = false;
            for (node_t u : order) {
                node_t cu = comm[u];
                std::unordered_map<node_t, double> links;  // community -> weight to u
                for (auto [v, w] : adj[u])
                    if (v != u) links[comm[v]] += w;
                comm_tot[cu] -= deg_w[u];
                double best_gain = links.count(cu) ? links[cu] - comm_tot[cu] * deg_w[u] / total_w
                                                   : -comm_tot[cu] * deg_w[u] / total_w;
                node_t best = cu;
                for (auto [c, w] : links) {
                    if (c == cu) continue;
                    double gain = w - comm_tot[c] * deg_w[u] / total_w;
                    if (gain > best_gain + 1e-12 || (gain > best_gain - 1e-12 && c < best)) {
                        best_gain = gain;
                        best = c;
                    }
                }
                comm[u] = best;
                comm_tot[best] += deg_w[u];
                if (best != cu) moved = true;
            }
            if (!moved) break;
            improved_any = true;
        }
        // densify community ids
        std::vector<node_t> dense(nn, static_cast<node_t>(-1));
        node_t nc = 0;
        for (node_t u = 0; u < nn; ++u)
            if (dense[comm[u]] == static_cast<node_t>(-1)) dense[comm[u]] = nc++;
        for (node_t u = 0; u < nn; ++u) comm[u] = dense[comm[u]];
        for (auto& f : node2final) f = comm[f];
        if (!improved_any || nc == nn) break;
        // aggregate
        std::vector<std::unordered_map<node_t, double>> agg(nc);
        for (node_t u = 0; u < nn; ++u)
            for (auto [v, w] : adj[u]) agg[comm[u]][comm[v]] += w;
        adj.assign(nc, {});
        for (node_t c = 0; c < nc; ++c) {
            adj[c].reserve(agg[c].size());
            for (auto [d, w] : agg[c]) adj[c].emplace_back(d, w);
            std::sort(adj[c].begin(), adj[c].end());
        }
    }
    return node2final;
}

}  // namespace detail

// Community detection followed by greedy bin-packing of communities into m
// node-balanced bins. Deterministic per seed.
inline std::vector<std::vector<node_t>> partition(const Graph& g, std::size_t m,
                                                  PartitionMethod method, std::uint64_t seed) {
    if (m < 1) throw parameter_error("partition: need m >= 1");
    if (m > g.node_count()) throw parameter_error("partition: more machines than nodes");
    std::vector<node_t> label = method == PartitionMethod::louvain
                                    ? detail::louvain_communities(g, seed)
                                    : detail::label_propagation_communities(g, seed);
    std::unordered_map<node_t, std::vector<node_t>> by_label;
    for (node_t u = 0; u < g.node_count(); ++u) by_label[label[u]].push_back(u);
    std::vector<std::vector<node_t>> comms;
    comms.reserve(by_label.size());
    for (auto& [lab, nodes] : by_label) comms.push_back(std::move(nodes));
    std::sort(comms.begin(), comms.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() > b.size() : a.front() < b.front();
    });
    std::vector<std::vector<node_t>> bins(m);
    for (auto& c : comms) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < m; ++i)
            if (bins[i].size() < bins[best].size()) best = i;
        bins[best].insert(bins[best].end(), c.begin(), c.end());
    }
    // Bin-packing can leave bins empty or lopsided when communities are few
    // and large; peel nodes off the largest bin until sizes are within 2x.
    while (true) {
        std::size_t big = 0, small = 0;
        for (std::size_t j = 1; j < m; ++j) {
            if (bins[j].size() > bins[big].size()) big = j;
            if (bins[j].size() < bins[small].size()) small = j;
        }
        if (!bins[small].empty() && bins[big].size() <= 2 * bins[small].size()) break;
        bins[small].push_back(bins[big].back());
        bins[big].pop_back();
    }
    for (auto& b : bins) std::sort(b.begin(), b.end());
    return bins;
}

// One simulated machine: either a personalized summary or a raw subgraph
// (the baseline). Access counting backs the communication-freedom audit.
struct MachinePayload {
    std::optional<SummaryGraph> summary;
    std::optional<Graph> subgraph;
    std::vector<char> node_present;  // subgraph only: endpoint of a retained edge
    mutable std::size_t access_count = 0;
};

struct Deployment {
    std::size_t machine_count = 0;
    double per_machine_budget_bits = 0.0;
    std::vector<node_t> routing;  // node -> machine index
    std::vector<MachinePayload> payloads;
    std::vector<std::vector<node_t>> parts;
};

inline Deployment build_deployment_summaries(const Graph& g,
                                             const std::vector<std::vector<node_t>>& parts,
                                             double budget_bits, EngineConfig cfg) {
    Deployment dep;
    dep.machine_count = parts.size();
    dep.per_machine_budget_bits = budget_bits;
    dep.parts = parts;
    dep.routing.assign(g.node_count(), 0);
    cfg.budget_bits = budget_bits;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (node_t u : parts[i]) dep.routing[u] = static_cast<node_t>(i);
        TargetSet t = TargetSet::of(parts[i], g.node_count());
        MachinePayload payload;
        try {
            payload.summary = summarize(g, t, cfg).summary;
        } catch (const budget_infeasible_error& e) {
            throw budget_infeasible_error(
                "machine " + std::to_string(i) + ": " + e.what(), e.residual_bits, e.budget_bits);
        }
        dep.payloads.push_back(std::move(payload));
    }
    return dep;
}

// Baseline: per machine, the edges closest to its node set (by the nearer
// endpoint's hop distance; lexicographic within the breaking frontier) up to
// the Eq.-4 bit budget over the full id space.
inline Deployment build_deployment_subgraphs(const Graph& g,
                                             const std::vector<std::vector<node_t>>& parts,
                                             double budget_bits) {
    double bits_per_edge = 2.0 * std::log2(static_cast<double>(g.node_count()));
    std::size_t max_edges = static_cast<std::size_t>(budget_bits / bits_per_edge);
    if (max_edges < 1)
        throw budget_infeasible_error("subgraph budget below the size of one edge", bits_per_edge,
                                      budget_bits);
    Deployment dep;
    dep.machine_count = parts.size();
    dep.per_machine_budget_bits = budget_bits;
    dep.parts = parts;
    dep.routing.assign(g.node_count(), 0);
    auto all_edges = g.edges();
    for (std::size_t i = 0; i < parts.size(); ++i) {
        for (node_t u : parts[i]) dep.routing[u] = static_cast<node_t>(i);
        auto dist = detail::bfs_distances(g, parts[i]);
        struct Keyed {
            node_t d, u, v;
        };
        std::vector<Keyed> keyed;
        keyed.reserve(all_edges.size());
        for (auto [u, v] : all_edges) {
            node_t d = std::min(dist[u], dist[v]);
            if (d == static_cast<node_t>(-1)) continue;  // unreachable from this part
            keyed.push_back({d, u, v});
        }
        std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
            return std::tie(a.d, a.u, a.v) < std::tie(b.d, b.u, b.v);
        });
        std::size_t take = std::min(max_edges, keyed.size());
        std::vector<std::pair<node_t, node_t>> kept;
        kept.reserve(take);
        MachinePayload payload;
        payload.node_present.assign(g.node_count(), 0);
        for (std::size_t e = 0; e < take; ++e) {
            kept.emplace_back(keyed[e].u, keyed[e].v);
            payload.node_present[keyed[e].u] = 1;
            payload.node_present[keyed[e].v] = 1;
        }
        payload.subgraph = Graph::from_edges(g.node_count(), std::move(kept));
        dep.payloads.push_back(std::move(payload));
    }
    return dep;
}

struct MultiQueryResult {
    node_t query_node = 0;
    QueryKind kind = QueryKind::rwr;
    std::size_t machine = 0;
    bool answered = false;
    AnswerVector answer;
    std::vector<std::size_t> payloads_accessed;  // audit trail; must have size 1
};

// Routes each query to its machine and answers it on that payload alone.
inline std::vector<MultiQueryResult> answer_multi(
    const Deployment& dep, const std::vector<std::pair<node_t, QueryKind>>& queries) {
    std::vector<std::optional<detail::QueryBlocks>> blocks(dep.payloads.size());
    std::vector<MultiQueryResult> out;
    out.reserve(queries.size());
    for (auto [q, kind] : queries) {
        if (q >= dep.routing.size()) throw parameter_error("answer_multi: invalid query node");
        MultiQueryResult res;
        res.query_node = q;
        res.kind = kind;
        res.machine = dep.routing[q];
        const MachinePayload& payload = dep.payloads[res.machine];
        ++payload.access_count;
        res.payloads_accessed.push_back(res.machine);
        if (payload.summary) {
            if (!blocks[res.machine]) blocks[res.machine] = detail::make_blocks(*payload.summary);
        } else {
            if (!payload.node_present.empty() && !payload.node_present[q]) {
                out.push_back(std::move(res));  // unanswerable: node truncated away
                continue;
            }
            if (!blocks[res.machine]) blocks[res.machine] = detail::make_blocks(*payload.subgraph);
        }
        res.answer = run_query_on_blocks(*blocks[res.machine], kind, q);
        res.answered = true;
        out.push_back(std::move(res));
    }
    return out;
}

}  // namespace pegasus
