#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "pegasus/errors.hpp"
#include "pegasus/graph.hpp"
#include "pegasus/summary.hpp"

namespace pegasus {

enum class QueryKind { rwr, hop, php };

inline const char* to_string(QueryKind k) {
    switch (k) {
        case QueryKind::rwr: return "rwr";
        case QueryKind::hop: return "hop";
        case QueryKind::php: return "php";
    }
    return "?";
}

struct AnswerVector {
    std::vector<double> values;
    QueryKind kind;
    bool converged = true;
};

// Approximate neighbors of q on a summary (Alg. 4 semantics): union of the
// members of every supernode adjacent to S_q (S_q itself only via its
// self-loop), minus q. Materialized lazily per call.
inline std::vector<node_t> get_neighbors(const SummaryGraph& s, node_t q) {
    if (q >= s.node_count()) throw parameter_error("get_neighbors: invalid node id");
    std::vector<node_t> out;
    for (node_t a : s.superedge_neighbors(s.supernode_of(q))) {
        const auto& mem = s.members(a);
        out.insert(out.end(), mem.begin(), mem.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::remove(out.begin(), out.end(), q), out.end());
    return out;
}

namespace detail {

// Shared representation for queries on raw graphs and on summaries. Nodes in
// one block share a base neighbor list; a member is excluded from its own
// list only when the block covers itself (a supernode self-loop).
struct QueryBlocks {
    node_t node_count = 0;
    std::vector<std::vector<node_t>> members;
    std::vector<std::vector<node_t>> base;       // shared neighbor list per block
    std::vector<char> covers_self;               // member appears in its own base list
    std::vector<node_t> block_of;                // node -> block index
};

inline QueryBlocks make_blocks(const Graph& g) {
    QueryBlocks qb;
    qb.node_count = g.node_count();
    qb.members.resize(qb.node_count);
    qb.base.resize(qb.node_count);
    qb.covers_self.assign(qb.node_count, 0);
    qb.block_of.resize(qb.node_count);
    for (node_t u = 0; u < qb.node_count; ++u) {
        qb.members[u] = {u};
        qb.base[u].assign(g.neighbors(u).begin(), g.neighbors(u).end());
        qb.block_of[u] = u;
    }
    return qb;
}

inline QueryBlocks make_blocks(const SummaryGraph& s) {
    QueryBlocks qb;
    qb.node_count = s.node_count();
    auto live = s.live_supernodes();
    qb.members.reserve(live.size());
    qb.base.reserve(live.size());
    qb.covers_self.reserve(live.size());
    qb.block_of.resize(qb.node_count);
    for (node_t a : live) {
        node_t idx = static_cast<node_t>(qb.members.size());
        for (node_t u : s.members(a)) qb.block_of[u] = idx;
        qb.members.push_back(s.members(a));
        std::vector<node_t> nb;
        bool self = false;
        for (node_t x : s.superedge_neighbors(a)) {
            if (x == a) self = true;
            const auto& mem = s.members(x);
            nb.insert(nb.end(), mem.begin(), mem.end());
        }
        std::sort(nb.begin(), nb.end());
        qb.base.push_back(std::move(nb));
        qb.covers_self.push_back(self ? 1 : 0);
    }
    return qb;
}

inline void check_query_node(const QueryBlocks& qb, node_t q) {
    if (q >= qb.node_count) throw parameter_error("invalid query node id");
}

// BFS levels; each block expands once (all its members see the same base).
inline AnswerVector hop_on_blocks(const QueryBlocks& qb, node_t q) {
    check_query_node(qb, q);
    constexpr double UNSEEN = -1.0;
    AnswerVector ans{std::vector<double>(qb.node_count, UNSEEN), QueryKind::hop};
    std::vector<char> expanded(qb.members.size(), 0);
    std::deque<node_t> bfs{q};
    ans.values[q] = 0.0;
    double max_finite = 0.0;
    while (!bfs.empty()) {
        node_t u = bfs.front();
        bfs.pop_front();
        node_t blk = qb.block_of[u];
        if (expanded[blk]) continue;
        expanded[blk] = 1;
        for (node_t v : qb.base[blk]) {
            if (v == u || ans.values[v] != UNSEEN) continue;
            ans.values[v] = ans.values[u] + 1.0;
            max_finite = std::max(max_finite, ans.values[v]);
            bfs.push_back(v);
        }
    }
    // Unreachable nodes take the largest finite distance found from q.
    for (double& d : ans.values)
        if (d == UNSEEN) d = max_finite;
    return ans;
}

// Power iteration with restart at q. Mass of degree-0 nodes flows back to q
// through the normalization step.
inline AnswerVector rwr_on_blocks(const QueryBlocks& qb, node_t q, double walk_prob, double tol,
                                  std::size_t max_iters) {
    check_query_node(qb, q);
    if (walk_prob <= 0.0 || walk_prob >= 1.0)
        throw parameter_error("rwr: walk probability must be in (0,1)");
    node_t n = qb.node_count;
    std::vector<double> r(n, 1.0 / static_cast<double>(n)), next(n);
    AnswerVector ans{{}, QueryKind::rwr};
    for (std::size_t it = 0; it < max_iters; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t blk = 0; blk < qb.members.size(); ++blk) {
            // Within a block every member has the same out-degree.
            std::size_t deg = qb.base[blk].size() - (qb.covers_self[blk] ? 1 : 0);
            if (deg == 0) continue;
            double pooled = 0.0;
            for (node_t u : qb.members[blk]) pooled += r[u];
            double share = pooled / static_cast<double>(deg);
            for (node_t v : qb.base[blk]) next[v] += share;
            if (qb.covers_self[blk])
                for (node_t u : qb.members[blk]) next[u] -= r[u] / static_cast<double>(deg);
        }
        double walked = 0.0;
        for (double& x : next) {
            x *= walk_prob;
            walked += x;
        }
        next[q] += 1.0 - walked;
        double change = 0.0;
        for (node_t v = 0; v < n; ++v) change += std::abs(next[v] - r[v]);
        r.swap(next);
        if (change < tol) {
            ans.values = std::move(r);
            return ans;
        }
    }
    ans.values = std::move(r);
    ans.converged = false;
    return ans;
}

// Fixed point of PHP_u = c * mean over neighbors of PHP_v, with PHP_q pinned
// to 1, from an all-zeros start.
inline AnswerVector php_on_blocks(const QueryBlocks& qb, node_t q, double c, double tol,
                                  std::size_t max_iters) {
    check_query_node(qb, q);
    if (c <= 0.0 || c >= 1.0) throw parameter_error("php: c must be in (0,1)");
    node_t n = qb.node_count;
    std::vector<double> h(n, 0.0), next(n, 0.0);
    h[q] = 1.0;
    AnswerVector ans{{}, QueryKind::php};
    for (std::size_t it = 0; it < max_iters; ++it) {
        double change = 0.0;
        for (std::size_t blk = 0; blk < qb.members.size(); ++blk) {
            std::size_t deg = qb.base[blk].size() - (qb.covers_self[blk] ? 1 : 0);
            double base_sum = 0.0;
            for (node_t v : qb.base[blk]) base_sum += h[v];
            for (node_t u : qb.members[blk]) {
                if (u == q) {
                    next[u] = 1.0;
                    continue;
                }
                double val = 0.0;
                if (deg > 0) {
                    double sum = base_sum - (qb.covers_self[blk] ? h[u] : 0.0);
                    val = c * sum / static_cast<double>(deg);
                }
                change = std::max(change, std::abs(val - h[u]));
                next[u] = val;
            }
        }
        h.swap(next);
        if (change < tol) {
            ans.values = std::move(h);
            return ans;
        }
    }
    ans.values = std::move(h);
    ans.converged = false;
    return ans;
}

}  // namespace detail

constexpr double kRwrWalkProb = 0.95;  // restart probability 0.05
constexpr double kPhpC = 0.95;
constexpr double kQueryTol = 1e-9;
constexpr std::size_t kQueryMaxIters = 1000;

template <typename Source>
AnswerVector hop_query(const Source& src, node_t q) {
    return detail::hop_on_blocks(detail::make_blocks(src), q);
}

template <typename Source>
AnswerVector rwr_query(const Source& src, node_t q, double walk_prob = kRwrWalkProb,
                       double tol = kQueryTol, std::size_t max_iters = kQueryMaxIters) {
    return detail::rwr_on_blocks(detail::make_blocks(src), q, walk_prob, tol, max_iters);
}

template <typename Source>
AnswerVector php_query(const Source& src, node_t q, double c = kPhpC, double tol = kQueryTol,
                       std::size_t max_iters = kQueryMaxIters) {
    return detail::php_on_blocks(detail::make_blocks(src), q, c, tol, max_iters);
}

// Dispatch helper used by the CLI and experiment drivers; blocks may be built
// once and reused across queries on the same source.
inline AnswerVector run_query_on_blocks(const detail::QueryBlocks& qb, QueryKind kind, node_t q) {
    switch (kind) {
        case QueryKind::hop: return detail::hop_on_blocks(qb, q);
        case QueryKind::rwr: return detail::rwr_on_blocks(qb, q, kRwrWalkProb, kQueryTol, kQueryMaxIters);
        case QueryKind::php: return detail::php_on_blocks(qb, q, kPhpC, kQueryTol, kQueryMaxIters);
    }
    throw parameter_error("unknown query kind");
}

inline QueryKind parse_query_kind(const std::string& s) {
    if (s == "rwr") return QueryKind::rwr;
    if (s == "hop") return QueryKind::hop;
    if (s == "php") return QueryKind::php;
    throw parameter_error("unknown query kind: " + s);
}

}  // namespace pegasus
