#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pegasus/errors.hpp"
#include "pegasus/graph.hpp"
#include "pegasus/weights.hpp"

namespace pegasus {

// Supernode/superedge summary of a graph. Supernode ids live in the node-id
// space; merging reuses the smaller id and retires the larger one, so ids of
// live supernodes stay unique but become sparse. Superedges are kept as
// per-supernode adjacency sets (self-loops allowed).
class SummaryGraph {
public:
    SummaryGraph() = default;

    explicit SummaryGraph(const Graph& g) {
        node_t n = g.node_count();
        membership_.resize(n);
        members_.resize(n);
        adj_.resize(n);
        for (node_t u = 0; u < n; ++u) {
            membership_[u] = u;
            members_[u] = {u};
        }
        supernode_count_ = n;
        for (node_t u = 0; u < n; ++u)
            for (node_t v : g.neighbors(u))
                if (u < v) add_superedge(u, v);
    }

    node_t node_count() const { return static_cast<node_t>(membership_.size()); }
    std::size_t supernode_count() const { return supernode_count_; }
    std::size_t superedge_count() const { return superedge_count_; }

    node_t supernode_of(node_t u) const { return membership_[u]; }
    bool alive(node_t a) const { return a < members_.size() && !members_[a].empty(); }
    const std::vector<node_t>& members(node_t a) const { return members_[a]; }

    bool has_superedge(node_t a, node_t b) const {
        return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
    }

    void add_superedge(node_t a, node_t b) {
        if (a == b && members_[a].size() == 1)
            throw parameter_error("self-loop on a singleton supernode reconstructs nothing");
        if (sorted_insert(adj_[a], b)) {
            if (a != b) sorted_insert(adj_[b], a);
            ++superedge_count_;
        }
    }

    void remove_superedge(node_t a, node_t b) {
        if (sorted_erase(adj_[a], b)) {
            if (a != b) sorted_erase(adj_[b], a);
            --superedge_count_;
        }
    }

    // Superedge neighbors of a (possibly including a itself), sorted.
    const std::vector<node_t>& superedge_neighbors(node_t a) const { return adj_[a]; }

    // Interleaved per-node (supernode, factor) records for the hot edge scans;
    // one random cache line per endpoint instead of two. Memoized against one
    // weight model and kept current across merges. Not thread-safe.
    struct NodeInfo {
        node_t supernode;
        double factor;
    };
    const NodeInfo* node_info(const WeightModel& m) const {
        if (ninfo_model_ != m.id() || ninfo_.size() != membership_.size()) {
            ninfo_.resize(membership_.size());
            for (node_t u = 0; u < membership_.size(); ++u)
                ninfo_[u] = NodeInfo{membership_[u], m.factor(u)};
            ninfo_model_ = m.id();
        }
        return ninfo_.data();
    }

    // Per-supernode weight sums (Σ factor, Σ factor²) over the member list,
    // memoized against one weight model at a time and invalidated on merge.
    // Not thread-safe; accumulation order matches a plain member scan.
    std::pair<double, double> weight_sums(const WeightModel& m, node_t a) const {
        if (wcache_.model_id != m.id() || wcache_.entries.size() != members_.size()) {
            wcache_.model_id = m.id();
            wcache_.entries.assign(members_.size(), WeightCacheEntry{});
        }
        auto& e = wcache_.entries[a];
        if (!e.valid) {
            double sw = 0.0, sw2 = 0.0;
            for (node_t u : members_[a]) {
                double f = m.factor(u);
                sw += f;
                sw2 += f * f;
            }
            e = WeightCacheEntry{sw, sw2, 1};
        }
        return {e.sum, e.sq};
    }

    // Merge b into a (ids arbitrary); the union lives under min(a,b). All
    // superedges incident to a or b are dropped; the caller reinstalls the
    // chosen set. Returns the surviving id.
    node_t merge_supernodes(node_t a, node_t b) {
        if (a == b) throw parameter_error("cannot merge a supernode with itself");
        node_t keep = std::min(a, b), gone = std::max(a, b);
        for (node_t x : std::vector<node_t>(adj_[keep])) remove_superedge(keep, x);
        for (node_t x : std::vector<node_t>(adj_[gone])) remove_superedge(gone, x);
        std::vector<node_t> merged;
        merged.reserve(members_[keep].size() + members_[gone].size());
        std::merge(members_[keep].begin(), members_[keep].end(), members_[gone].begin(),
                   members_[gone].end(), std::back_inserter(merged));
        for (node_t u : members_[gone]) {
            membership_[u] = keep;
            if (u < ninfo_.size()) ninfo_[u].supernode = keep;
        }
        members_[keep] = std::move(merged);
        members_[gone].clear();
        members_[gone].shrink_to_fit();
        --supernode_count_;
        if (keep < wcache_.entries.size()) wcache_.entries[keep].valid = 0;
        if (gone < wcache_.entries.size()) wcache_.entries[gone].valid = 0;
        return keep;
    }

    std::vector<node_t> live_supernodes() const {
        std::vector<node_t> out;
        out.reserve(supernode_count_);
        for (node_t a = 0; a < members_.size(); ++a)
            if (!members_[a].empty()) out.push_back(a);
        return out;
    }

    // Canonical (small,large) superedge pairs, sorted.
    std::vector<std::pair<node_t, node_t>> superedges() const {
        std::vector<std::pair<node_t, node_t>> out;
        out.reserve(superedge_count_);
        for (node_t a = 0; a < adj_.size(); ++a)
            for (node_t b : adj_[a])
                if (a <= b) out.emplace_back(a, b);
        std::sort(out.begin(), out.end());
        return out;
    }

    // Direct construction (for file loading and tests).
    static SummaryGraph from_parts(std::vector<node_t> membership,
                                   const std::vector<std::pair<node_t, node_t>>& superedges) {
        SummaryGraph s;
        s.membership_ = std::move(membership);
        node_t n = static_cast<node_t>(s.membership_.size());
        node_t max_sn = 0;
        for (node_t u = 0; u < n; ++u) max_sn = std::max(max_sn, s.membership_[u]);
        s.members_.resize(max_sn + 1);
        s.adj_.resize(max_sn + 1);
        for (node_t u = 0; u < n; ++u) s.members_[s.membership_[u]].push_back(u);
        for (auto& m : s.members_)
            if (!m.empty()) ++s.supernode_count_;
        for (auto [a, b] : superedges) {
            if (!s.alive(a) || !s.alive(b)) throw parameter_error("superedge references dead supernode");
            s.add_superedge(a, b);
        }
        return s;
    }

private:
    static bool sorted_insert(std::vector<node_t>& v, node_t x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        if (it != v.end() && *it == x) return false;
        v.insert(it, x);
        return true;
    }

    static bool sorted_erase(std::vector<node_t>& v, node_t x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        if (it == v.end() || *it != x) return false;
        v.erase(it);
        return true;
    }

    struct WeightCacheEntry {
        double sum = 0.0;
        double sq = 0.0;
        char valid = 0;
    };
    struct WeightCache {
        std::uint64_t model_id = 0;
        std::vector<WeightCacheEntry> entries;
    };

    std::vector<node_t> membership_;
    std::vector<std::vector<node_t>> members_;
    std::vector<std::vector<node_t>> adj_;  // sorted superedge neighbor lists
    std::size_t supernode_count_ = 0;
    std::size_t superedge_count_ = 0;
    mutable WeightCache wcache_;
    mutable std::vector<NodeInfo> ninfo_;
    mutable std::uint64_t ninfo_model_ = 0;
};

inline SummaryGraph initial_summary(const Graph& g) { return SummaryGraph(g); }

// Size of the summary in bits: 2|P| log2|S| + |V| log2|S|; 0 when |S| = 1.
inline double summary_size_bits(const SummaryGraph& s) {
    double S = static_cast<double>(s.supernode_count());
    if (S <= 1.0) return 0.0;
    return (2.0 * static_cast<double>(s.superedge_count()) + static_cast<double>(s.node_count())) *
           std::log2(S);
}

// Sufficient statistics for one supernode pair: weighted mass of the input
// edges it spans, total weight mass of all spanned pairs, and the raw edge
// count. Everything the cost model needs follows from these.
struct PairStats {
    double present_mass = 0.0;
    double total_mass = 0.0;
    std::size_t edge_count = 0;
};

namespace detail {

inline void check_alive(const SummaryGraph& s, node_t a) {
    if (!s.alive(a)) throw parameter_error("dead supernode id " + std::to_string(a));
}

inline double factor_sum(const WeightModel& m, const std::vector<node_t>& nodes) {
    double s = 0.0;
    for (node_t u : nodes) s += m.factor(u);
    return s;
}

inline double factor_sq_sum(const WeightModel& m, const std::vector<node_t>& nodes) {
    double s = 0.0;
    for (node_t u : nodes) s += m.factor(u) * m.factor(u);
    return s;
}

// Total weight mass between two distinct supernodes, from factor sums.
inline double cross_total_mass(const WeightModel& m, const SummaryGraph& s, node_t a, node_t b) {
    return s.weight_sums(m, a).first * s.weight_sums(m, b).first / m.z();
}

// Total weight mass of all distinct pairs inside one supernode.
inline double self_total_mass(const WeightModel& m, const SummaryGraph& s, node_t a) {
    auto [sw, sw2] = s.weight_sums(m, a);
    return (sw * sw - sw2) / (2.0 * m.z());
}

}  // namespace detail

inline PairStats pair_stats(const Graph& g, const WeightModel& m, const SummaryGraph& s,
                            node_t a, node_t b) {
    detail::check_alive(s, a);
    detail::check_alive(s, b);
    PairStats st;
    if (a == b) {
        st.total_mass = detail::self_total_mass(m, s, a);
        for (node_t u : s.members(a))
            for (node_t v : g.neighbors(u))
                if (v > u && s.supernode_of(v) == a) {
                    st.present_mass += m.factor(u) * m.factor(v);
                    ++st.edge_count;
                }
    } else {
        st.total_mass = detail::cross_total_mass(m, s, a, b);
        const auto& small = s.members(a).size() <= s.members(b).size() ? s.members(a) : s.members(b);
        node_t other = s.members(a).size() <= s.members(b).size() ? b : a;
        for (node_t u : small)
            for (node_t v : g.neighbors(u))
                if (s.supernode_of(v) == other) {
                    st.present_mass += m.factor(u) * m.factor(v);
                    ++st.edge_count;
                }
    }
    st.present_mass /= m.z();
    return st;
}

namespace detail {

// pair_cost body with the two logarithms hoisted out by the caller.
inline double pair_cost_logs(const PairStats& st, bool superedge_present, double log2_supernodes,
                             double log2_nodes) {
    if (superedge_present)
        return 2.0 * log2_supernodes + log2_nodes * std::max(0.0, st.total_mass - st.present_mass);
    return log2_nodes * st.present_mass;
}

}  // namespace detail

// Cost of one supernode pair: superedge bits plus error bits. With a
// superedge every spanned pair reconstructs as an edge, so the error is the
// missing-pair mass; without one the error is the present-edge mass.
inline double pair_cost(const PairStats& st, bool superedge_present, std::size_t supernode_count,
                        node_t node_count) {
    return detail::pair_cost_logs(st, superedge_present,
                                  std::log2(static_cast<double>(supernode_count)),
                                  std::log2(static_cast<double>(node_count)));
}

// Presence flag minimizing pair_cost; ties resolve to absent (sparser).
inline std::pair<bool, double> optimal_superedge_choice(const PairStats& st,
                                                        std::size_t supernode_count,
                                                        node_t node_count) {
    double with = pair_cost(st, true, supernode_count, node_count);
    double without = pair_cost(st, false, supernode_count, node_count);
    return with < without ? std::make_pair(true, with) : std::make_pair(false, without);
}

namespace detail {

struct NeighborBucket {
    node_t other;
    double present_mass;  // already divided by z
    std::size_t edges;
};

// All supernodes X that share at least one input edge with a, with the
// weighted edge mass per bucket. The self bucket (other == a) counts each
// within-edge once. O(sum of member degrees).
inline std::vector<NeighborBucket> edge_buckets(const Graph& g, const WeightModel& m,
                                                const SummaryGraph& s, node_t a) {
    // Dense scratch keyed by supernode id (ids are < node_count); entries are
    // reset via the touched list, so repeated calls stay allocation-free.
    struct Slot {
        double mass = 0.0;
        std::size_t edges = 0;
    };
    thread_local std::vector<Slot> acc;
    thread_local std::vector<node_t> touched;
    if (acc.size() < s.node_count()) acc.assign(s.node_count(), Slot{});
    touched.clear();
    const auto* info = s.node_info(m);
    for (node_t u : s.members(a)) {
        double wu = info[u].factor;
        for (node_t v : g.neighbors(u)) {
            node_t x = info[v].supernode;
            if (x == a && v <= u) continue;  // count within-edges once
            if (acc[x].edges == 0) touched.push_back(x);
            acc[x].mass += wu * info[v].factor;
            ++acc[x].edges;
        }
    }
    std::vector<NeighborBucket> out;
    out.reserve(touched.size());
    for (node_t x : touched) {
        out.push_back(NeighborBucket{x, acc[x].mass / m.z(), acc[x].edges});
        acc[x] = Slot{};
    }
    std::sort(out.begin(), out.end(),
              [](const NeighborBucket& l, const NeighborBucket& r) { return l.other < r.other; });
    return out;
}

inline double bucket_total_mass(const WeightModel& m, const SummaryGraph& s, node_t a, node_t x) {
    return a == x ? self_total_mass(m, s, a) : cross_total_mass(m, s, a, x);
}

}  // namespace detail

// Cost of supernode a: sum of pair costs over every pair {a,b} that carries a
// superedge or an input edge (all other pairs cost 0).
inline double supernode_cost(const Graph& g, const WeightModel& m, const SummaryGraph& s, node_t a) {
    detail::check_alive(s, a);
    std::size_t S = s.supernode_count();
    node_t V = s.node_count();
    double cost = 0.0;
    std::unordered_set<node_t> seen;
    for (const auto& b : detail::edge_buckets(g, m, s, a)) {
        seen.insert(b.other);
        PairStats st{b.present_mass, detail::bucket_total_mass(m, s, a, b.other), b.edges};
        cost += pair_cost(st, s.has_superedge(a, b.other), S, V);
    }
    for (node_t x : s.superedge_neighbors(a)) {
        if (seen.count(x)) continue;  // superedge with zero present edges
        PairStats st{0.0, detail::bucket_total_mass(m, s, a, x), 0};
        cost += pair_cost(st, true, S, V);
    }
    return cost;
}

// Personalized error of the whole summary, aggregated from PairStats without
// any explicit reconstruction (unordered-pair accounting).
inline double personalized_error(const Graph& g, const WeightModel& m, const SummaryGraph& s) {
    // Present edge mass not covered by a superedge, plus missing-pair mass
    // under each superedge.
    double err = 0.0;
    for (node_t a : s.live_supernodes()) {
        for (const auto& b : detail::edge_buckets(g, m, s, a)) {
            if (b.other < a) continue;  // visit each unordered pair once
            if (!s.has_superedge(a, b.other)) err += b.present_mass;
        }
    }
    for (auto [a, b] : s.superedges()) {
        PairStats st = pair_stats(g, m, s, a, b);
        err += st.total_mass - st.present_mass;
    }
    return err;
}

// Total MDL cost: Size + log2|V| * RE. Brute-force verification path.
inline double total_cost(const Graph& g, const WeightModel& m, const SummaryGraph& s) {
    return summary_size_bits(s) +
           std::log2(static_cast<double>(s.node_count())) * personalized_error(g, m, s);
}

// Explicit reconstruction: edge {u,v} iff u != v and {S_u,S_v} in P. Guarded;
// intended for verification on small graphs.
inline Graph reconstruct_edges(const SummaryGraph& s, bool override_guard = false) {
    if (s.node_count() > 5000 && !override_guard)
        throw parameter_error("reconstruct_edges: graph too large; pass override to force");
    std::vector<std::pair<node_t, node_t>> edges;
    for (auto [a, b] : s.superedges()) {
        if (a == b) {
            const auto& mem = s.members(a);
            for (std::size_t i = 0; i < mem.size(); ++i)
                for (std::size_t j = i + 1; j < mem.size(); ++j) edges.emplace_back(mem[i], mem[j]);
        } else {
            for (node_t u : s.members(a))
                for (node_t v : s.members(b)) edges.emplace_back(std::min(u, v), std::max(u, v));
        }
    }
    return Graph::from_edges(s.node_count(), std::move(edges));
}

// ---- PGS v1 text format -------------------------------------------------
// Header: "PGS 1 <|V|> <|S|> <|P|>", then |V| membership lines, then |P|
// superedge lines in canonical order. Supernode ids are densified on save.

inline void save_pgs(const SummaryGraph& s, std::ostream& out) {
    auto live = s.live_supernodes();
    std::unordered_map<node_t, node_t> dense;
    dense.reserve(live.size());
    for (node_t i = 0; i < live.size(); ++i) dense[live[i]] = i;
    out << "PGS 1 " << s.node_count() << ' ' << live.size() << ' ' << s.superedge_count() << '\n';
    for (node_t u = 0; u < s.node_count(); ++u) out << u << ' ' << dense[s.supernode_of(u)] << '\n';
    for (auto [a, b] : s.superedges()) {
        node_t da = dense[a], db = dense[b];
        out << std::min(da, db) << ' ' << std::max(da, db) << '\n';
    }
}

inline void save_pgs(const SummaryGraph& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write summary: " + path);
    save_pgs(s, out);
}

inline SummaryGraph load_pgs(std::istream& in, const std::string& what = "<stream>") {
    auto next_line = [&](std::string& line) {
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            return true;
        }
        return false;
    };
    std::string line;
    if (!next_line(line)) throw parse_error(what + ": missing PGS header");
    std::istringstream hs(line);
    std::string magic;
    int version;
    std::uint64_t nv, ns, np;
    if (!(hs >> magic >> version >> nv >> ns >> np) || magic != "PGS" || version != 1)
        throw parse_error(what + ": bad PGS header: " + line);
    std::vector<node_t> membership(nv);
    for (std::uint64_t i = 0; i < nv; ++i) {
        if (!next_line(line)) throw parse_error(what + ": truncated membership section");
        std::istringstream ls(line);
        std::uint64_t node, sn;
        if (!(ls >> node >> sn) || node >= nv || sn >= ns)
            throw parse_error(what + ": bad membership line: " + line);
        membership[node] = static_cast<node_t>(sn);
    }
    std::vector<std::pair<node_t, node_t>> superedges;
    superedges.reserve(np);
    for (std::uint64_t i = 0; i < np; ++i) {
        if (!next_line(line)) throw parse_error(what + ": truncated superedge section");
        std::istringstream ls(line);
        std::uint64_t a, b;
        if (!(ls >> a >> b) || a >= ns || b >= ns)
            throw parse_error(what + ": bad superedge line: " + line);
        superedges.emplace_back(static_cast<node_t>(a), static_cast<node_t>(b));
    }
    // File ids are dense by construction, but member sets under them need not
    // match internal id conventions; remap each supernode to its smallest
    // member so merged ids stay in node-id space.
    std::vector<node_t> rep(ns, static_cast<node_t>(-1));
    for (node_t u = 0; u < nv; ++u)
        rep[membership[u]] = std::min(rep[membership[u]], u);
    for (node_t sn = 0; sn < ns; ++sn)
        if (rep[sn] == static_cast<node_t>(-1))
            throw parse_error(what + ": empty supernode " + std::to_string(sn));
    std::vector<node_t> mem2(nv);
    for (node_t u = 0; u < nv; ++u) mem2[u] = rep[membership[u]];
    for (auto& [a, b] : superedges) {
        a = rep[a];
        b = rep[b];
        if (a > b) std::swap(a, b);
    }
    return SummaryGraph::from_parts(std::move(mem2), superedges);
}

inline SummaryGraph load_pgs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open summary: " + path);
    return load_pgs(in, path);
}

}  // namespace pegasus
