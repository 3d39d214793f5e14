#pragma once

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "pegasus/errors.hpp"
#include "pegasus/graph.hpp"

namespace pegasus {

struct TargetSet {
    std::vector<node_t> nodes;  // sorted, deduplicated, non-empty

    static TargetSet of(std::vector<node_t> ids, node_t node_count) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        if (ids.empty()) throw parameter_error("target set must be non-empty");
        if (ids.back() >= node_count) throw parameter_error("target node id out of range");
        return TargetSet{std::move(ids)};
    }

    static TargetSet all(node_t node_count) {
        std::vector<node_t> ids(node_count);
        std::iota(ids.begin(), ids.end(), 0u);
        return TargetSet{std::move(ids)};
    }

    static TargetSet sample(node_t node_count, node_t size, std::uint64_t seed) {
        if (size == 0 || size > node_count) throw parameter_error("invalid target sample size");
        auto rng = make_rng(seed, "targets");
        auto perm = random_permutation(node_count, rng);
        std::vector<node_t> ids(perm.begin(), perm.begin() + size);
        return of(std::move(ids), node_count);
    }

    static TargetSet from_file(const std::string& path, node_t node_count) {
        std::ifstream in(path);
        if (!in) throw parse_error("cannot open target file: " + path);
        std::vector<node_t> ids;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::size_t first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            std::istringstream ls(line);
            std::uint64_t id;
            if (!(ls >> id))
                throw parse_error(path + ":" + std::to_string(lineno) + ": expected a node id");
            ids.push_back(static_cast<node_t>(id));
        }
        return of(std::move(ids), node_count);
    }
};

namespace detail {

// Compensated (Kahan) summation; z aggregates up to 1e7 terms.
struct KahanSum {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

}  // namespace detail

// Per-node hop distance to the target set, the factor w_u = alpha^(-D(u,T)),
// and the normalizer z making the mean pair weight 1. The |V|x|V| weight
// matrix is never materialized: W(u,v) = w_u * w_v / z.
class WeightModel {
public:
    WeightModel(const Graph& g, const TargetSet& t, double alpha) : alpha_(alpha) {
        if (alpha < 1.0) throw parameter_error("alpha must be >= 1");
        if (t.nodes.empty()) throw parameter_error("target set must be non-empty");
        node_t n = g.node_count();
        distance_ = detail::bfs_distances(g, t.nodes);
        factor_.resize(n);
        detail::KahanSum sw, sw2;
        for (node_t u = 0; u < n; ++u) {
            double w;
            if (distance_[u] == static_cast<node_t>(-1)) {
                unreachable_ = true;
                w = 0.0;  // alpha^(-inf) limit
            } else {
                w = std::pow(alpha, -static_cast<double>(distance_[u]));
            }
            factor_[u] = w;
            sw.add(w);
            sw2.add(w * w);
        }
        factor_sum_ = sw.sum;
        z_ = (sw.sum * sw.sum - sw2.sum) /
             (static_cast<double>(n) * (static_cast<double>(n) - 1.0));
    }

    node_t distance(node_t u) const { return distance_[u]; }
    double factor(node_t u) const { return factor_[u]; }
    double z() const { return z_; }
    double alpha() const { return alpha_; }
    double factor_sum() const { return factor_sum_; }
    node_t node_count() const { return static_cast<node_t>(factor_.size()); }
    bool has_unreachable() const { return unreachable_; }

    // Distinguishes models for caching; copies share the id (values are
    // immutable after construction).
    std::uint64_t id() const { return id_; }

    double pair_weight(node_t u, node_t v) const {
        if (u == v) throw parameter_error("pair_weight: self-pairs carry no weight");
        return factor_[u] * factor_[v] / z_;
    }

private:
    static std::uint64_t next_id() {
        static std::atomic<std::uint64_t> counter{0};
        return ++counter;
    }

    std::vector<node_t> distance_;
    std::vector<double> factor_;
    double factor_sum_ = 0.0;
    double z_ = 1.0;
    double alpha_ = 1.0;
    bool unreachable_ = false;
    std::uint64_t id_ = next_id();
};

inline WeightModel build_weight_model(const Graph& g, const TargetSet& t, double alpha) {
    return WeightModel(g, t, alpha);
}

}  // namespace pegasus
