#pragma once

#include <algorithm>
#include <string>
#include <limits>
#include <cmath>
#include <numeric>
#include <vector>

#include "pegasus/errors.hpp"
#include "pegasus/graph.hpp"
#include "pegasus/query.hpp"
#include "pegasus/summary.hpp"
#include "pegasus/weights.hpp"

namespace pegasus {

struct SmapeResult {
    double sum = 0.0;   // the raw per-entry sum
    double mean = 0.0;  // length-normalized
};

// Per-entry |x - xhat| / (|x| + |xhat|), 0 when both entries are 0.
inline SmapeResult smape(const std::vector<double>& x, const std::vector<double>& xhat) {
    if (x.size() != xhat.size()) throw parameter_error("smape: length mismatch");
    SmapeResult r;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double denom = std::abs(x[i]) + std::abs(xhat[i]);
        if (denom > 0.0) r.sum += std::abs(x[i] - xhat[i]) / denom;
    }
    r.mean = x.empty() ? 0.0 : r.sum / static_cast<double>(x.size());
    return r;
}

namespace detail {

// Fractional (average) ranks.
inline std::vector<double> ranks_of(const std::vector<double>& x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> rank(x.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
        for (std::size_t t = i; t < j; ++t) rank[order[t]] = avg;
        i = j;
    }
    return rank;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    double n = static_cast<double>(a.size());
    double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) throw parameter_error("spearman: constant vector has no ranking");
    return cov / std::sqrt(va * vb);
}

}  // namespace detail

// Pearson correlation of fractional ranks.
inline double spearman(const std::vector<double>& x, const std::vector<double>& xhat) {
    if (x.size() != xhat.size()) throw parameter_error("spearman: length mismatch");
    if (x.size() < 2) throw parameter_error("spearman: need at least two entries");
    return detail::pearson(detail::ranks_of(x), detail::ranks_of(xhat));
}

inline double compression_rate(const SummaryGraph& s, const Graph& g) {
    if (g.edge_count() == 0) throw parameter_error("compression_rate: zero-edge input");
    return summary_size_bits(s) / graph_size_bits(g);
}

// Size metric for externally produced weighted summaries (this engine's own
// outputs are unweighted).
inline double weighted_summary_size_bits(std::size_t supernodes, std::size_t superedges,
                                         std::size_t nodes, std::size_t max_weight) {
    if (supernodes < 1 || nodes < 1 || max_weight < 1)
        throw parameter_error("weighted_summary_size_bits: counts must be >= 1");
    double logS = std::log2(static_cast<double>(supernodes));
    return static_cast<double>(superedges) * (2.0 * logS + std::log2(static_cast<double>(max_weight))) +
           static_cast<double>(nodes) * logS;
}

// Personalized error at a probe node relative to a matched-budget baseline
// summary (typically built with T = V). PairStats aggregation only; no
// reconstruction.
inline double relative_personalized_error(const Graph& g, const SummaryGraph& s, node_t probe,
                                          double alpha, const SummaryGraph& baseline) {
    if (g.node_count() > 50000)
        throw parameter_error("relative_personalized_error: guarded to 50k nodes");
    WeightModel m = build_weight_model(g, TargetSet::of({probe}, g.node_count()), alpha);
    double num = personalized_error(g, m, s);
    double den = personalized_error(g, m, baseline);
    if (den == 0.0) {
        if (num == 0.0) return std::numeric_limits<double>::quiet_NaN();  // not applicable
        return std::numeric_limits<double>::infinity();
    }
    return num / den;
}

struct MetricReport {
    std::string summary_label;
    QueryKind kind;
    double smape_sum = 0.0;
    double smape_mean = 0.0;
    double spearman = 0.0;
    double compression_rate = 0.0;
    std::size_t query_count = 0;
    std::size_t failed_queries = 0;
};

// Ground truth on g vs approximate answers on each summary, averaged over the
// query nodes.
inline std::vector<MetricReport> run_query_accuracy_experiment(
    const Graph& g, const std::vector<std::pair<std::string, const SummaryGraph*>>& summaries,
    const std::vector<node_t>& query_nodes, const std::vector<QueryKind>& kinds) {
    std::vector<MetricReport> table;
    if (kinds.empty() || summaries.empty()) return table;
    auto truth_blocks = detail::make_blocks(g);
    for (const auto& [label, sp] : summaries) {
        auto blocks = detail::make_blocks(*sp);
        for (QueryKind kind : kinds) {
            MetricReport row;
            row.summary_label = label;
            row.kind = kind;
            row.compression_rate = compression_rate(*sp, g);
            double spearman_acc = 0.0;
            for (node_t q : query_nodes) {
                try {
                    auto truth = run_query_on_blocks(truth_blocks, kind, q);
                    auto approx = run_query_on_blocks(blocks, kind, q);
                    auto sm = smape(truth.values, approx.values);
                    row.smape_sum += sm.sum;
                    row.smape_mean += sm.mean;
                    spearman_acc += spearman(truth.values, approx.values);
                    ++row.query_count;
                } catch (const parameter_error&) {
                    ++row.failed_queries;
                }
            }
            if (row.query_count > 0) {
                double n = static_cast<double>(row.query_count);
                row.smape_sum /= n;
                row.smape_mean /= n;
                row.spearman = spearman_acc / n;
            }
            table.push_back(std::move(row));
        }
    }
    return table;
}

}  // namespace pegasus
