#pragma once

#include <algorithm>
#include <limits>
#include <functional>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include "pegasus/errors.hpp"
#include "pegasus/graph.hpp"
#include "pegasus/rng.hpp"
#include "pegasus/summary.hpp"
#include "pegasus/weights.hpp"

namespace pegasus {

struct EngineConfig {
    double budget_bits = 0.0;
    double alpha = 1.25;
    double beta = 0.1;
    std::size_t max_iterations = 20;
    std::uint64_t seed = 0;
    std::size_t group_cap = 500;
    std::size_t shingle_rounds = 10;
    double theta_init = 0.5;
    bool audit = false;

    void validate() const {
        if (budget_bits <= 0.0) throw parameter_error("budget must be positive");
        if (alpha < 1.0) throw parameter_error("alpha must be >= 1");
        if (beta <= 0.0 || beta >= 1.0) throw parameter_error("beta must be in (0,1)");
        if (max_iterations == 0) throw parameter_error("max_iterations must be positive");
        if (group_cap == 0 || shingle_rounds == 0)
            throw parameter_error("group_cap and shingle_rounds must be positive");
    }
};

struct ThresholdState {
    double theta = 0.5;
    std::vector<double> rejected;  // the list L; cleared at iteration boundaries
};

// Selection update: theta <- floor(beta*|L|)-th largest entry of L when that
// index is >= 1, else unchanged. L is cleared either way.
inline void update_threshold(ThresholdState& state, double beta) {
    std::size_t k = static_cast<std::size_t>(std::floor(beta * static_cast<double>(state.rejected.size())));
    if (k >= 1) {
        std::nth_element(state.rejected.begin(), state.rejected.begin() + (k - 1),
                         state.rejected.end(), std::greater<double>());
        state.theta = state.rejected[k - 1];
    }
    state.rejected.clear();
}

struct MergeRecord {
    node_t a, b;
    double rel_delta;
    double theta_in_force;
};

struct RunReport {
    std::size_t iterations_used = 0;
    double final_size_bits = 0.0;
    double budget_bits = 0.0;
    std::size_t merges = 0;
    std::size_t sparsified_superedges = 0;
    std::vector<double> theta_trace;
    double wall_ms = 0.0;
    // audit-only payload
    std::vector<MergeRecord> merge_log;
    std::vector<std::size_t> rejected_list_sizes;
};

// Min-hash shingle of a supernode: min over members' closed neighborhoods of
// the node's rank under the permutation.
inline std::uint32_t shingle(const SummaryGraph& s, const Graph& g,
                             const std::vector<std::uint32_t>& rank, node_t a) {
    detail::check_alive(s, a);
    std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
    for (node_t u : s.members(a)) {
        best = std::min(best, rank[u]);
        for (node_t v : g.neighbors(u)) best = std::min(best, rank[v]);
    }
    return best;
}

// Groups of live supernodes sharing a shingle. Oversized groups are split by
// re-shingling with fresh permutations (up to shingle_rounds) and finally by
// seeded random chunking; singleton groups are discarded.
inline std::vector<std::vector<node_t>> generate_candidates(const SummaryGraph& s, const Graph& g,
                                                            std::uint64_t seed_for_iteration,
                                                            std::size_t group_cap = 500,
                                                            std::size_t shingle_rounds = 10) {
    std::vector<std::vector<node_t>> done;
    std::vector<std::vector<node_t>> pending{s.live_supernodes()};
    for (std::size_t round = 0; round < shingle_rounds && !pending.empty(); ++round) {
        auto rng = make_rng(seed_for_iteration, "shingle", round);
        auto rank = random_permutation(g.node_count(), rng);
        std::vector<std::vector<node_t>> still_big;
        for (auto& grp : pending) {
            std::vector<std::pair<std::uint32_t, node_t>> keyed;
            keyed.reserve(grp.size());
            for (node_t a : grp) keyed.emplace_back(shingle(s, g, rank, a), a);
            std::sort(keyed.begin(), keyed.end());
            for (std::size_t i = 0; i < keyed.size();) {
                std::size_t j = i;
                while (j < keyed.size() && keyed[j].first == keyed[i].first) ++j;
                if (j - i >= 2) {
                    std::vector<node_t> sub;
                    sub.reserve(j - i);
                    for (std::size_t t = i; t < j; ++t) sub.push_back(keyed[t].second);
                    if (sub.size() > group_cap)
                        still_big.push_back(std::move(sub));
                    else
                        done.push_back(std::move(sub));
                }
                i = j;
            }
        }
        pending = std::move(still_big);
    }
    // Groups still above the cap after all re-shingle rounds: shuffle and chunk.
    auto chunk_rng = make_rng(seed_for_iteration, "chunk");
    for (auto& grp : pending) {
        std::shuffle(grp.begin(), grp.end(), chunk_rng);
        for (std::size_t i = 0; i < grp.size(); i += group_cap) {
            std::size_t j = std::min(i + group_cap, grp.size());
            if (j - i >= 2)
                done.emplace_back(grp.begin() + static_cast<std::ptrdiff_t>(i),
                                  grp.begin() + static_cast<std::ptrdiff_t>(j));
        }
    }
    // Deterministic order across the iteration.
    for (auto& grp : done) std::sort(grp.begin(), grp.end());
    std::sort(done.begin(), done.end());
    return done;
}

struct MergeEval {
    double delta = 0.0;
    double rel_delta = 0.0;
    // Superedges chosen for the merged supernode, as pre-merge neighbor ids;
    // min(a,b) denotes the self-loop on the union.
    std::vector<node_t> planned_superedges;
    // RE bookkeeping for incremental total-cost maintenance.
    double old_re_contribution = 0.0;
    double new_re_contribution = 0.0;
};

namespace detail {

struct SupernodeCostParts {
    double cost = 0.0;
    double re = 0.0;  // RE mass of all pairs incident to this supernode
};

// Cost and RE of all pairs incident to a, given a's edge buckets.
inline SupernodeCostParts cost_parts(const WeightModel& m, const SummaryGraph& s, node_t a,
                                     const std::vector<NeighborBucket>& buckets) {
    double log2s = std::log2(static_cast<double>(s.supernode_count()));
    double log2v = std::log2(static_cast<double>(s.node_count()));
    double sum_a = s.weight_sums(m, a).first;
    double z = m.z();
    SupernodeCostParts parts;
    for (const auto& b : buckets) {
        bool present = s.has_superedge(a, b.other);
        double total = b.other == a ? self_total_mass(m, s, a)
                                    : sum_a * s.weight_sums(m, b.other).first / z;
        PairStats st{b.present_mass, total, b.edges};
        parts.cost += pair_cost_logs(st, present, log2s, log2v);
        parts.re += present ? (total - b.present_mass) : b.present_mass;
    }
    for (node_t x : s.superedge_neighbors(a)) {
        // buckets are sorted by id; skip pairs already counted above
        auto it = std::lower_bound(buckets.begin(), buckets.end(), x,
                                   [](const NeighborBucket& l, node_t r) { return l.other < r; });
        if (it != buckets.end() && it->other == x) continue;
        double total = x == a ? self_total_mass(m, s, a)
                              : sum_a * s.weight_sums(m, x).first / z;
        parts.cost += pair_cost_logs(PairStats{0.0, total, 0}, true, log2s, log2v);
        parts.re += total;
    }
    return parts;
}

}  // namespace detail

namespace detail {

// One supernode's buckets and incident cost/RE, reusable across evaluations
// as long as no merge intervenes.
struct SideEval {
    std::vector<NeighborBucket> buckets;
    SupernodeCostParts parts;
};

inline SideEval evaluate_side(const Graph& g, const WeightModel& m, const SummaryGraph& s,
                              node_t a) {
    SideEval se;
    se.buckets = edge_buckets(g, m, s, a);
    se.parts = cost_parts(m, s, a, se.buckets);
    return se;
}

inline MergeEval evaluate_merge_sides(const WeightModel& m, const SummaryGraph& s, node_t a,
                                      node_t b, const SideEval& side_a, const SideEval& side_b) {
    const auto& buckets_a = side_a.buckets;
    const auto& buckets_b = side_b.buckets;
    const auto& parts_a = side_a.parts;
    const auto& parts_b = side_b.parts;

    // The pair {a,b} is counted in both supernode costs; remove one copy.
    std::size_t S = s.supernode_count();
    node_t V = s.node_count();
    double cost_ab = 0.0, re_ab = 0.0;
    {
        PairStats st{0.0, detail::cross_total_mass(m, s, a, b), 0};
        for (const auto& bk : buckets_a)
            if (bk.other == b) {
                st.present_mass = bk.present_mass;
                st.edge_count = bk.edges;
            }
        bool present = s.has_superedge(a, b);
        if (present || st.edge_count > 0) {
            cost_ab = pair_cost(st, present, S, V);
            re_ab = present ? (st.total_mass - st.present_mass) : st.present_mass;
        }
    }
    double denom = parts_a.cost + parts_b.cost - cost_ab;

    MergeEval ev;
    ev.old_re_contribution = parts_a.re + parts_b.re - re_ab;

    // Post-merge buckets: map a and b onto the union.
    node_t union_id = std::min(a, b);
    auto [sum_a, sq_a] = s.weight_sums(m, a);
    auto [sum_b, sq_b] = s.weight_sums(m, b);
    double sum_u = sum_a + sum_b, sq_u = sq_a + sq_b;

    // Dense scratch keyed by supernode id; every edge bucket carries at least
    // one edge, so edges == 0 marks first touch.
    struct Slot {
        double mass = 0.0;
        std::size_t edges = 0;
    };
    thread_local std::vector<Slot> fold_acc;
    thread_local std::vector<node_t> fold_touched;
    if (fold_acc.size() < s.node_count()) fold_acc.assign(s.node_count(), Slot{});
    fold_touched.clear();
    auto fold = [&](const std::vector<detail::NeighborBucket>& src, node_t self, node_t sibling,
                    bool take_cross) {
        for (const auto& bk : src) {
            node_t other = bk.other;
            if (other == self)
                other = union_id;  // within-supernode edges
            else if (other == sibling) {
                if (!take_cross) continue;  // cross edges counted from a's side only
                other = union_id;
            }
            if (fold_acc[other].edges == 0) fold_touched.push_back(other);
            fold_acc[other].mass += bk.present_mass;
            fold_acc[other].edges += bk.edges;
        }
    };
    fold(buckets_a, a, b, true);
    fold(buckets_b, b, a, false);

    std::vector<detail::NeighborBucket> post;
    post.reserve(fold_touched.size());
    for (node_t x : fold_touched) {
        post.push_back(detail::NeighborBucket{x, fold_acc[x].mass, fold_acc[x].edges});
        fold_acc[x] = Slot{};
    }
    std::sort(post.begin(), post.end(),
              [](const auto& l, const auto& r) { return l.other < r.other; });

    std::size_t S_post = S - 1;
    double log2sp = std::log2(static_cast<double>(S_post));
    double log2v = std::log2(static_cast<double>(V));
    std::size_t group_members = s.members(a).size() + s.members(b).size();
    double post_cost = 0.0;
    for (const auto& bk : post) {
        double total;
        if (bk.other == union_id) {
            if (group_members < 2) continue;
            total = (sum_u * sum_u - sq_u) / (2.0 * m.z());
        } else {
            total = sum_u * s.weight_sums(m, bk.other).first / m.z();
        }
        PairStats st{bk.present_mass, total, bk.edges};
        double with = detail::pair_cost_logs(st, true, log2sp, log2v);
        double without = detail::pair_cost_logs(st, false, log2sp, log2v);
        bool flag = with < without;  // ties resolve to absent (sparser)
        post_cost += flag ? with : without;
        ev.new_re_contribution += flag ? (total - bk.present_mass) : bk.present_mass;
        if (flag) ev.planned_superedges.push_back(bk.other);
    }

    ev.delta = denom - post_cost;
    ev.rel_delta = denom > 0.0 ? ev.delta / denom : 0.0;
    return ev;
}

}  // namespace detail

// Cost reduction of merging supernodes a and b, with the optimal post-merge
// incident superedge set (non-incident superedges held fixed). Runs in time
// proportional to the member degrees of a and b.
inline MergeEval evaluate_merge(const Graph& g, const WeightModel& m, const SummaryGraph& s,
                                node_t a, node_t b) {
    if (a == b) throw parameter_error("evaluate_merge: a and b must differ");
    detail::check_alive(s, a);
    detail::check_alive(s, b);
    return detail::evaluate_merge_sides(m, s, a, b, detail::evaluate_side(g, m, s, a),
                                        detail::evaluate_side(g, m, s, b));
}

namespace detail {

// Applies an evaluated merge; returns the union id.
inline node_t apply_merge(SummaryGraph& s, node_t a, node_t b, const MergeEval& ev) {
    node_t u = s.merge_supernodes(a, b);
    for (node_t x : ev.planned_superedges) s.add_superedge(u, x);
    return u;
}

}  // namespace detail

// One greedy pass over a candidate group (Alg. 2 semantics): sample |C| pairs
// per round, merge the best if its relative reduction clears theta, otherwise
// record the rejection; stop after log2(|C|) consecutive failures.
inline void merge_and_add(const Graph& g, const WeightModel& m, SummaryGraph& s,
                          std::vector<node_t>& group, ThresholdState& state, std::mt19937_64& rng,
                          RunReport* report = nullptr, double* re_total = nullptr,
                          bool audit = false) {
    std::size_t fails = 0;
    while (group.size() > 1 &&
           static_cast<double>(fails) <= std::log2(static_cast<double>(group.size()))) {
        std::size_t samples = group.size();
        std::uniform_int_distribution<std::size_t> pick(0, group.size() - 1);
        node_t best_a = 0, best_b = 0;
        bool have_best = false;
        MergeEval best_ev;
        // No merge happens within a round, so per-supernode buckets and cost
        // parts can be shared across the round's sampled pairs.
        std::unordered_map<node_t, detail::SideEval> sides;
        auto side = [&](node_t v) -> const detail::SideEval& {
            auto it = sides.find(v);
            if (it == sides.end()) it = sides.emplace(v, detail::evaluate_side(g, m, s, v)).first;
            return it->second;
        };
        for (std::size_t k = 0; k < samples; ++k) {
            std::size_t i = pick(rng), j = pick(rng);
            while (i == j) j = pick(rng);
            node_t x = std::min(group[i], group[j]);
            node_t y = std::max(group[i], group[j]);
            MergeEval ev = detail::evaluate_merge_sides(m, s, x, y, side(x), side(y));
            if (!have_best || ev.rel_delta > best_ev.rel_delta ||
                (ev.rel_delta == best_ev.rel_delta &&
                 std::make_pair(x, y) < std::make_pair(best_a, best_b))) {
                have_best = true;
                best_a = x;
                best_b = y;
                best_ev = std::move(ev);
            }
        }
        if (best_ev.rel_delta >= state.theta) {
            node_t u = detail::apply_merge(s, best_a, best_b, best_ev);
            if (re_total) *re_total += best_ev.new_re_contribution - best_ev.old_re_contribution;
            std::erase(group, best_a);
            std::erase(group, best_b);
            group.push_back(u);
            fails = 0;
            if (report) {
                ++report->merges;
                if (audit) report->merge_log.push_back({best_a, best_b, best_ev.rel_delta, state.theta});
            }
        } else {
            state.rejected.push_back(best_ev.rel_delta);
            ++fails;
        }
    }
}

// Drops superedges in increasing order of their current pair cost until the
// bit budget is met. Membership is never altered; ranks are computed once
// (drops do not change |S|, and distinct superedges' error terms are
// independent). Returns the number of superedges dropped.
inline std::size_t sparsify(const Graph& g, const WeightModel& m, SummaryGraph& s,
                            double budget_bits, double* re_total = nullptr) {
    if (summary_size_bits(s) <= budget_bits) return 0;
    struct Ranked {
        double cost;
        node_t a, b;
        double present, total;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(s.superedge_count());
    for (auto [a, b] : s.superedges()) {
        PairStats st = pair_stats(g, m, s, a, b);
        ranked.push_back({pair_cost(st, true, s.supernode_count(), s.node_count()), a, b,
                          st.present_mass, st.total_mass});
    }
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& l, const Ranked& r) {
        return std::tie(l.cost, l.a, l.b) < std::tie(r.cost, r.a, r.b);
    });
    std::size_t dropped = 0;
    for (const auto& rk : ranked) {
        if (summary_size_bits(s) <= budget_bits) break;
        s.remove_superedge(rk.a, rk.b);
        if (re_total) *re_total += rk.present - (rk.total - rk.present);
        ++dropped;
    }
    double residual = summary_size_bits(s);
    if (residual > budget_bits)
        throw budget_infeasible_error(
            "budget infeasible: membership alone needs " + std::to_string(residual) +
                " bits against a budget of " + std::to_string(budget_bits),
            residual, budget_bits);
    return dropped;
}

struct SummarizeResult {
    SummaryGraph summary;
    RunReport report;
    // Incrementally maintained personalized error (unordered pairs).
    double re_total = 0.0;
};

// The full pipeline: singleton initialization, then iterations of candidate
// generation + greedy merging with adaptive thresholding, then further
// sparsification if the budget is still unmet.
inline SummarizeResult summarize(const Graph& g, const TargetSet& t, const EngineConfig& cfg) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    WeightModel m = build_weight_model(g, t, cfg.alpha);
    SummarizeResult res;
    res.summary = initial_summary(g);
    res.report.budget_bits = cfg.budget_bits;
    ThresholdState state{cfg.theta_init, {}};
    SummaryGraph& s = res.summary;

    std::size_t iter = 1;
    for (; iter <= cfg.max_iterations && summary_size_bits(s) > cfg.budget_bits; ++iter) {
        auto groups = generate_candidates(s, g, substream_seed(cfg.seed, "iteration", iter),
                                          cfg.group_cap, cfg.shingle_rounds);
        auto rng = make_rng(cfg.seed, "pairs", iter);
        for (auto& grp : groups)
            merge_and_add(g, m, s, grp, state, rng, &res.report, &res.re_total, cfg.audit);
        if (cfg.audit) res.report.rejected_list_sizes.push_back(state.rejected.size());
        update_threshold(state, cfg.beta);
        res.report.theta_trace.push_back(state.theta);
        res.report.iterations_used = iter;
    }
    if (summary_size_bits(s) > cfg.budget_bits)
        res.report.sparsified_superedges = sparsify(g, m, s, cfg.budget_bits, &res.re_total);
    res.report.final_size_bits = summary_size_bits(s);
    res.report.wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    return res;
}

}  // namespace pegasus
