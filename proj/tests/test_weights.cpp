#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "pegasus/weights.hpp"

using namespace pegasus;

namespace {

// Quadratic brute-force hop distances for the oracle checks.
std::vector<int> oracle_distances(const Graph& g, const std::vector<node_t>& sources) {
    std::vector<int> d(g.node_count(), -1);
    std::vector<node_t> frontier = sources;
    for (node_t s : sources) d[s] = 0;
    int level = 0;
    while (!frontier.empty()) {
        ++level;
        std::vector<node_t> next;
        for (node_t u : frontier)
            for (node_t v : g.neighbors(u))
                if (d[v] < 0) {
                    d[v] = level;
                    next.push_back(v);
                }
        frontier = std::move(next);
    }
    return d;
}

}  // namespace

TEST_CASE("toy weight model, single target, alpha 2") {
    auto g = test::toy_graph();
    auto m = build_weight_model(g, TargetSet::of({0}, 5), 2.0);
    std::vector<node_t> want_d{0, 2, 1, 1, 2};
    std::vector<double> want_f{1.0, 0.25, 0.5, 0.5, 0.25};
    for (node_t u = 0; u < 5; ++u) {
        CHECK(m.distance(u) == want_d[u]);
        CHECK_THAT(m.factor(u), Catch::Matchers::WithinRel(want_f[u], 1e-12));
    }
    CHECK_THAT(m.z(), Catch::Matchers::WithinRel(0.23125, 1e-12));
    CHECK_THAT(m.pair_weight(0, 2), Catch::Matchers::WithinRel(0.5 / 0.23125, 1e-12));
    CHECK_THAT(m.pair_weight(1, 4), Catch::Matchers::WithinRel(0.0625 / 0.23125, 1e-12));
}

TEST_CASE("alpha 1 collapses to uniform weights") {
    auto g = test::random_connected_graph(30, 0.1, 2);
    auto m = build_weight_model(g, TargetSet::of({5, 7}, 30), 1.0);
    for (node_t u = 0; u < 30; ++u) CHECK(m.factor(u) == 1.0);
    CHECK_THAT(m.z(), Catch::Matchers::WithinRel(1.0, 1e-12));
    CHECK_THAT(m.pair_weight(3, 9), Catch::Matchers::WithinRel(1.0, 1e-12));
}

TEST_CASE("pair weight symmetry and self-pair rejection") {
    auto g = test::toy_graph();
    auto m = build_weight_model(g, TargetSet::of({0}, 5), 2.0);
    auto rng = make_rng(99, "pairs");
    std::uniform_int_distribution<node_t> pick(0, 4);
    for (int i = 0; i < 1000; ++i) {
        node_t u = pick(rng), v = pick(rng);
        if (u == v) continue;
        CHECK(m.pair_weight(u, v) == m.pair_weight(v, u));
    }
    CHECK_THROWS_AS(m.pair_weight(2, 2), parameter_error);
}

TEST_CASE("mean pair weight is one") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        auto g = test::random_connected_graph(200, 0.02, seed);
        auto t = TargetSet::sample(200, 5, seed);
        auto m = build_weight_model(g, t, 1.5);
        double sum = 0.0;
        std::size_t pairs = 0;
        for (node_t u = 0; u < 200; ++u)
            for (node_t v = u + 1; v < 200; ++v) {
                sum += m.pair_weight(u, v);
                ++pairs;
            }
        CHECK_THAT(sum / static_cast<double>(pairs), Catch::Matchers::WithinRel(1.0, 1e-9));
    }
}

TEST_CASE("weights decay monotonically with distance from the targets") {
    auto g = test::random_connected_graph(80, 0.05, 4);
    auto m = build_weight_model(g, TargetSet::of({0}, 80), 1.25);
    auto rng = make_rng(4, "pairs");
    std::uniform_int_distribution<node_t> pick(0, 79);
    for (int i = 0; i < 5000; ++i) {
        node_t u = pick(rng), v = pick(rng), x = pick(rng), y = pick(rng);
        if (u == v || x == y) continue;
        if (m.distance(u) + m.distance(v) < m.distance(x) + m.distance(y))
            CHECK(m.pair_weight(u, v) > m.pair_weight(x, y));
    }
}

TEST_CASE("distances match the brute-force oracle, and step by at most one per edge") {
    for (std::uint64_t seed : {10ULL, 11ULL, 12ULL}) {
        auto g = test::random_connected_graph(120, 0.03, seed);
        auto t = TargetSet::sample(120, 4, seed);
        auto m = build_weight_model(g, t, 2.0);
        auto oracle = oracle_distances(g, t.nodes);
        for (node_t u = 0; u < 120; ++u) {
            REQUIRE(static_cast<int>(m.distance(u)) == oracle[u]);
            for (node_t v : g.neighbors(u))
                CHECK(std::abs(static_cast<int>(m.distance(u)) - static_cast<int>(m.distance(v))) <= 1);
        }
        for (node_t s : t.nodes) CHECK(m.distance(s) == 0);
    }
}

TEST_CASE("target set validation") {
    CHECK_THROWS_AS(TargetSet::of({}, 5), parameter_error);
    CHECK_THROWS_AS(TargetSet::of({5}, 5), parameter_error);
    CHECK(TargetSet::of({3, 1, 3}, 5).nodes == std::vector<node_t>{1, 3});
    CHECK(TargetSet::all(4).nodes == std::vector<node_t>{0, 1, 2, 3});
    auto s1 = TargetSet::sample(100, 10, 42);
    auto s2 = TargetSet::sample(100, 10, 42);
    CHECK(s1.nodes == s2.nodes);
    CHECK(s1.nodes.size() == 10);

    test::TempFile f("# targets\n3\n1\n", "targets.txt");
    CHECK(TargetSet::from_file(f.path, 5).nodes == std::vector<node_t>{1, 3});

    auto g = test::toy_graph();
    CHECK_THROWS_AS(build_weight_model(g, TargetSet::of({0}, 5), 0.5), parameter_error);
}

TEST_CASE("unreachable nodes take zero factor when preprocessing is skipped") {
    auto g = Graph::from_edges(4, {{0, 1}, {2, 3}});
    auto m = build_weight_model(g, TargetSet::of({0}, 4), 2.0);
    CHECK(m.has_unreachable());
    CHECK(m.factor(2) == 0.0);
    CHECK(m.factor(3) == 0.0);
    CHECK(m.factor(1) == 0.5);
}
