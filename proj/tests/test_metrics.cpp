#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "pegasus/engine.hpp"
#include "pegasus/metrics.hpp"

using namespace pegasus;

TEST_CASE("smape basics") {
    CHECK(smape({1, 2, 3}, {1, 2, 3}).sum == 0.0);
    CHECK(smape({1, 0}, {0, 1}).sum == 2.0);
    auto r = smape({1, 1}, {1, 3});
    CHECK_THAT(r.sum, Catch::Matchers::WithinRel(0.5, 1e-12));
    CHECK_THAT(r.mean, Catch::Matchers::WithinRel(0.25, 1e-12));
    CHECK(smape({0, 0}, {0, 0}).sum == 0.0);
    CHECK_THROWS_AS(smape({1}, {1, 2}), parameter_error);
}

TEST_CASE("smape is symmetric and bounded by the length") {
    auto rng = make_rng(3, "smape");
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(20), y(20);
        for (int i = 0; i < 20; ++i) {
            x[i] = val(rng);
            y[i] = val(rng);
        }
        CHECK(smape(x, y).sum == smape(y, x).sum);
        CHECK(smape(x, y).sum <= 20.0);
    }
}

TEST_CASE("spearman rank correlation") {
    CHECK_THAT(spearman({1, 5, 2, 9}, {1, 5, 2, 9}), Catch::Matchers::WithinRel(1.0, 1e-12));
    CHECK_THAT(spearman({1, 2, 3}, {3, 2, 1}), Catch::Matchers::WithinRel(-1.0, 1e-12));
    CHECK_THAT(spearman({1, 2, 2, 4}, {1, 3, 2, 4}),
               Catch::Matchers::WithinAbs(4.5 / std::sqrt(4.5 * 5.0), 1e-12));
    CHECK_THROWS_AS(spearman({1, 1, 1}, {1, 2, 3}), parameter_error);
    CHECK_THROWS_AS(spearman({1}, {1}), parameter_error);
}

TEST_CASE("spearman is invariant under increasing transforms") {
    std::vector<double> x{0.3, 1.7, 0.1, 5.5, 2.2};
    std::vector<double> y{9.0, 3.0, 4.0, 1.0, 7.0};
    double base = spearman(x, y);
    std::vector<double> tx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) tx[i] = std::exp(3.0 * x[i]) + 1.0;
    CHECK_THAT(spearman(tx, y), Catch::Matchers::WithinAbs(base, 1e-12));
}

TEST_CASE("compression rate") {
    auto g = test::toy_graph();
    CHECK_THAT(compression_rate(test::exact_toy_summary(), g),
               Catch::Matchers::WithinRel(9.0 * std::log2(3.0) / (12.0 * std::log2(5.0)), 1e-12));
    CHECK(compression_rate(initial_summary(g), g) > 1.0);
    auto trivial = SummaryGraph::from_parts({0, 0, 0, 0, 0}, {});
    CHECK(compression_rate(trivial, g) == 0.0);
    CHECK_THROWS_AS(compression_rate(trivial, Graph::from_edges(3, {})), parameter_error);
}

TEST_CASE("weighted summary size metric") {
    CHECK_THAT(weighted_summary_size_bits(3, 2, 5, 1),
               Catch::Matchers::WithinRel(9.0 * std::log2(3.0), 1e-12));
    CHECK_THAT(weighted_summary_size_bits(4, 3, 10, 8), Catch::Matchers::WithinRel(41.0, 1e-12));
    CHECK_THAT(weighted_summary_size_bits(1, 6, 10, 4),
               Catch::Matchers::WithinRel(12.0, 1e-12));
    CHECK_THROWS_AS(weighted_summary_size_bits(0, 1, 1, 1), parameter_error);
}

TEST_CASE("relative personalized error") {
    auto g = test::random_connected_graph(50, 0.06, 12);
    EngineConfig cfg;
    cfg.budget_bits = 0.5 * graph_size_bits(g);
    cfg.seed = 12;
    auto baseline = summarize(g, TargetSet::all(50), cfg).summary;
    auto m = build_weight_model(g, TargetSet::of({0}, 50), 1.25);
    if (personalized_error(g, m, baseline) > 0.0) {
        CHECK_THAT(relative_personalized_error(g, baseline, 0, 1.25, baseline),
                   Catch::Matchers::WithinRel(1.0, 1e-12));
        CHECK(relative_personalized_error(g, initial_summary(g), 0, 1.25, baseline) == 0.0);
    }
    // zero baseline error: not-applicable marker when the numerator is 0 too
    double na = relative_personalized_error(g, initial_summary(g), 0, 1.25, initial_summary(g));
    CHECK(std::isnan(na));
}

TEST_CASE("query accuracy experiment on an exact summary") {
    auto g = test::random_connected_graph(40, 0.08, 19);
    auto s0 = initial_summary(g);
    std::vector<std::pair<std::string, const SummaryGraph*>> summaries{{"exact", &s0}};
    auto table = run_query_accuracy_experiment(
        g, summaries, {1, 7, 30}, {QueryKind::rwr, QueryKind::hop, QueryKind::php});
    REQUIRE(table.size() == 3);
    for (const auto& row : table) {
        CHECK(row.query_count == 3);
        CHECK(row.failed_queries == 0);
        CHECK(row.smape_mean < 1e-6);
        CHECK_THAT(row.spearman, Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
    CHECK(run_query_accuracy_experiment(g, summaries, {1}, {}).empty());
}
