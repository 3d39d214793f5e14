#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "helpers.hpp"
#include "pegasus/graph.hpp"

using namespace pegasus;

TEST_CASE("load_edge_list parses the five-node toy graph") {
    test::TempFile f("1 3\n1 4\n2 3\n2 4\n3 5\n4 5\n", "toy_load.tsv");
    auto r = load_edge_list(f.path, /*preprocess=*/true);
    REQUIRE(r.graph.node_count() == 5);
    REQUIRE(r.graph.edge_count() == 6);
    REQUIRE(r.original_ids == std::vector<std::uint64_t>{1, 2, 3, 4, 5});
    // a-c, a-d, b-c, b-d, c-e, d-e under the dense remap
    CHECK(r.graph.has_edge(0, 2));
    CHECK(r.graph.has_edge(0, 3));
    CHECK(r.graph.has_edge(1, 2));
    CHECK(r.graph.has_edge(1, 3));
    CHECK(r.graph.has_edge(2, 4));
    CHECK(r.graph.has_edge(3, 4));
    CHECK_FALSE(r.graph.has_edge(0, 1));
}

TEST_CASE("load_edge_list drops self-loops under preprocessing") {
    test::TempFile f("7 7\n7 8\n", "selfloop.tsv");
    auto r = load_edge_list(f.path, true);
    REQUIRE(r.graph.node_count() == 2);
    REQUIRE(r.graph.edge_count() == 1);
}

TEST_CASE("load_edge_list keeps one component, tie toward smallest original id") {
    test::TempFile f("0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n0 1\n", "twotri.tsv");
    auto r = load_edge_list(f.path, true);
    REQUIRE(r.graph.node_count() == 3);
    REQUIRE(r.graph.edge_count() == 3);
    REQUIRE(r.original_ids == std::vector<std::uint64_t>{0, 1, 2});
}

TEST_CASE("load_edge_list reports malformed lines with numbers") {
    test::TempFile f("0 1\nbogus line\n", "badline.tsv");
    CHECK_THROWS_WITH(load_edge_list(f.path, true), Catch::Matchers::ContainsSubstring(":2:"));
    test::TempFile g("# only comments\n\n", "empty.tsv");
    CHECK_THROWS_AS(load_edge_list(g.path, true), empty_graph_error);
}

TEST_CASE("load_edge_list accepts comments, blanks, and CRLF") {
    test::TempFile f("# header\r\n\r\n0 1\r\n1 2\r\n", "crlf.tsv");
    auto r = load_edge_list(f.path, false);
    CHECK(r.graph.node_count() == 3);
    CHECK(r.graph.edge_count() == 2);
}

TEST_CASE("adjacency is symmetric and sorted on load") {
    auto g = test::random_connected_graph(60, 0.05, 11);
    std::size_t half_sum = 0;
    for (node_t u = 0; u < g.node_count(); ++u) {
        auto nb = g.neighbors(u);
        CHECK(std::is_sorted(nb.begin(), nb.end()));
        half_sum += nb.size();
        for (node_t v : nb) {
            CHECK(v != u);
            CHECK(g.has_edge(v, u));
        }
    }
    CHECK(half_sum == 2 * g.edge_count());
}

TEST_CASE("save/load round trip is the identity") {
    auto g = test::random_connected_graph(40, 0.1, 3);
    auto path = (std::filesystem::temp_directory_path() / "roundtrip.tsv").string();
    save_edge_list(g, path);
    auto r = load_edge_list(path, false);
    CHECK(r.graph.edges() == g.edges());
    std::remove(path.c_str());
}

TEST_CASE("graph_size_bits follows the two-log-V-per-edge rule") {
    CHECK_THAT(graph_size_bits(test::toy_graph()),
               Catch::Matchers::WithinRel(12.0 * std::log2(5.0), 1e-12));
    CHECK(graph_size_bits(Graph::from_edges(3, {})) == 0.0);
    CHECK(graph_size_bits(Graph::from_edges(2, {{0, 1}})) == 2.0);
}

TEST_CASE("generate_ba first attachment and determinism") {
    auto g = generate_ba(4, 3, 0);
    REQUIRE(g.edge_count() == 3);
    CHECK(g.has_edge(3, 0));
    CHECK(g.has_edge(3, 1));
    CHECK(g.has_edge(3, 2));

    auto a = generate_ba(1000, 5, 7);
    auto b = generate_ba(1000, 5, 7);
    CHECK(a.edges() == b.edges());
    CHECK(a.edge_count() == 5 * (1000 - 5));
    CHECK(a.connected());
    CHECK_THROWS_AS(generate_ba(3, 3, 0), parameter_error);
}

TEST_CASE("generate_ba degree sequence is heavy-tailed") {
    int heavy = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto g = generate_ba(1000, 5, seed);
        std::size_t maxdeg = 0;
        for (node_t u = 0; u < g.node_count(); ++u) maxdeg = std::max(maxdeg, g.degree(u));
        if (maxdeg > 50) ++heavy;
    }
    CHECK(heavy >= 45);
}

TEST_CASE("generate_ws ring lattice and rewiring") {
    auto ring = generate_ws(20, 4, 0.0, 1);
    REQUIRE(ring.edge_count() == 40);
    for (node_t u = 0; u < 20; ++u) CHECK(ring.degree(u) == 4);

    auto a = generate_ws(10, 4, 1.0, 3);
    auto b = generate_ws(10, 4, 1.0, 3);
    CHECK(a.edges() == b.edges());
    CHECK(a.edge_count() == 20);

    CHECK_THROWS_AS(generate_ws(10, 3, 0.5, 0), parameter_error);
    CHECK_THROWS_AS(generate_ws(10, 4, 1.5, 0), parameter_error);
}

TEST_CASE("rewiring shrinks the effective diameter") {
    auto lattice = generate_ws(1000, 20, 0.0, 5);
    auto rewired = generate_ws(1000, 20, 0.1, 5);
    REQUIRE(rewired.connected());
    CHECK(effective_diameter(rewired, 0.9) < effective_diameter(lattice, 0.9));
}

TEST_CASE("effective_diameter on known shapes") {
    auto path5 = Graph::from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    CHECK(effective_diameter(path5, 1.0) == 4.0);
    CHECK(effective_diameter(test::toy_graph(), 0.9) == 2.0);

    std::vector<std::pair<node_t, node_t>> k10;
    for (node_t u = 0; u < 10; ++u)
        for (node_t v = u + 1; v < 10; ++v) k10.emplace_back(u, v);
    auto complete = Graph::from_edges(10, std::move(k10));
    CHECK(effective_diameter(complete, 0.5) == 1.0);
    CHECK(effective_diameter(complete, 1.0) == 1.0);

    auto disconnected = Graph::from_edges(4, {{0, 1}, {2, 3}});
    CHECK_THROWS_AS(effective_diameter(disconnected, 0.9), disconnected_graph_error);
    CHECK_THROWS_AS(effective_diameter(path5, 0.0), parameter_error);
}
