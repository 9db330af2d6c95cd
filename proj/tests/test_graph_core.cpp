#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "graphnls/metric_graph.hpp"

using namespace graphnls;

TEST_CASE("parse minimal graph with half-line") {
    MetricGraph g = parse_graph("vertex a\nvertex b\nedge a b 1\nhalfline b\n");
    CHECK(g.num_vertices() == 2);
    CHECK(g.num_edges() == 2);
    CHECK(g.degree(g.vertex_index("b")) == 2);
    CHECK(g.has_halfline());
    CHECK(std::isinf(g.total_length()));
}

TEST_CASE("parse rejects dangling vertex") {
    CHECK_THROWS_WITH_AS(parse_graph("vertex a\nedge a c 1\n"),
                         doctest::Contains("dangling vertex"), graph_error);
}

TEST_CASE("parse rejects disconnected graphs") {
    CHECK_THROWS_WITH_AS(
        parse_graph("vertex a\nvertex b\nvertex c\nvertex d\nedge a b 1\nedge c d 1\n"),
        doctest::Contains("disconnected"), graph_error);
}

TEST_CASE("parse rejects nonpositive lengths and empty edge sets") {
    CHECK_THROWS_WITH_AS(parse_graph("vertex a\nvertex b\nedge a b 0\n"),
                         doctest::Contains("nonpositive"), graph_error);
    CHECK_THROWS_WITH_AS(parse_graph("vertex a\n"), doctest::Contains("empty edge set"),
                         graph_error);
}

TEST_CASE("comments and default exponent") {
    MetricGraph g = parse_graph("# a line graph\np 8\nvertex a\nvertex b\nedge a b 2 # len\n");
    REQUIRE(g.default_p.has_value());
    CHECK(*g.default_p == doctest::Approx(8.0));
    CHECK(g.total_length() == doctest::Approx(2.0));
}

TEST_CASE("serialize then parse reproduces the graph") {
    MetricGraph g = catalog("tadpole", {{"head", 3.5}});
    g.default_p = 7.0;
    MetricGraph h = parse_graph(serialize_graph(g));
    REQUIRE(h.num_edges() == g.num_edges());
    CHECK(h.num_vertices() == g.num_vertices());
    CHECK(h.truncation_length == doctest::Approx(g.truncation_length));
    for (int e = 0; e < g.num_edges(); ++e) {
        CHECK(h.edges[e].kind == g.edges[e].kind);
        if (!g.edges[e].is_halfline())
            CHECK(h.edges[e].length == doctest::Approx(g.edges[e].length));
    }
}

TEST_CASE("star catalog") {
    MetricGraph g = catalog("star_halflines", {{"arms", 3}});
    CHECK(g.num_vertices() == 1);
    CHECK(g.num_edges() == 3);
    CHECK(g.degree(0) == 3);
    CHECK(std::isinf(g.total_length()));
}

TEST_CASE("segment catalog") {
    MetricGraph g = catalog("segment", {{"length", 2.0}});
    CHECK(g.total_length() == doctest::Approx(2.0));
    CHECK_FALSE(g.has_halfline());
}

TEST_CASE("bethe tree shape") {
    MetricGraph g = catalog("bethe_tree", {{"degree", 3}, {"depth", 2}, {"length", 1}});
    // 1 + 2 + 4 edges below a degree-1 root
    CHECK(g.num_edges() == 7);
    CHECK(g.total_length() == doctest::Approx(7.0));
    int interior = 0;
    for (int v = 0; v < g.num_vertices(); ++v) {
        const int d = g.degree(v);
        CHECK((d == 1 || d == 3));
        if (d == 3) ++interior;
    }
    CHECK(interior == 3);
    CHECK_THROWS_AS(catalog("bethe_tree", {{"degree", 2}}), graph_error);
}

TEST_CASE("doubling tree lengths") {
    MetricGraph g = catalog("doubling_tree", {{"depth", 5}});
    REQUIRE(g.num_edges() == 5);
    double sup = 0.0;
    for (int n = 0; n < 5; ++n) {
        CHECK(g.edges[n].length == doctest::Approx(std::pow(2.0, n)));
        sup = std::max(sup, g.edges[n].length);
    }
    CHECK(sup == doctest::Approx(std::pow(2.0, 4)));
    CHECK(std::isfinite(g.total_length()));
}

TEST_CASE("tadpole loop contributes two incidences") {
    MetricGraph g = catalog("tadpole");
    CHECK(g.degree(0) == 3);  // loop twice + half-line
    CHECK(g.edges[0].is_loop());
}

TEST_CASE("periodic catalogs carry cell cuts") {
    MetricGraph chain = catalog("periodic_chain", {{"cells", 5}});
    CHECK(chain.cell_cuts.size() == 4);
    MetricGraph ladder = catalog("periodic_ladder", {{"cells", 4}});
    CHECK(ladder.cell_cuts.size() == 3);
    for (const auto& cut : ladder.cell_cuts) CHECK(cut.crossings.size() == 2);
}

TEST_CASE("catalog rejects unknown names") {
    CHECK_THROWS_AS(catalog("moebius"), graph_error);
}

TEST_CASE("every catalog graph is connected with consistent incidence") {
    for (const std::string& name : catalog_names()) {
        MetricGraph g = catalog(name);
        for (int v = 0; v < g.num_vertices(); ++v)
            CHECK(g.degree(v) == static_cast<int>(g.incidence()[v].size()));
        CHECK(g.num_edges() >= 1);  // finalize() enforced connectivity already
    }
}
