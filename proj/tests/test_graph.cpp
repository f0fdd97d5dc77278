#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "capsim/errors.hpp"
#include "capsim/graph.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace capsim;

TEST_SUITE("colored-graph") {

TEST_CASE("lambda vector derived intensities") {
    LambdaVector l({0.5, 1.0, 2.0});
    CHECK(l.k() == 3);
    CHECK(l.uncolored() == doctest::Approx(3.5));
    CHECK(l.without(1) == doctest::Approx(2.5));
    CHECK(l.sum(0b101) == doctest::Approx(2.5));
    CHECK(l.sum(0) == 0.0);
    CHECK_THROWS_AS(LambdaVector({}), ParameterError);
    CHECK_THROWS_AS(LambdaVector({1.0, 0.0}), ParameterError);
    CHECK_THROWS_AS(LambdaVector({1.0, -2.0}), ParameterError);
}

TEST_CASE("graph construction normalizes and validates") {
    EdgeColoredGraph g(4, {{{2, 1}, {1, 2}, {0, 3}}, {{1, 2}}});
    CHECK(g.edges(0).size() == 2);
    CHECK(g.edges(0)[0] == Edge{0, 3});
    CHECK(g.edges(0)[1] == Edge{1, 2});
    CHECK(g.edge_count() == 3);
    CHECK_THROWS_AS(EdgeColoredGraph(3, {{{1, 1}}}), ParameterError);
    CHECK_THROWS_AS(EdgeColoredGraph(3, {{{0, 3}}}), ParameterError);
}

TEST_CASE("projection") {
    EdgeColoredGraph g(3, {{{0, 1}, {1, 2}}, {{0, 1}, {0, 2}}});
    SUBCASE("no colors gives an edgeless graph") {
        auto p = project(g, 0);
        CHECK(p.edges().empty());
        CHECK(connected_components(p).block_count() == 3);
    }
    SUBCASE("shared pair collapses to one edge") {
        auto p = project(g, 0b11);
        CHECK(p.edges().size() == 3);
        CHECK(std::count(p.edges().begin(), p.edges().end(), Edge{0, 1}) == 1);
    }
    SUBCASE("projection edge sets are nested") {
        Stream rng(11);
        auto h = testing::random_small_graph(rng, 9, 3, 0.3);
        for (ColorMask i = 0; i < 8; ++i)
            for (ColorMask j = 0; j < 8; ++j) {
                if ((i & j) != i) continue;
                auto a = project(h, i).edges();
                auto b = project(h, j).edges();
                CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
            }
    }
}

TEST_CASE("connected components") {
    SUBCASE("edgeless") {
        auto p = connected_components(SimpleGraph(5, {}));
        CHECK(p.block_count() == 5);
        CHECK(p.largest_block() == 1);
    }
    SUBCASE("path") {
        auto p = connected_components(SimpleGraph(3, {{0, 1}, {1, 2}}));
        CHECK(p.block_count() == 1);
        CHECK(p.size_of(2) == 3);
    }
    SUBCASE("random graph agrees with BFS") {
        Stream rng(5);
        for (int rep = 0; rep < 20; ++rep) {
            auto g = testing::random_small_graph(rng, 100, 1, 0.012);
            auto p = connected_components(project(g, 1));
            CHECK(p.canonical_labels() == testing::bfs_labels(100, g.edges(0)));
        }
    }
    SUBCASE("histogram counts vertices") {
        auto p = connected_components(SimpleGraph(6, {{0, 1}, {2, 3}, {3, 4}}));
        auto h = p.vertex_size_histogram();
        CHECK(h.at(1) == 1);
        CHECK(h.at(2) == 2);
        CHECK(h.at(3) == 3);
    }
}

TEST_CASE("largest component union") {
    CHECK(largest_component_union(SimpleGraph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}})).size() == 6);
    CHECK(largest_component_union(SimpleGraph(4, {{0, 1}, {1, 2}, {0, 2}})) == std::vector<Vertex>{0, 1, 2});
    Stream rng(77);
    for (int rep = 0; rep < 10; ++rep) {
        auto g = project(testing::random_small_graph(rng, 50, 1, 0.03), 1);
        auto p = connected_components(g);
        std::vector<Vertex> expected;
        for (Vertex v = 0; v < 50; ++v)
            if (p.size_of(v) == p.largest_block()) expected.push_back(v);
        auto got = largest_component_union(g);
        CHECK(got == expected);
        CHECK(got.size() >= p.largest_block());
    }
}

TEST_CASE("ECER edge counts match the binomial mean") {
    const std::size_t n = 2000;
    const double pairs = n * (n - 1) / 2.0;
    SUBCASE("single color") {
        LambdaVector l({1.5, 1.5});
        const double p = 1.0 - std::exp(-1.5 / n);
        testing::Moments m;
        for (std::uint64_t r = 0; r < 200; ++r) m.add(static_cast<double>(sample_ecer(n, n, l, Stream(3).substream({r})).edges(0).size()));
        CHECK(std::abs(m.mean() - pairs * p) < 3.0 * std::sqrt(pairs * p * (1 - p) / 200.0));
    }
    SUBCASE("projection is Erdos-Renyi with the summed intensity") {
        LambdaVector l({0.4, 0.4});
        const double p = 1.0 - std::exp(-0.8 / n);
        testing::Moments m;
        for (std::uint64_t r = 0; r < 200; ++r)
            m.add(static_cast<double>(project(sample_ecer(n, n, l, Stream(4).substream({r})), 0b11).edges().size()));
        CHECK(std::abs(m.mean() - pairs * p) < 3.0 * std::sqrt(pairs * p * (1 - p) / 200.0));
    }
}

TEST_CASE("ECER with fewer vertices keeps the n-based probability") {
    const std::size_t n = 1000, m = 400;
    LambdaVector l({2.0});
    testing::Moments deg;
    for (std::uint64_t r = 0; r < 200; ++r)
        deg.add(2.0 * static_cast<double>(sample_ecer(n, m, l, Stream(8).substream({r})).edges(0).size()) / m);
    const double expected = (m - 1) * (1.0 - std::exp(-2.0 / n));
    CHECK(std::abs(deg.mean() - expected) < 3.0 * deg.stderr_());
    CHECK_THROWS_AS(sample_ecer(10, 11, l, Stream(1)), ParameterError);
}

TEST_CASE("ECER is reproducible and position-free") {
    LambdaVector l({1.5, 1.5});
    auto a = sample_ecer(300, 300, l, Stream(9));
    auto b = sample_ecer(300, 300, l, Stream(9));
    CHECK(a.edges(0) == b.edges(0));
    CHECK(a.edges(1) == b.edges(1));
    CHECK(a.edges(0) != a.edges(1));

    // Degree histograms of the low and high halves of the labels must agree.
    const std::size_t n = 200, reps = 2000, bins = 8;
    std::vector<double> low(bins), high(bins);
    for (std::uint64_t r = 0; r < reps; ++r) {
        auto g = sample_ecer(n, n, l, Stream(10).substream({r}));
        std::vector<std::size_t> deg(n);
        for (int c = 0; c < 2; ++c)
            for (auto e : g.edges(c)) ++deg[e.u], ++deg[e.v];
        for (Vertex v = 0; v < n; ++v) (v < n / 2 ? low : high)[std::min(deg[v], bins - 1)] += 1;
    }
    double chi2 = 0.0;
    for (std::size_t b = 0; b < bins; ++b)
        if (low[b] + high[b] > 0) chi2 += (low[b] - high[b]) * (low[b] - high[b]) / (low[b] + high[b]);
    CHECK(chi2 < 18.475);  // chi-square 0.99 quantile, 7 degrees of freedom
}

TEST_CASE("graph dump round trip") {
    Stream rng(21);
    auto g = testing::random_small_graph(rng, 12, 3, 0.2);
    std::stringstream s;
    write_graph(s, g);
    auto h = read_graph(s);
    CHECK(h.n() == 12);
    CHECK(h.k() == 3);
    for (int c = 0; c < 3; ++c) CHECK(h.edges(c) == g.edges(c));
    std::istringstream bad("3 2\n0 0 5\n");
    CHECK_THROWS_AS(read_graph(bad), ParameterError);
}

TEST_CASE("partition equality is label independent") {
    Partition a(4), b(4);
    a.unite(0, 1);
    b.unite(1, 0);
    CHECK(a == b);
    b.unite(2, 3);
    CHECK_FALSE(a == b);
}

}
