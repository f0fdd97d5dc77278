#include <algorithm>
#include <set>

#include "capsim/chronology.hpp"
#include "capsim/ecbp.hpp"
#include "capsim/errors.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace capsim;

namespace {

bool contains(const std::vector<Vertex>& set, Vertex v) { return std::binary_search(set.begin(), set.end(), v); }

}  // namespace

TEST_SUITE("chromatic-reach") {

TEST_CASE("color strings") {
    ColorString s({0, 2});
    CHECK(s.length() == 2);
    CHECK(s.set() == 0b101);
    CHECK(s.last() == 2);
    CHECK(s.prefix() == ColorString({0}));
    CHECK(s.append(1) == ColorString({0, 2, 1}));
    CHECK(s.label() == "(0,2)");
    CHECK(ColorString().label() == "()");
    CHECK_THROWS_AS(ColorString({1, 1}), ParameterError);
    CHECK_THROWS_AS(s.append(0), ParameterError);
}

TEST_CASE("enumerate color strings") {
    auto s0 = enumerate_color_strings(3, 0);
    REQUIRE(s0.size() == 1);
    CHECK(s0[0].empty());
    CHECK(enumerate_color_strings(3, 2).size() == 6);
    CHECK(color_string_count(5, 3) == 60);
    CHECK_THROWS_AS(enumerate_color_strings(3, 4), ParameterError);

    std::vector<ColorString> filtered;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                if (a != b && b != c && a != c) filtered.push_back(ColorString({a, b, c}));
    auto s3 = enumerate_color_strings(4, 3);
    CHECK(s3.size() == 24);
    CHECK(s3 == filtered);
    CHECK(std::is_sorted(s3.begin(), s3.end()));
}

TEST_CASE("two-color path") {
    EdgeColoredGraph g(3, {{{0, 1}}, {{1, 2}}});
    auto atlas = build_atlas(g, 0, 2);
    CHECK(atlas.at(ColorString()).reach == std::vector<Vertex>{0});
    CHECK(atlas.at(ColorString({0})).reach == std::vector<Vertex>{1});
    CHECK(atlas.at(ColorString({1})).fresh.empty());
    CHECK(atlas.at(ColorString({0, 1})).fresh == std::vector<Vertex>{2});
    CHECK(atlas.at(ColorString({0, 1})).reach == std::vector<Vertex>{2});
    auto cb = core_and_boundary(g, 0);
    CHECK(cb.rho == 1);
    CHECK(cb.b == std::vector<std::size_t>{0, 1});
}

TEST_CASE("isolated vertex") {
    EdgeColoredGraph g(2, {{}, {}, {}});
    auto atlas = build_atlas(g, 1, 2);
    for (const auto& [s, layer] : atlas.layers) {
        if (s.empty()) {
            CHECK(layer.reach == std::vector<Vertex>{1});
        } else {
            CHECK(layer.reach.empty());
            CHECK(layer.fresh.empty());
        }
    }
    CHECK(core_and_boundary(atlas) == CoreBoundary{1, {0, 0, 0}});
}

TEST_CASE("three-color stars") {
    SUBCASE("one child per color") {
        EdgeColoredGraph g(4, {{{0, 1}}, {{0, 2}}, {{0, 3}}});
        CHECK(core_and_boundary(g, 0) == CoreBoundary{4, {0, 0, 0}});
    }
    SUBCASE("each child has one grandchild per other color") {
        // child j = 1 + j; grandchild via color l below child j = 4 + 2 j + (l > j ? l - 1 : l)
        std::vector<std::vector<Edge>> sets(3);
        for (Vertex j = 0; j < 3; ++j) {
            sets[j].push_back({0, 1 + j});
            for (Vertex l = 0; l < 3; ++l)
                if (l != j) sets[l].push_back({1 + j, 4 + 2 * j + (l > j ? l - 1 : l)});
        }
        EdgeColoredGraph g(10, sets);
        auto atlas = build_atlas(g, 0, 2);
        CHECK(atlas.at(ColorString({0, 1})).fresh == std::vector<Vertex>{4});
        CHECK(atlas.boundary_without(2) == std::vector<Vertex>{4, 6});
        CHECK(core_and_boundary(atlas) == CoreBoundary{4, {2, 2, 2}});
    }
}

TEST_CASE("two colors: core is the root, boundary is the other color's neighborhood") {
    Stream rng(41);
    for (int rep = 0; rep < 30; ++rep) {
        auto g = testing::random_small_graph(rng, 12, 2, 0.2);
        for (Vertex v = 0; v < 12; ++v) {
            auto cb = core_and_boundary(g, v);
            CHECK(cb.rho == 1);
            for (int i = 0; i < 2; ++i) {
                std::size_t deg = 0;
                for (auto e : g.edges(1 - i)) deg += (e.u == v || e.v == v);
                CHECK(cb.b[static_cast<std::size_t>(i)] == deg);
            }
        }
    }
}

namespace {

std::vector<Vertex> merged_reach(const ChronologyAtlas& atlas, ColorMask set) {
    std::vector<Vertex> merged;
    for (const auto& [s, layer] : atlas.layers)
        if ((s.set() & ~set) == 0) merged.insert(merged.end(), layer.reach.begin(), layer.reach.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return merged;
}

std::vector<Vertex> component_of(const EdgeColoredGraph& g, Vertex v, ColorMask set) {
    auto p = connected_components(project(g, set));
    std::vector<Vertex> component;
    for (Vertex w = 0; w < g.n(); ++w)
        if (p.same(v, w)) component.push_back(w);
    return component;
}

}  // namespace

TEST_CASE("reach sets lie inside color-restricted components") {
    Stream rng(42);
    for (int rep = 0; rep < 40; ++rep) {
        const int k = 2 + rep % 2;
        auto g = testing::random_small_graph(rng, 10, k, 0.12);
        for (Vertex v = 0; v < 10; ++v) {
            auto atlas = build_atlas(g, v, k);
            for (ColorMask set = 0; set <= full_mask(k); ++set) {
                auto merged = merged_reach(atlas, set);
                auto component = component_of(g, v, set);
                CHECK(std::includes(component.begin(), component.end(), merged.begin(), merged.end()));
            }
        }
    }
}

TEST_CASE("reach sets exhaust color-restricted components on trees") {
    for (const auto& lambda : std::vector<std::vector<double>>{{1.2, 0.9}, {0.8, 0.8, 0.8}}) {
        LambdaVector l(lambda);
        const int k = l.k();
        for (std::uint64_t rep = 0; rep < 30; ++rep) {
            Stream rng = Stream(45).substream({rep, static_cast<std::uint64_t>(k)});
            auto tree = sample_ecbp(l, static_cast<std::size_t>(k), rng);
            REQUIRE(tree.has_value());
            auto g = tree->to_graph();
            auto atlas = build_atlas(g, 0, k);
            for (ColorMask set = 0; set <= full_mask(k); ++set) CHECK(merged_reach(atlas, set) == component_of(g, 0, set));
        }
    }
}

TEST_CASE("a vertex claimed under another color set is not re-reached") {
    // 0 -1- 1 -0- 2 and 0 -2- 2: vertex 2 is claimed by (2) before (1,0) can reach it
    EdgeColoredGraph g(3, {{{1, 2}}, {{0, 1}}, {{0, 2}}});
    auto atlas = build_atlas(g, 0, 3);
    CHECK(atlas.at(ColorString({2})).reach == std::vector<Vertex>{2});
    CHECK(atlas.at(ColorString({1, 0})).fresh.empty());
    CHECK(merged_reach(atlas, 0b011) == std::vector<Vertex>{0, 1});
    CHECK(component_of(g, 0, 0b011) == std::vector<Vertex>{0, 1, 2});
}

TEST_CASE("boundary avoids the core") {
    Stream rng(43);
    for (int rep = 0; rep < 30; ++rep) {
        auto g = testing::random_small_graph(rng, 12, 3, 0.12);
        auto atlas = build_atlas(g, 0, 2);
        const auto& core = atlas.reach_upto[1];
        for (int i = 0; i < 3; ++i)
            for (auto w : atlas.boundary_without(i)) CHECK_FALSE(contains(core, w));
    }
}

TEST_CASE("reach sets are disjoint on trees") {
    LambdaVector l({0.8, 0.8, 0.8});
    for (std::uint64_t rep = 0; rep < 30; ++rep) {
        Stream rng = Stream(44).substream({rep});
        auto tree = sample_ecbp(l, 5, rng);
        REQUIRE(tree.has_value());
        auto atlas = build_atlas(tree->to_graph(), 0, 3);
        std::set<Vertex> seen;
        std::size_t total = 0;
        for (const auto& [s, layer] : atlas.layers) {
            seen.insert(layer.reach.begin(), layer.reach.end());
            total += layer.reach.size();
        }
        CHECK(seen.size() == total);
    }
}

TEST_CASE("atlas JSON") {
    EdgeColoredGraph g(3, {{{0, 1}}, {{1, 2}}});
    auto j = atlas_to_json(build_atlas(g, 0, 1));
    CHECK(j["root"] == 0);
    CHECK(j["k"] == 2);
    CHECK(j["reach"]["(0)"] == std::vector<Vertex>{1});
    CHECK(j["fresh"]["(0)"] == std::vector<Vertex>{1});
    CHECK(j["rho"] == 1);
    CHECK(j["b"] == std::vector<std::size_t>{0, 1});
    CHECK_THROWS_AS(build_atlas(g, 3, 1), ParameterError);
    CHECK_THROWS_AS(build_atlas(g, 0, 3), ParameterError);
}

}
