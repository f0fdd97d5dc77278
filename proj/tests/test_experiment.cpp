#include <cmath>
#include <sstream>

#include "capsim/errors.hpp"
#include "capsim/experiment.hpp"
#include "doctest.h"

using namespace capsim;

namespace {

ExperimentConfig make(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    cfg.load(in);
    cfg.validate();
    return cfg;
}

}  // namespace

TEST_SUITE("capsim-cli") {

TEST_CASE("config parsing") {
    auto cfg = make("# comment\nkind = ecbp-mc\nlambda = 2, 2  # trailing\nell-max=7\nnode_cap=1e5\n\nseed=9\n");
    CHECK(cfg.kind == ExperimentKind::ecbp_mc);
    CHECK(cfg.k == 2);
    CHECK(cfg.lambda == std::vector<double>{2.0, 2.0});
    CHECK(cfg.ell_max == 7);
    CHECK(cfg.node_cap == 100000);
    CHECK(cfg.seed == 9);
    CHECK(cfg.n == std::vector<std::size_t>{500, 1000, 2000, 4000});

    ExperimentConfig c;
    CHECK_THROWS_AS(c.set("colour", "1"), ConfigError);
    CHECK_THROWS_AS(c.set("replicas", "ten"), ConfigError);
    CHECK_THROWS_AS(c.set("kind", "nonsense"), ConfigError);
    CHECK_THROWS_AS(make("lambda 2,2\n"), ConfigError);
    CHECK_THROWS_AS(make("kind=analytic\n"), ConfigError);
    CHECK_THROWS_AS(make("lambda=2,2\nk=3\n"), ConfigError);
    CHECK_THROWS_AS(make("lambda=2,-1\n"), ConfigError);
    CHECK_THROWS_AS(make("kind=ecbp-mc\nlambda=1.2,0.3,0.3\n"), ConfigError);
    CHECK_THROWS_AS(make("kind=near-critical\nk=1\n"), ConfigError);
    CHECK_NOTHROW(make("kind=analytic\nlambda=1.2,0.3,0.3\n"));
}

TEST_CASE("config hash") {
    auto a = make("lambda=2,2\nseed=3\n");
    auto b = make("lambda=2,2\nseed=3\nworkers=5\nout=/tmp/x\n");
    auto c = make("lambda=2,2\nseed=4\n");
    CHECK(a.hash().size() == 16);
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
}

TEST_CASE("convergence runs are byte-identical") {
    auto cfg = make("kind=convergence\nlambda=2,2\nn=200,400\nreplicas=6\nell_max=4\nseed=5\n");
    std::ostringstream one, two;
    cfg.workers = 1;
    auto r1 = run_ecer_convergence(cfg, &one);
    cfg.workers = 3;
    auto r2 = run_ecer_convergence(cfg, &two);
    CHECK(one.str() == two.str());
    CHECK(r1.results == r2.results);
    CHECK(r1.ok());
    CHECK(one.str().rfind("# schema capsim.convergence.v1", 0) == 0);
    std::istringstream lines(one.str());
    std::string line;
    std::size_t rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 2 + 2 * 6 * 4);
    CHECK(r1.results["per_n"].size() == 2);
    CHECK(r1.results["target_f_ell"].size() == 4);
}

TEST_CASE("analytic report") {
    auto rec = run_analytic_report(make("kind=analytic\nlambda=2,2\nell_max=5\n"));
    CHECK(rec.ok());
    CHECK(rec.checks.at("routes_agree"));
    CHECK(rec.results["p"]["{0,1}"].get<double>() == doctest::Approx(0.958714689492999).epsilon(1e-13));
    CHECK(rec.results["pstar"]["10"].get<double>() == doctest::Approx(0.161902559472979).epsilon(1e-12));
    CHECK(rec.results["f_star_ell"].size() == 5);
    auto j = rec.to_json();
    CHECK(j["version"] == kVersion);
    CHECK(j["config"]["hash"].get<std::string>().size() == 16);

    auto sub = run_analytic_report(make("kind=analytic\nlambda=0.4,0.4,0.4\n"));
    CHECK(sub.ok());
    CHECK(sub.results["f_inf_inclusion_exclusion"] == 0.0);
    CHECK(sub.results["f_inf_generating_function"].is_null());
}

TEST_CASE("branching-process Monte Carlo run") {
    auto rec = run_ecbp_mc(make("kind=ecbp-mc\nlambda=2,2\nsamples=20000\nell_max=3\n"));
    CHECK(rec.ok());
    CHECK(rec.results["histogram"].size() == 3);
    CHECK(rec.results["histogram"][0].contains("target"));
    CHECK(rec.results["core_f_inf"]["estimate"].get<double>() > 0.6);
}

TEST_CASE("near-critical run") {
    auto rec = run_near_critical(make("kind=near-critical\nk=2\n"));
    CHECK(rec.ok());
    CHECK(rec.results["ratios"].size() == 4);
    CHECK(std::abs(rec.results["estimate"].get<double>() - 4.0) < 0.04);
}

TEST_CASE("local weak run") {
    std::ostringstream csv;
    auto rec = run_local_weak_check(make("kind=local-weak\nlambda=1,1\nn=800\nreplicas=3\nsamples=20000\n"), &csv);
    CHECK(rec.ok());
    CHECK(rec.results["catalog_size"].get<std::size_t>() > 5);
    CHECK(rec.results["isolated_root"]["target"].get<double>() == doctest::Approx(std::exp(-2.0)));
    CHECK(rec.results["tv_distance"].get<double>() < 0.1);
    CHECK(csv.str().rfind("# schema capsim.local_weak.v1", 0) == 0);
}

TEST_CASE("ball codes") {
    EdgeColoredGraph path(3, {{{0, 1}}, {{1, 2}}});
    auto adj = path.color_adjacency();
    CHECK(ball_code(path, adj, 0, 1) == "(0())");
    CHECK(ball_code(path, adj, 0, 2) == "(0(1()))");
    CHECK(ball_code(path, adj, 1, 1) == "(0()1())");

    EdgeColoredGraph triangle(3, {{{0, 1}, {0, 2}}, {{1, 2}}});
    auto tadj = triangle.color_adjacency();
    CHECK(ball_code(triangle, tadj, 0, 1) == "(0()0())");
    CHECK_FALSE(ball_code(triangle, tadj, 0, 2).has_value());

    EdgeColoredGraph doubled(2, {{{0, 1}}, {{0, 1}}});
    CHECK_FALSE(ball_code(doubled, doubled.color_adjacency(), 0, 1).has_value());

    CHECK(code_size("()") == 1);
    CHECK(code_size("(0()1(0()))") == 4);

    for (std::uint64_t s = 0; s < 50; ++s) {
        Stream r = Stream(30).substream({s});
        auto t = sample_ecbp(LambdaVector({1.0, 0.7}), 3, r);
        auto g = t->to_graph();
        for (int radius = 1; radius <= 3; ++radius) CHECK(ball_code(g, g.color_adjacency(), 0, radius) == ball_code(*t, radius));
    }
}

}
