#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace sublin;

namespace {

BipartiteExperiment complete_bipartite(std::size_t side, std::uint64_t m, std::uint64_t trials) {
    BipartiteExperiment e;
    e.u_size = e.v_size = side;
    for (std::uint32_t u = 0; u < side; ++u)
        for (std::uint32_t v = 0; v < side; ++v) e.edges.emplace_back(u, v);
    e.mu.assign(side + 1, 1.0 / static_cast<double>(side));
    e.mu.back() = 0;
    e.nu = e.mu;
    e.m = e.m2 = m;
    e.trials = trials;
    return e;
}

HypergraphExperiment triangles(std::size_t count, double null_mass, std::uint64_t trials) {
    HypergraphExperiment e;
    e.v_size = 3 * count;
    e.k = 3;
    for (std::uint32_t t = 0; t < count; ++t) e.edges.push_back({3 * t, 3 * t + 1, 3 * t + 2});
    e.mu.assign(e.v_size + 1, (1 - null_mass) / static_cast<double>(e.v_size));
    e.mu.back() = null_mass;
    e.trials = trials;
    return e;
}

}  // namespace

TEST(BipartiteBirthday, TrivialCases) {
    BipartiteExperiment e;
    e.u_size = e.v_size = 1;
    e.edges = {{0, 0}};
    e.mu = {1, 0};
    e.nu = {1, 0};
    e.trials = 100;
    SeededRng rng(1, 0);
    EXPECT_DOUBLE_EQ(run_bipartite_birthday(e, rng), 1.0);
    e.mu = {0, 1};
    EXPECT_DOUBLE_EQ(run_bipartite_birthday(e, rng), 0.0);
}

TEST(BipartiteBirthday, CompleteGraphInRegime) {
    // A cover of K_{s,s} must contain a whole side, so ε = 1; exact
    // certification refuses 200 vertices, and agrees at s = 4.
    EXPECT_NEAR(certified_eps(complete_bipartite(4, 1, 1)), 1.0, 1e-9);
    auto e = complete_bipartite(100, 100, 1000);
    EXPECT_THROW(certified_eps(e), SizeRefused);
    const double eps = 1.0;
    EXPECT_TRUE(in_regime(e, eps));
    SeededRng rng(2, 0);
    EXPECT_GE(run_bipartite_birthday(e, rng), 0.97);
}

TEST(BipartiteBirthday, RejectsMalformedExperiments) {
    auto e = complete_bipartite(3, 1, 10);
    SeededRng rng(3, 0);
    e.mu.pop_back();
    EXPECT_THROW(run_bipartite_birthday(e, rng), ContractViolation);
    e = complete_bipartite(3, 1, 10);
    e.edges.emplace_back(5, 0);
    EXPECT_THROW(run_bipartite_birthday(e, rng), ContractViolation);
}

TEST(HypergraphBirthday, SingleTriangle) {
    auto e = triangles(1, 0, 1000);
    const double eps = certified_eps(e);
    EXPECT_NEAR(eps, 1.0 / 3, 1e-9);
    e.m = static_cast<std::uint64_t>(std::ceil(hypergraph_min_samples(3, 3, eps)));
    EXPECT_TRUE(in_regime(e, eps));
    SeededRng rng(4, 0);
    EXPECT_GE(run_hypergraph_birthday(e, rng), 0.97);
}

TEST(HypergraphBirthday, EdgelessIsZero) {
    auto e = triangles(2, 0, 200);
    e.edges.clear();
    e.m = 1000;
    SeededRng rng(5, 0);
    EXPECT_DOUBLE_EQ(run_hypergraph_birthday(e, rng), 0.0);
}

TEST(HypergraphBirthday, PartitionedTrianglesCertified) {
    auto e = triangles(10, 0.5, 1000);
    const double eps = certified_eps(e);
    EXPECT_NEAR(eps, 10 * 0.5 / 30, 1e-9);
    e.m = static_cast<std::uint64_t>(std::ceil(hypergraph_min_samples(e.v_size, 3, eps)));
    SeededRng rng(6, 0);
    EXPECT_GE(run_hypergraph_birthday(e, rng), 0.97);
}

TEST(HypergraphBirthday, RejectsUnsupportedK) {
    auto e = triangles(1, 0, 10);
    e.k = 5;
    SeededRng rng(7, 0);
    EXPECT_THROW(run_hypergraph_birthday(e, rng), ContractViolation);
}

TEST(ClassicalBirthday, BipartiteCases) {
    SeededRng rng(8, 0);
    EXPECT_DOUBLE_EQ(run_classical_bipartite({1, 0}, 1, 1, 100, rng), 1.0);

    // n = 100, ε = 0.5: m·m' ≥ 100n/ε² and m, m' ≥ 200/ε.
    std::vector<double> p(101, 0.5 / 100);
    p.back() = 0.5;
    EXPECT_GE(run_classical_bipartite(p, 400, 400, 1000, rng), 0.97);

    // One draw each: Pr[hit] = Σ p_i² = ε²/n.
    const double single = run_classical_bipartite(p, 1, 1, 4000, rng);
    EXPECT_LT(single, 0.01);
}

TEST(ClassicalBirthday, HypergraphInRegime) {
    // n = 50, k = 3, half of each column's 1/3 mass on the null row: ε = 1/6.
    const std::size_t n = 50, k = 3;
    std::vector<double> p(n + 1, (0.5 / 3) / n);
    p.back() = 0.5 / 3;
    const double eps = 0.5 / 3;
    const auto m = static_cast<std::uint64_t>(std::ceil(10.0 * k * std::pow(n, (k - 1.0) / k) / eps));
    SeededRng rng(9, 0);
    EXPECT_GE(run_classical_hypergraph(p, k, m, 1000, rng), 0.97);
}

TEST(Birthday, MonotoneInSampleSize) {
    // Shared seeds across the grid; 2σ slack covers sampling noise.
    const std::uint64_t trials = 2000;
    auto slack = [&](double p) { return 2 * std::sqrt(std::max(p * (1 - p), 0.01) / trials); };
    auto e = triangles(10, 0.5, trials);
    double last = 0;
    for (std::uint64_t m : {20, 60, 180, 540}) {
        e.m = m;
        SeededRng rng(10, 0);
        double p = run_hypergraph_birthday(e, rng);
        EXPECT_GE(p + slack(p), last);
        last = p;
    }
    auto b = complete_bipartite(50, 1, trials);
    b.mu.assign(51, 0.1 / 50);
    b.mu.back() = 0.9;
    b.nu = b.mu;
    last = 0;
    for (std::uint64_t m : {1, 5, 25, 125}) {
        b.m = b.m2 = m;
        SeededRng rng(11, 0);
        double p = run_bipartite_birthday(b, rng);
        EXPECT_GE(p + slack(p), last);
        last = p;
    }
}

TEST(Birthday, Deterministic) {
    auto e = triangles(5, 0.3, 300);
    e.m = 40;
    SeededRng a(12, 0), b(12, 0);
    EXPECT_EQ(run_hypergraph_birthday(e, a), run_hypergraph_birthday(e, b));
}
