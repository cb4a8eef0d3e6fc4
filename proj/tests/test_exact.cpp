#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <numeric>

#include "test_util.hpp"

using namespace sublin;

namespace {

double disagreement(const std::vector<std::uint32_t>& order, const LessFn& less, const PairDistribution& d) {
    std::vector<std::uint32_t> pos(d.width() + 1);
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<std::uint32_t>(i);
    double m = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        auto e = d.edge(i);
        if (less(e.u, e.v) != (pos[e.u] < pos[e.v])) m += d.weight(i);
    }
    return m;
}

// Truth tables over n ≤ 4 variables as bitmasks of 2^n entries.
using Table = std::vector<std::uint8_t>;

Table restrict(const Table& g, std::size_t n, std::size_t var, bool value) {
    Table out;
    for (std::size_t a = 0; a < g.size(); ++a)
        if (((a >> var) & 1) == static_cast<std::size_t>(value)) out.push_back(g[a]);
    (void)n;
    return out;
}

bool constant(const Table& g) { return std::all_of(g.begin(), g.end(), [&](auto v) { return v == g[0]; }); }

// Recursive characterization: some literal fixes g, and g is a (monotone)
// decision list on the other side of that literal.
bool is_list(const Table& g, std::size_t n, bool monotone) {
    if (constant(g)) return true;
    for (std::size_t v = 0; v < n; ++v)
        for (bool c : {true, false}) {
            if (monotone && !c) continue;
            if (constant(restrict(g, n, v, c)) && is_list(restrict(g, n, v, !c), n - 1, monotone)) return true;
        }
    return false;
}

std::vector<Table> all_lists(std::size_t n, bool monotone) {
    std::vector<Table> out;
    const std::size_t size = std::size_t{1} << n;
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << size); ++code) {
        Table g(size);
        for (std::size_t a = 0; a < size; ++a) g[a] = (code >> a) & 1;
        if (is_list(g, n, monotone)) out.push_back(std::move(g));
    }
    return out;
}

double brute_distance(const std::vector<Table>& cls, const Table& f, const FiniteDistribution& d) {
    double best = 1e9;
    for (const auto& g : cls) {
        double m = 0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            auto a = TruthTable::to_index(d.atom(i));
            if (f[a] != g[a]) m += d.weight(i);
        }
        best = std::min(best, m);
    }
    return best;
}

double brute_cover(const Hypergraph& g, const std::vector<double>& w) {
    double best = 1e9;
    for (std::uint32_t mask = 0; mask < (1u << g.num_vertices); ++mask) {
        bool ok = true;
        for (const auto& e : g.edges) {
            bool hit = false;
            for (auto v : e) hit = hit || (mask >> v & 1);
            ok = ok && hit;
        }
        if (!ok) continue;
        double c = 0;
        for (std::size_t v = 0; v < g.num_vertices; ++v)
            if (mask >> v & 1) c += w[v];
        best = std::min(best, c);
    }
    return best;
}

}  // namespace

TEST(DistTotalOrderings, SmallCases) {
    LessFn natural = [](std::uint32_t u, std::uint32_t v) { return u < v; };
    auto all = PairDistribution::uniform(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
    EXPECT_DOUBLE_EQ(dist_total_orderings(natural, all).distance, 0.0);

    LessFn tri = [](std::uint32_t u, std::uint32_t v) { return (u % 3) + 1 == v; };
    auto d = PairDistribution::uniform(3, {{1, 2}, {2, 3}, {1, 3}});
    EXPECT_NEAR(dist_total_orderings(tri, d).distance, 1.0 / 3, 1e-12);
}

TEST(DistTotalOrderings, PentagonIsOneFifthFar) {
    SeededRng rng(1, 0);
    for (std::size_t n : {5, 10}) {
        auto b = gen_pentagon(n, rng);
        auto less = make_less(b.cmp);
        auto r = dist_total_orderings(less, b.dist);
        EXPECT_NEAR(r.distance, 0.2, 1e-12);
        EXPECT_NEAR(disagreement(r.witness, less, b.dist), r.distance, 1e-12);
    }
}

TEST(DistTotalOrderings, DpMatchesEnumeration) {
    SeededRng rng(2, 0);
    for (int t = 0; t < 60; ++t) {
        const std::size_t n = 2 + rng.below(7);
        std::vector<std::uint8_t> orient(n * n, 0);
        std::vector<Edge> edges;
        std::vector<double> w;
        for (std::uint32_t u = 1; u <= n; ++u)
            for (std::uint32_t v = u + 1; v <= n; ++v) {
                bool uv = rng.bernoulli(0.5);
                orient[(u - 1) * n + (v - 1)] = uv;
                orient[(v - 1) * n + (u - 1)] = !uv;
                edges.push_back({u, v});
                w.push_back(0.1 + rng.uniform01());
            }
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        for (auto& x : w) x /= total;
        PairDistribution d(n, edges, w);
        LessFn less = [&](std::uint32_t u, std::uint32_t v) { return orient[(u - 1) * n + (v - 1)] != 0; };
        auto r = dist_total_orderings(less, d);
        EXPECT_NEAR(r.distance, dist_total_orderings_dp(less, d), 1e-12);
        EXPECT_NEAR(disagreement(r.witness, less, d), r.distance, 1e-12);
    }
}

TEST(DistTotalOrderings, RefusesLargeN) {
    LessFn natural = [](std::uint32_t u, std::uint32_t v) { return u < v; };
    auto d = PairDistribution::uniform(11, {{1, 2}});
    EXPECT_THROW(dist_total_orderings(natural, d), SizeRefused);
}

TEST(DistMdl, XorIsOneQuarter) {
    BoolFn x = [](const BitString& s) { return s.test(1) != s.test(2); };
    std::vector<BitString> atoms;
    for (std::size_t a = 0; a < 4; ++a) atoms.push_back(TruthTable::from_index(a, 2));
    auto d = FiniteDistribution::uniform(2, atoms);
    EXPECT_NEAR(dist_mdl(x, d).distance, 0.25, 1e-12);
}

TEST(DistMdl, MdlIsAtDistanceZero) {
    SeededRng rng(3, 0);
    for (int t = 0; t < 20; ++t) {
        auto b = gen_mdl_yes(5, 20, rng);
        MonotoneDLRep rep(b.fn.pi, b.fn.nu);
        auto r = dist_mdl([&](const BitString& x) { return eval_mdl(rep, x); }, b.dist);
        EXPECT_DOUBLE_EQ(r.distance, 0.0);
        for (std::size_t i = 0; i < b.dist.size(); ++i)
            EXPECT_EQ(eval_mdl(r.witness, b.dist.atom(i)), eval_mdl(rep, b.dist.atom(i)));
    }
}

TEST(DistMdl, MatchesBruteForceOverAllTables) {
    SeededRng rng(4, 0);
    for (std::size_t n : {2, 3, 4}) {
        const auto mdls = all_lists(n, true);
        const auto dls = all_lists(n, false);
        for (int t = 0; t < (n == 4 ? 10 : 40); ++t) {
            auto b = gen_random_table(n, std::size_t{1} << n, rng);
            BoolFn f = [&](const BitString& x) { return b.fn.table[TruthTable::to_index(x)] != 0; };
            auto rm = dist_mdl(f, b.dist);
            auto rd = dist_dl(f, b.dist);
            EXPECT_NEAR(rm.distance, brute_distance(mdls, b.fn.table, b.dist), 1e-12);
            EXPECT_NEAR(rd.distance, brute_distance(dls, b.fn.table, b.dist), 1e-12);
            // The witness realizes the reported distance.
            double m = 0;
            for (std::size_t i = 0; i < b.dist.size(); ++i)
                if (eval_mdl(rm.witness, b.dist.atom(i)) != f(b.dist.atom(i))) m += b.dist.weight(i);
            EXPECT_NEAR(m, rm.distance, 1e-12);
        }
    }
}

TEST(DistDl, NeverExceedsDistMdl) {
    SeededRng rng(5, 0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.below(3);
        auto b = gen_random_table(n, 1 + rng.below(std::size_t{1} << n), rng);
        BoolFn f = [&](const BitString& x) { return b.fn.table[TruthTable::to_index(x)] != 0; };
        EXPECT_LE(dist_dl(f, b.dist).distance, dist_mdl(f, b.dist).distance + 1e-12);
    }
}

TEST(DistMdl, AddingMassToDisagreementNeverLowersDistance) {
    SeededRng rng(6, 0);
    for (int t = 0; t < 50; ++t) {
        auto b = gen_random_table(3, 8, rng);
        BoolFn f = [&](const BitString& x) { return b.fn.table[TruthTable::to_index(x)] != 0; };
        auto r = dist_mdl(f, b.dist);
        auto w = b.dist.weights();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] *= 0.5;
        std::size_t bump = 0;
        for (std::size_t i = 0; i < w.size(); ++i)
            if (eval_mdl(r.witness, b.dist.atom(i)) != f(b.dist.atom(i))) bump = i;
        w[bump] += 0.5;
        FiniteDistribution d2(3, b.dist.atoms(), w);
        EXPECT_GE(dist_mdl(f, d2).distance + 1e-12, 0.5 * r.distance);
    }
}

TEST(DistMdl, RefusesLargeN) {
    auto d = FiniteDistribution::point(BitString(7));
    EXPECT_THROW(dist_mdl([](const BitString&) { return true; }, d), SizeRefused);
    EXPECT_THROW(dist_dl([](const BitString&) { return true; }, d), SizeRefused);
}

TEST(VertexCover, SmallCases) {
    EXPECT_DOUBLE_EQ(min_vertex_cover_weight({2, {{0, 1}}}, {0.3, 0.5}), 0.3);
    EXPECT_DOUBLE_EQ(min_vertex_cover_weight({3, {}}, {0.2, 0.2, 0.6}), 0.0);
    Hypergraph k33{6, {}};
    for (std::uint32_t u = 0; u < 3; ++u)
        for (std::uint32_t v = 3; v < 6; ++v) k33.edges.push_back({u, v});
    EXPECT_NEAR(min_vertex_cover_weight(k33, std::vector<double>(6, 1.0 / 6)), 0.5, 1e-12);
}

TEST(VertexCover, MatchesSubsetEnumeration) {
    SeededRng rng(7, 0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t nv = 2 + rng.below(11);
        const std::size_t k = 2 + rng.below(2);
        Hypergraph g{nv, {}};
        const auto m = rng.below(2 * nv);
        for (std::uint64_t e = 0; e < m; ++e) {
            std::vector<std::uint32_t> edge;
            for (std::size_t j = 0; j < k; ++j) edge.push_back(static_cast<std::uint32_t>(rng.below(nv)));
            g.edges.push_back(edge);
        }
        std::vector<double> w(nv);
        for (auto& x : w) x = rng.uniform01();
        EXPECT_NEAR(min_vertex_cover_weight(g, w), brute_cover(g, w), 1e-12);
    }
}

TEST(VertexCover, ComponentsSolvedSeparately) {
    // Ten disjoint triangles as 3-edges on 30 vertices: one vertex per triangle.
    Hypergraph g{30, {}};
    for (std::uint32_t t = 0; t < 10; ++t) g.edges.push_back({3 * t, 3 * t + 1, 3 * t + 2});
    EXPECT_NEAR(min_vertex_cover_weight(g, std::vector<double>(30, 1.0 / 30)), 1.0 / 3, 1e-12);
}

TEST(VertexCover, RefusesLargeComponent) {
    Hypergraph path{25, {}};
    for (std::uint32_t v = 0; v + 1 < 25; ++v) path.edges.push_back({v, v + 1});
    EXPECT_THROW(min_vertex_cover_weight(path, std::vector<double>(25, 0.04)), SizeRefused);
}
