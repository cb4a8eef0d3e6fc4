#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "test_util.hpp"

using namespace sublin;

TEST(BitString, OrAndXorExamples) {
    auto a = BitString::from_bits("0101"), b = BitString::from_bits("0011");
    EXPECT_EQ(bit_or(a, b), BitString::from_bits("0111"));
    EXPECT_EQ(bit_xor(a, b), BitString::from_bits("0110"));
    EXPECT_EQ(bit_or(a, BitString(4)), a);
    EXPECT_EQ(bit_xor(a, a), BitString(4));
    EXPECT_EQ(bit_xor(a, BitString(4)), a);
    EXPECT_EQ(unit(2, 5) | unit(4, 5), BitString::from_bits("01010"));
}

TEST(BitString, UnitVectors) {
    EXPECT_EQ(unit(1, 4), BitString::from_bits("1000"));
    EXPECT_EQ(unit(4, 4), BitString::from_bits("0001"));
    EXPECT_EQ(unit(3, 8).support(), std::vector<std::uint32_t>{3});
    EXPECT_THROW(unit(0, 4), ContractViolation);
    EXPECT_THROW(unit(5, 4), ContractViolation);
}

TEST(BitString, WidthMismatchIsContractViolation) {
    EXPECT_THROW(BitString(3) | BitString(4), ContractViolation);
    EXPECT_THROW(BitString(3) ^ BitString(4), ContractViolation);
}

TEST(BitString, HexIsLittleEndianByBit) {
    auto x = unit(1, 12);
    EXPECT_EQ(x.to_hex(), "0100");
    EXPECT_EQ(unit(9, 12).to_hex(), "0001");
    EXPECT_EQ(unit(8, 12).to_hex(), "8000");
    SeededRng rng(1, 0);
    for (std::size_t n : {1, 7, 8, 63, 64, 65, 130}) {
        for (int t = 0; t < 20; ++t) {
            auto y = testutil::random_string(n, rng);
            EXPECT_EQ(BitString::from_hex(y.to_hex(), n), y);
        }
    }
    EXPECT_THROW(BitString::from_hex("ff", 4), ContractViolation);
}

TEST(BitString, PopcountAndSupportAgreeWithBitLoop) {
    SeededRng rng(2, 0);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng.below(200);
        auto x = testutil::random_string(n, rng, 0.3);
        std::vector<std::uint32_t> s;
        for (std::uint32_t i = 1; i <= n; ++i)
            if (x.test(i)) s.push_back(i);
        EXPECT_EQ(x.support(), s);
        EXPECT_EQ(x.popcount(), s.size());
        EXPECT_EQ(x.none(), s.empty());
    }
}

TEST(Rng, SameSeedSameStream) {
    SeededRng a(42, 7), b(42, 7), c(42, 8);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        auto x = a(), y = b(), z = c();
        EXPECT_EQ(x, y);
        differs = differs || x != z;
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, BelowIsUniform) {
    SeededRng rng(3, 0);
    std::vector<int> count(6, 0);
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) ++count[rng.below(6)];
    double chi2 = 0;
    for (int c : count) chi2 += std::pow(c - draws / 6.0, 2) / (draws / 6.0);
    EXPECT_LT(chi2, 20.5);  // 5 dof, p ≈ 0.001
}

TEST(Distribution, PointMassAlwaysReturnsAtom) {
    auto x = BitString::from_bits("0110");
    auto d = FiniteDistribution::point(x);
    SeededRng rng(4, 0);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(sample(d, rng), x);
}

TEST(Distribution, UniformOnTwoAtomsHasHalfFrequency) {
    auto d = FiniteDistribution::uniform(2, {BitString::from_bits("00"), BitString::from_bits("11")});
    SeededRng rng(5, 0);
    int zeros = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) zeros += sample(d, rng).none();
    EXPECT_NEAR(zeros / double(draws), 0.5, 0.01);
}

TEST(Distribution, AliasFrequenciesMatchWeights) {
    std::vector<BitString> atoms;
    for (std::size_t a = 1; a <= 5; ++a) atoms.push_back(TruthTable::from_index(a, 3));
    std::vector<double> w{0.05, 0.1, 0.15, 0.3, 0.4};
    FiniteDistribution d(3, atoms, w);
    SeededRng rng(6, 0);
    std::vector<int> count(5, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++count[d.sample_index(rng)];
    double chi2 = 0;
    for (int i = 0; i < 5; ++i) chi2 += std::pow(count[i] - draws * w[i], 2) / (draws * w[i]);
    EXPECT_LT(chi2, 18.5);  // 4 dof, p ≈ 0.001
}

TEST(Distribution, RejectsBadWeightsAndDuplicates) {
    auto x = BitString::from_bits("01"), y = BitString::from_bits("10");
    EXPECT_THROW(FiniteDistribution(2, {x, y}, {0.5, 0.6}), ContractViolation);
    EXPECT_THROW(FiniteDistribution(2, {x, y}, {1.2, -0.2}), ContractViolation);
    EXPECT_THROW(FiniteDistribution(2, {x, x}, {0.5, 0.5}), ContractViolation);
    EXPECT_THROW(FiniteDistribution(2, {x, BitString(3)}, {0.5, 0.5}), ContractViolation);
}

TEST(Distribution, XorShift) {
    SeededRng rng(7, 0);
    auto d = FiniteDistribution::uniform(4, {BitString::from_bits("0101"), BitString::from_bits("1100")});
    auto same = xor_shift(d, BitString(4));
    EXPECT_EQ(same.atoms(), d.atoms());
    auto p = xor_shift(FiniteDistribution::point(BitString::from_bits("0101")), BitString::from_bits("1111"));
    EXPECT_EQ(p.atom(0), BitString::from_bits("1010"));
    auto r = testutil::random_string(4, rng);
    auto back = xor_shift(xor_shift(d, r), r);
    EXPECT_EQ(back.atoms(), d.atoms());
    EXPECT_EQ(back.weights(), d.weights());
}

TEST(Distribution, VertexMarginal) {
    auto one = vertex_marginal(PairDistribution::uniform(3, {{1, 2}}));
    EXPECT_DOUBLE_EQ(one[1], 0.5);
    EXPECT_DOUBLE_EQ(one[2], 0.5);
    auto two = vertex_marginal(PairDistribution::uniform(3, {{1, 2}, {1, 3}}));
    EXPECT_DOUBLE_EQ(two[1], 0.5);
    EXPECT_DOUBLE_EQ(two[2], 0.25);
    EXPECT_DOUBLE_EQ(two[3], 0.25);
    SeededRng rng(8, 0);
    auto b = gen_total_yes(30, 50, rng);
    auto m = vertex_marginal(b.dist);
    double sum = 0;
    for (double x : m) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(PairDistribution, RejectsSelfLoopsAndDuplicates) {
    EXPECT_THROW(PairDistribution::uniform(3, {{2, 2}}), ContractViolation);
    EXPECT_THROW(PairDistribution::uniform(3, {{1, 2}, {2, 1}}), ContractViolation);
    EXPECT_THROW(PairDistribution::uniform(3, {{1, 4}}), ContractViolation);
}

TEST(Oracle, CountsQueries) {
    QueryLedger ledger;
    FunctionOracle f(3, [](const BitString&) { return true; }, &ledger);
    EXPECT_EQ(ledger.report(), (LedgerReport{0, 0}));
    EXPECT_TRUE(f.query(BitString(3)));
    EXPECT_EQ(ledger.function_queries(), 1u);
    f.query(BitString(3));
    f.query(unit(1, 3));
    EXPECT_EQ(ledger.function_queries(), 3u);
    EXPECT_THROW(f.query(BitString(4)), ContractViolation);
}

TEST(Oracle, MdlTargetExample) {
    MonotoneDLRep rep({2, 1, 3}, {1, 0, 1, 0});
    auto f = mdl_oracle(rep);
    EXPECT_TRUE(f.query(BitString::from_bits("011")));
}

TEST(Oracle, LedgerAddsSamplesAndMerges) {
    QueryLedger ledger;
    FunctionOracle f(2, [](const BitString& x) { return x.test(1); }, &ledger);
    auto d = FiniteDistribution::point(BitString::from_bits("10"));
    SeededRng rng(9, 0);
    Sampler s(d, rng, &ledger);
    for (int i = 0; i < 5; ++i) f.query(BitString(2));
    EXPECT_EQ(s.draw(), BitString::from_bits("10"));
    s.draw();
    EXPECT_EQ(ledger.report(), (LedgerReport{5, 2}));
    EXPECT_EQ(merge(LedgerReport{5, 2}, LedgerReport{1, 7}), (LedgerReport{6, 9}));
}

TEST(Oracle, DrawSetChargesEveryDraw) {
    QueryLedger ledger;
    auto d = FiniteDistribution::point(BitString::from_bits("1"));
    SeededRng rng(10, 0);
    Sampler s(d, rng, &ledger);
    auto set = s.draw_set(17);
    EXPECT_EQ(set.size(), 1u);
    EXPECT_EQ(ledger.samples_drawn(), 17u);
}

TEST(Oracle, SeededReplayIsIdentical) {
    SeededRng rng(11, 0);
    auto b = gen_mdl_yes(64, 40, rng);
    std::vector<BitString> first, second;
    for (auto* out : {&first, &second}) {
        SeededRng r(99, 1);
        Sampler s(b.dist, r, nullptr);
        for (int i = 0; i < 50; ++i) out->push_back(s.draw());
    }
    EXPECT_EQ(first, second);
}

TEST(Oracle, BudgetExhaustionIsRecoverable) {
    QueryLedger ledger(2, std::nullopt);
    FunctionOracle f(1, [](const BitString&) { return false; }, &ledger);
    f.query(BitString(1));
    f.query(BitString(1));
    try {
        f.query(BitString(1));
        FAIL() << "expected BudgetExhausted";
    } catch (const BudgetExhausted& e) {
        EXPECT_EQ(e.counter, BudgetExhausted::Counter::queries);
        EXPECT_EQ(e.limit, 2u);
    }
    EXPECT_EQ(ledger.function_queries(), 2u);
}

TEST(Oracle, ShiftedChargesTheBase) {
    QueryLedger ledger;
    FunctionOracle f(3, [](const BitString& x) { return x.test(1) && !x.test(2); }, &ledger);
    auto g = shifted(f, BitString::from_bits("010"));
    EXPECT_TRUE(g.query(BitString::from_bits("110")));
    EXPECT_FALSE(g.query(BitString::from_bits("100")));
    EXPECT_EQ(ledger.function_queries(), 2u);
}

TEST(ComparisonOracle, TotalOrderAndConsistency) {
    QueryLedger ledger;
    ComparisonOracle sigma(10, [](std::uint32_t u, std::uint32_t v) { return u < v; }, &ledger);
    EXPECT_TRUE(sigma.compare(3, 7));
    EXPECT_FALSE(sigma.compare(7, 3));
    EXPECT_EQ(ledger.function_queries(), 2u);
    EXPECT_THROW(sigma.compare(3, 3), ContractViolation);

    // An inconsistent target is still answered per unordered pair.
    ComparisonOracle odd(4, [](std::uint32_t, std::uint32_t) { return true; });
    for (std::uint32_t u = 1; u <= 4; ++u)
        for (std::uint32_t v = 1; v <= 4; ++v) {
            if (u != v) {
                EXPECT_NE(odd.compare(u, v), odd.compare(v, u));
            }
        }
}

TEST(Stats, WilsonBracketsTheRate) {
    auto ci = wilson(150, 200);
    EXPECT_LT(ci.lo, 0.75);
    EXPECT_GT(ci.hi, 0.75);
    EXPECT_GT(ci.lo, 0.66);
    auto all = wilson(200, 200);
    EXPECT_DOUBLE_EQ(all.hi, 1.0);
    EXPECT_GT(all.lo, 0.97);
    auto none = wilson(0, 200);
    EXPECT_NEAR(none.lo, 0.0, 1e-12);
}
