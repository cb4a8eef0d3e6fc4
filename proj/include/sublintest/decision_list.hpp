#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "bitstring.hpp"
#include "errors.hpp"
#include "oracle.hpp"
#include "rng.hpp"

namespace sublin {

// Monotone decision list (π, ν). pi[j-1] = π(j); nu[j-1] = ν_j for j in [n+1].
struct MonotoneDLRep {
    std::size_t n = 0;
    std::vector<std::uint32_t> pi;
    std::vector<std::uint8_t> nu;
    std::vector<std::uint32_t> rank;  // rank[i] = π^{-1}(i), entry 0 unused

    MonotoneDLRep() = default;
    MonotoneDLRep(std::vector<std::uint32_t> pi_, std::vector<std::uint8_t> nu_)
        : n(pi_.size()), pi(std::move(pi_)), nu(std::move(nu_)), rank(n + 1, 0) {
        if (nu.size() != n + 1) throw ContractViolation("nu must have length n+1");
        for (std::size_t j = 0; j < n; ++j) {
            auto i = pi[j];
            if (i < 1 || i > n || rank[i] != 0) throw ContractViolation("pi is not a permutation");
            rank[i] = static_cast<std::uint32_t>(j + 1);
        }
        for (auto& b : nu) b = b ? 1 : 0;
    }

    std::uint32_t pi_at(std::size_t j) const { return pi[j - 1]; }
    bool nu_at(std::size_t j) const { return nu[j - 1] != 0; }
};

// Decision list (π, μ, ν); mu[i-1] = μ_i is indexed by variable.
struct GeneralDLRep {
    std::size_t n = 0;
    MonotoneDLRep order;  // carries π, ν and the rank table
    std::vector<std::uint8_t> mu;
    BitString mu_bar;  // bit i set iff μ_i = 0, so x_i = μ_i iff (x ⊕ mu_bar)_i = 1

    GeneralDLRep() = default;
    GeneralDLRep(std::vector<std::uint32_t> pi, std::vector<std::uint8_t> mu_, std::vector<std::uint8_t> nu)
        : n(pi.size()), order(std::move(pi), std::move(nu)), mu(std::move(mu_)), mu_bar(n) {
        if (mu.size() != n) throw ContractViolation("mu must have length n");
        for (std::size_t i = 1; i <= n; ++i) {
            mu[i - 1] = mu[i - 1] ? 1 : 0;
            if (!mu[i - 1]) mu_bar.set(i);
        }
    }
};

// min_π(x): smallest j with x_{π(j)} = 1, n+1 for 0^n. Sparse strings scan
// their support through the rank table; dense ones walk π until a hit.
inline std::uint32_t min_index(const MonotoneDLRep& rep, const BitString& x) {
    if (x.width() != rep.n) throw ContractViolation("min_index: width mismatch");
    const auto n = static_cast<std::uint32_t>(rep.n);
    std::size_t pc = x.popcount();
    if (pc == 0) return n + 1;
    if (pc * pc <= rep.n) {
        std::uint32_t best = n + 1;
        x.for_each_set([&](std::uint32_t i) { best = std::min(best, rep.rank[i]); });
        return best;
    }
    for (std::uint32_t j = 1; j <= n; ++j)
        if (x.test(rep.pi[j - 1])) return j;
    return n + 1;
}

// min_{π,μ}(x): smallest j with x_{π(j)} = μ_{π(j)}.
inline std::uint32_t min_index(const GeneralDLRep& rep, const BitString& x) {
    return min_index(rep.order, x ^ rep.mu_bar);
}

inline bool eval_mdl(const MonotoneDLRep& rep, const BitString& x) { return rep.nu_at(min_index(rep, x)); }
inline bool eval_dl(const GeneralDLRep& rep, const BitString& x) { return rep.order.nu_at(min_index(rep, x)); }

// The MDL g with g(x ⊕ r) = f(x), valid when r_{π(j)} ≠ μ_{π(j)} for all j.
inline MonotoneDLRep monotonize(const GeneralDLRep& rep, const BitString& r) {
    if (r != rep.mu_bar) throw ContractViolation("monotonize: r must differ from mu everywhere");
    return rep.order;
}

inline GeneralDLRep as_general(const MonotoneDLRep& rep) {
    return GeneralDLRep(rep.pi, std::vector<std::uint8_t>(rep.n, 1), rep.nu);
}

// x ≻_f y, i.e. f(x ∨ y) = f(x). Re-queries both endpoints (3 queries).
inline bool dominates(FunctionOracle& f, const BitString& x, const BitString& y) {
    bool fx = f.query(x);
    bool fy = f.query(y);
    if (fx == fy) throw PreconditionViolated("dominates: f(x) = f(y)");
    return f.query(x | y) == fx;
}

// 1-query variant for callers already holding f(x), with f(x) ≠ f(y) known.
inline bool dominates_cached(FunctionOracle& f, const BitString& x, bool fx, const BitString& y) {
    return f.query(x | y) == fx;
}

inline MonotoneDLRep random_mdl(std::size_t n, SeededRng& rng) {
    require(n >= 1, "random_mdl: n >= 1");
    std::vector<std::uint32_t> pi(n);
    std::iota(pi.begin(), pi.end(), 1u);
    rng.shuffle(std::span<std::uint32_t>(pi));
    std::vector<std::uint8_t> nu(n + 1);
    for (auto& b : nu) b = static_cast<std::uint8_t>(rng() >> 63);
    return MonotoneDLRep(std::move(pi), std::move(nu));
}

inline GeneralDLRep random_dl(std::size_t n, SeededRng& rng) {
    auto m = random_mdl(n, rng);
    std::vector<std::uint8_t> mu(n);
    for (auto& b : mu) b = static_cast<std::uint8_t>(rng() >> 63);
    return GeneralDLRep(std::move(m.pi), std::move(mu), std::move(m.nu));
}

inline FunctionOracle mdl_oracle(const MonotoneDLRep& rep, QueryLedger* ledger = nullptr) {
    return FunctionOracle(rep.n, [rep](const BitString& x) { return eval_mdl(rep, x); }, ledger);
}

inline FunctionOracle dl_oracle(const GeneralDLRep& rep, QueryLedger* ledger = nullptr) {
    return FunctionOracle(rep.n, [rep](const BitString& x) { return eval_dl(rep, x); }, ledger);
}

// Full truth table for n ≤ 20; entry index has bit i-1 set iff x_i = 1.
struct TruthTable {
    std::size_t n = 0;
    std::vector<std::uint8_t> value;

    TruthTable() = default;
    TruthTable(std::size_t n_, std::vector<std::uint8_t> v) : n(n_), value(std::move(v)) {
        if (n > 20) throw SizeRefused("truth table limited to n <= 20");
        if (value.size() != (std::size_t{1} << n)) throw ContractViolation("truth table size must be 2^n");
    }

    template <class F>
    static TruthTable tabulate(std::size_t n, F&& f) {
        if (n > 20) throw SizeRefused("truth table limited to n <= 20");
        std::vector<std::uint8_t> v(std::size_t{1} << n);
        for (std::size_t a = 0; a < v.size(); ++a) v[a] = f(from_index(a, n)) ? 1 : 0;
        return TruthTable(n, std::move(v));
    }

    static BitString from_index(std::size_t a, std::size_t n) {
        BitString x(n);
        if (n) x.data()[0] = a;
        return x;
    }
    static std::size_t to_index(const BitString& x) { return x.width() ? static_cast<std::size_t>(x.data()[0]) : 0; }

    bool operator()(const BitString& x) const { return value[to_index(x)] != 0; }
};

inline FunctionOracle table_oracle(const TruthTable& t, QueryLedger* ledger = nullptr) {
    return FunctionOracle(t.n, [t](const BitString& x) { return t(x); }, ledger);
}

}  // namespace sublin
