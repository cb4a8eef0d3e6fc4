#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bitstring.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace sublin {

// log2 clamped below at 1.
inline double lg(double x) { return std::max(1.0, std::log2(x)); }

// ceil for sample sizes and thresholds; absorbs floating noise such as
// 8*sqrt(1024)/0.1 = 2560.0000000000005 and never returns less than 1.
inline std::uint64_t ceil_count(double x) {
    double c = std::ceil(x - 1e-9);
    return c < 1.0 ? 1 : static_cast<std::uint64_t>(c);
}

inline std::uint64_t ceil_log2(std::uint64_t x) {
    return x <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(x - 1));
}

// Saturating arithmetic for closed-form budgets.
inline std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}
inline std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

struct LedgerReport {
    std::uint64_t function_queries = 0;
    std::uint64_t samples_drawn = 0;

    std::uint64_t total() const { return function_queries + samples_drawn; }
    LedgerReport& operator+=(const LedgerReport& o) {
        function_queries += o.function_queries;
        samples_drawn += o.samples_drawn;
        return *this;
    }
    friend LedgerReport operator+(LedgerReport a, const LedgerReport& b) { return a += b; }
    friend LedgerReport operator-(LedgerReport a, const LedgerReport& b) {
        a.function_queries -= b.function_queries;
        a.samples_drawn -= b.samples_drawn;
        return a;
    }
    friend bool operator==(const LedgerReport&, const LedgerReport&) = default;
};

class QueryLedger {
public:
    QueryLedger() = default;
    QueryLedger(std::optional<std::uint64_t> query_budget, std::optional<std::uint64_t> sample_budget)
        : query_budget_(query_budget), sample_budget_(sample_budget) {}

    void charge_query(std::uint64_t k = 1) {
        bump(r_.function_queries, k, query_budget_, BudgetExhausted::Counter::queries);
    }
    void charge_samples(std::uint64_t k = 1) {
        bump(r_.samples_drawn, k, sample_budget_, BudgetExhausted::Counter::samples);
    }

    LedgerReport report() const { return r_; }
    std::uint64_t function_queries() const { return r_.function_queries; }
    std::uint64_t samples_drawn() const { return r_.samples_drawn; }

private:
    static void bump(std::uint64_t& c, std::uint64_t k, const std::optional<std::uint64_t>& cap,
                     BudgetExhausted::Counter which) {
        if (cap && c + k > *cap) {
            c = *cap;
            throw BudgetExhausted(which, *cap);
        }
        c += k;
    }

    LedgerReport r_;
    std::optional<std::uint64_t> query_budget_;
    std::optional<std::uint64_t> sample_budget_;
};

inline LedgerReport merge(const LedgerReport& a, const LedgerReport& b) { return a + b; }

// Query-counted black box for f : {0,1}^n -> {0,1}. Derived oracles (shifts,
// hybrids) wrap a base oracle in the target closure and carry no ledger of
// their own, so every access is charged exactly once, to the base.
class FunctionOracle {
public:
    using Target = std::function<bool(const BitString&)>;

    FunctionOracle(std::size_t n, Target target, QueryLedger* ledger = nullptr)
        : n_(n), target_(std::move(target)), ledger_(ledger) {}

    bool query(const BitString& x) {
        if (x.width() != n_) throw ContractViolation("query: width mismatch");
        if (ledger_) ledger_->charge_query();
        if (recorder_) recorder_->add(x);
        return target_(x);
    }
    bool operator()(const BitString& x) { return query(x); }

    std::size_t width() const { return n_; }
    QueryLedger* ledger() const { return ledger_; }

    // Records each distinct queried string, in first-query order.
    struct Recorder {
        std::vector<BitString> order;
        std::unordered_set<BitString, BitStringHash> seen;
        void add(const BitString& x) {
            if (seen.insert(x).second) order.push_back(x);
        }
    };
    void set_recorder(Recorder* r) { recorder_ = r; }

private:
    std::size_t n_;
    Target target_;
    QueryLedger* ledger_;
    Recorder* recorder_ = nullptr;
};

// g(x) = f(x ⊕ r).
inline FunctionOracle shifted(FunctionOracle& f, BitString r) {
    return FunctionOracle(f.width(), [&f, r = std::move(r)](const BitString& x) { return f.query(x ^ r); });
}

// Off by default: testers are charged per access. Only misses reach the base.
inline FunctionOracle memoized(FunctionOracle& f) {
    auto cache = std::make_shared<std::unordered_map<BitString, bool, BitStringHash>>();
    return FunctionOracle(f.width(), [&f, cache](const BitString& x) {
        auto it = cache->find(x);
        if (it != cache->end()) return it->second;
        bool v = f.query(x);
        cache->emplace(x, v);
        return v;
    });
}

// Query-counted access to a comparison function over [n]; less(u, v) is u <_σ v.
class ComparisonOracle {
public:
    using Target = std::function<bool(std::uint32_t, std::uint32_t)>;

    ComparisonOracle(std::size_t n, Target less, QueryLedger* ledger = nullptr)
        : n_(n), less_(std::move(less)), ledger_(ledger) {}

    // true iff u <_σ v
    bool compare(std::uint32_t u, std::uint32_t v) {
        if (u == v) throw ContractViolation("compare: u == v");
        if (u < 1 || v < 1 || u > n_ || v > n_) throw ContractViolation("compare: index out of range");
        if (ledger_) ledger_->charge_query();
        // Orientation is a property of the unordered pair.
        return u < v ? less_(u, v) : !less_(v, u);
    }

    std::size_t width() const { return n_; }
    QueryLedger* ledger() const { return ledger_; }

private:
    std::size_t n_;
    Target less_;
    QueryLedger* ledger_;
};

// Sampling handle: draws from a FiniteDistribution, charging the ledger per draw.
class Sampler {
public:
    Sampler(const FiniteDistribution& d, SeededRng& rng, QueryLedger* ledger)
        : d_(&d), rng_(&rng), ledger_(ledger) {}

    const FiniteDistribution& distribution() const { return *d_; }
    SeededRng& rng() const { return *rng_; }
    QueryLedger* ledger() const { return ledger_; }

    std::uint32_t draw_index() {
        if (ledger_) ledger_->charge_samples();
        return d_->sample_index(*rng_);
    }
    const BitString& draw() { return d_->atom(draw_index()); }

    // m independent draws reduced to the set they form (distinct atom indices
    // in first-seen order). All m draws are charged.
    std::vector<std::uint32_t> draw_set(std::uint64_t m) {
        if (ledger_) ledger_->charge_samples(m);
        std::vector<char> seen(d_->size(), 0);
        std::vector<std::uint32_t> out;
        for (std::uint64_t t = 0; t < m; ++t) {
            auto i = d_->sample_index(*rng_);
            if (!seen[i]) { seen[i] = 1; out.push_back(i); }
        }
        return out;
    }

    const BitString& atom(std::uint32_t i) const { return d_->atom(i); }

private:
    const FiniteDistribution* d_;
    SeededRng* rng_;
    QueryLedger* ledger_;
};

class PairSampler {
public:
    PairSampler(const PairDistribution& d, SeededRng& rng, QueryLedger* ledger)
        : d_(&d), rng_(&rng), ledger_(ledger) {}

    const PairDistribution& distribution() const { return *d_; }

    Edge draw_edge() {
        if (ledger_) ledger_->charge_samples();
        return d_->sample(*rng_);
    }
    std::uint32_t draw_vertex() {
        if (ledger_) ledger_->charge_samples();
        return d_->sample_vertex(*rng_);
    }

    std::vector<Edge> draw_edge_set(std::uint64_t m) {
        if (ledger_) ledger_->charge_samples(m);
        std::vector<char> seen(d_->size(), 0);
        std::vector<Edge> out;
        for (std::uint64_t t = 0; t < m; ++t) {
            auto i = d_->sample_index(*rng_);
            if (!seen[i]) { seen[i] = 1; out.push_back(d_->edge(i)); }
        }
        return out;
    }
    std::vector<std::uint32_t> draw_vertex_set(std::uint64_t m) {
        if (ledger_) ledger_->charge_samples(m);
        std::vector<char> seen(d_->width() + 1, 0);
        std::vector<std::uint32_t> out;
        for (std::uint64_t t = 0; t < m; ++t) {
            auto u = d_->sample_vertex(*rng_);
            if (!seen[u]) { seen[u] = 1; out.push_back(u); }
        }
        return out;
    }

private:
    const PairDistribution* d_;
    SeededRng* rng_;
    QueryLedger* ledger_;
};

enum class Decision { accept, reject };

struct Verdict {
    Decision decision = Decision::accept;
    std::string stage;    // sub-procedure that decided
    std::string witness;  // rejection evidence, empty on accept
    LedgerReport ledger;

    bool accepted() const { return decision == Decision::accept; }
    static Verdict accept(std::string stage) { return {Decision::accept, std::move(stage), {}, {}}; }
    static Verdict reject(std::string stage, std::string witness) {
        return {Decision::reject, std::move(stage), std::move(witness), {}};
    }
};

}  // namespace sublin
