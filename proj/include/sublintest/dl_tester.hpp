#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bitstring.hpp"
#include "distribution.hpp"
#include "mdl_tester.hpp"
#include "oracle.hpp"

namespace sublin {

struct DlParams {
    double rounds_c = 100;          // outer rounds: c / eps
    double inner_c = 100;           // CheckDL runs per round: c * log(n/eps)
    double accept_c = 1;            // a round accepts once c * log(n/eps) runs accepted
    double t_amplify = 6;           // MonotoneDL* repetitions: c * log n
    std::uint64_t t_fixed = 0;      // overrides t_amplify when nonzero
    double testdl_samples_c = 10;   // TestDL estimation draws: c * log n / eps
    double testdl_reject_c = 2;     // TestDL rejects when c * log n / eps disagreements
    MdlParams mdl;
};

inline std::uint64_t amplify_count(std::size_t n, const DlParams& p = {}) {
    return p.t_fixed ? p.t_fixed : ceil_count(p.t_amplify * lg(static_cast<double>(n)));
}

// r^(i) = r ⊕ e_i.
inline BitString flip(const BitString& r, std::uint32_t i) {
    BitString x = r;
    x.flip(i);
    return x;
}

// Majority of independent monotone_dl_tester runs. Runs share the sampler's
// generator sequentially, so t = 1 reproduces a single run. Stops as soon as
// the majority is decided.
inline Verdict monotone_dl_amplified(FunctionOracle& f, Sampler& d, double eps, const DlParams& p = {}) {
    const std::uint64_t t = amplify_count(f.width(), p);
    std::uint64_t acc = 0, rej = 0;
    Verdict last_reject;
    while (acc <= t / 2 && rej < t - t / 2) {
        auto v = monotone_dl_tester(f, d, eps, p.mdl);
        if (v.accepted()) ++acc;
        else { ++rej; last_reject = v; }
    }
    Verdict out = acc > t / 2 ? Verdict::accept("mdl*")
                              : Verdict::reject("mdl*", last_reject.stage + ": " + last_reject.witness);
    if (auto* l = d.ledger()) out.ledger = l->report();
    return out;
}

// h(x) = b if g(x) = b, else g(x ∨ (r ⊕ z)); with g(x) = f(x ⊕ z) and b = f(r).
// Of the three cases, the second and third collapse to g(x ∨ (r ⊕ z)) because
// x ≻_g r ⊕ z iff g(x ∨ (r ⊕ z)) = g(x) = b̄.
class HybridFunction {
public:
    // Charges the one query for b = f(r).
    HybridFunction(FunctionOracle& f, const BitString& r, const BitString& z)
        : b_(f.query(r)), rz_(r ^ z), g_(shifted(f, z)) {}
    HybridFunction(const HybridFunction&) = delete;
    HybridFunction& operator=(const HybridFunction&) = delete;

    bool pivot_value() const { return b_; }

    bool eval_g(const BitString& x) { return g_.query(x); }
    bool eval_h(const BitString& x, bool gx) { return gx == b_ ? b_ : g_.query(x | rz_); }
    bool eval_h(const BitString& x) { return eval_h(x, g_.query(x)); }

    // Oracle view of h; must not outlive *this.
    FunctionOracle as_oracle() {
        return FunctionOracle(g_.width(), [this](const BitString& x) { return eval_h(x); });
    }

private:
    bool b_;
    BitString rz_;
    FunctionOracle g_;
};

inline Verdict test_dl(FunctionOracle& f, Sampler& d, double eps, const BitString& r, const BitString& z,
                       const DlParams& p = {}) {
    require(eps > 0 && eps < 1, "eps must lie in (0,1)");
    const double n = static_cast<double>(f.width());
    HybridFunction h(f, r, z);
    const FiniteDistribution dz = xor_shift(d.distribution(), z);
    Sampler sz(dz, d.rng(), d.ledger());
    const std::uint64_t draws = ceil_count(p.testdl_samples_c * lg(n) / eps);
    const std::uint64_t limit = ceil_count(p.testdl_reject_c * lg(n) / eps);
    std::uint64_t c = 0;
    for (std::uint64_t t = 0; t < draws; ++t) {
        const BitString& x = sz.draw();
        bool gx = h.eval_g(x);
        if (gx != h.eval_h(x, gx)) ++c;
    }
    auto fill = [&](Verdict v) {
        if (auto* l = d.ledger()) v.ledger = l->report();
        return v;
    };
    if (c >= limit) return fill(Verdict::reject("test-dl", std::to_string(c) + " of " + std::to_string(draws) +
                                                               " draws where g and h differ"));
    auto ho = h.as_oracle();
    auto v = monotone_dl_amplified(ho, sz, eps / 2, p);
    v.stage = "test-dl";
    return fill(v);
}

// Worst-case query count of index_search.
inline std::uint64_t index_search_bound(std::size_t n) { return 4 * ceil_log2(n) + 6; }

// Looks for i ∈ supp(y ⊕ r) with f(r ⊕ e_i) ≠ f(r).
inline std::optional<std::uint32_t> index_search(FunctionOracle& f, const BitString& r, const BitString& y) {
    const bool b = f.query(r);
    if (f.query(y) == b) throw PreconditionViolated("index_search: f(r) = f(y)");
    const std::vector<std::uint32_t> T0 = (y ^ r).support();
    // g(T) for T = T0[lo, hi).
    auto g = [&](std::size_t lo, std::size_t hi) {
        BitString x = r;
        for (std::size_t i = lo; i < hi; ++i) x.flip(T0[i]);
        return f.query(x);
    };
    struct Range { std::size_t lo, hi; };
    // Binary search inside [lo, hi) where g = b̄ is known. Returns the index
    // or the failure trail of unqueried complements (T_i \ T_{i+1} at left moves).
    auto search = [&](Range cur, std::vector<Range>* gaps) -> std::optional<std::uint32_t> {
        while (cur.hi - cur.lo > 1) {
            std::size_t mid = cur.lo + (cur.hi - cur.lo + 1) / 2;
            if (g(cur.lo, mid) != b) {
                if (gaps) gaps->push_back({mid, cur.hi});
                cur.hi = mid;
            } else if (g(mid, cur.hi) != b) {
                cur.lo = mid;
            } else {
                return std::nullopt;
            }
        }
        return T0[cur.lo];
    };
    std::vector<Range> gaps;
    if (auto i = search({0, T0.size()}, &gaps)) return i;
    for (const auto& gap : gaps)
        if (g(gap.lo, gap.hi) != b) return search(gap, nullptr);
    return std::nullopt;
}

inline Verdict check_dl(FunctionOracle& f, Sampler& d, double eps, const BitString& r, const DlParams& p = {}) {
    require(eps > 0 && eps < 1, "eps must lie in (0,1)");
    auto fill = [&](Verdict v) {
        if (auto* l = d.ledger()) v.ledger = l->report();
        v.stage = "check-dl/" + v.stage;
        return v;
    };
    auto g = shifted(f, r);
    const FiniteDistribution dr = xor_shift(d.distribution(), r);
    Sampler sr(dr, d.rng(), d.ledger());
    FunctionOracle::Recorder rec;
    g.set_recorder(&rec);
    auto first = monotone_dl_amplified(g, sr, eps, p);
    g.set_recorder(nullptr);
    if (first.accepted()) return fill(first);

    const bool b = f.query(r);
    std::vector<BitString> S;
    for (auto& x : rec.order)
        if (!x.none()) S.push_back(std::move(x));
    if (S.empty()) return fill(Verdict::reject("sketch", "no nonzero query recorded"));
    const auto tr = sketch_trace(g, S);

    // x*: the last b̄-string of g in X.
    std::optional<std::size_t> last_bbar;
    for (std::size_t i = 0; i < tr.order.size(); ++i)
        if ((tr.value[i] != 0) != b) last_bbar = i;
    if (last_bbar) {
        auto v = test_dl(f, d, eps, r, S[tr.order[*last_bbar]] ^ r, p);
        if (v.accepted()) return fill(v);
    }

    // A and B: last intervals of b̄- and b-strings.
    std::optional<std::pair<std::uint32_t, std::uint32_t>> A, B;
    for (const auto& iv : tr.intervals) {
        if ((tr.value[iv.first] != 0) != b) A = iv;
        else B = iv;
    }
    if (!A || !B) return fill(Verdict::reject("check-dl", "no interval of one of the two values"));
    BitString orB(f.width());
    for (auto k = B->first; k < B->second; ++k) orB |= S[tr.order[k]];

    std::optional<BitString> nil_z;
    std::optional<std::uint32_t> hit;
    for (auto k = A->first; k < A->second; ++k) {
        const BitString& x = S[tr.order[k]];
        auto i = index_search(f, r, x ^ r);
        if (!i) {
            if (!nil_z) nil_z = x;
        } else if (!hit && orB.test(*i)) {
            hit = i;
        }
    }
    if (nil_z) return fill(test_dl(f, d, eps, r, *nil_z ^ r, p));
    if (hit) return fill(test_dl(f, d, eps, r, flip(r, *hit), p));
    return fill(Verdict::reject("check-dl", "no index reaches the last b-interval"));
}

inline std::uint64_t dl_rounds(double eps, const DlParams& p = {}) { return ceil_count(p.rounds_c / eps); }
inline std::uint64_t dl_inner(std::size_t n, double eps, const DlParams& p = {}) {
    return ceil_count(p.inner_c * lg(static_cast<double>(n) / eps));
}
inline std::uint64_t dl_accept_threshold(std::size_t n, double eps, const DlParams& p = {}) {
    return ceil_count(p.accept_c * lg(static_cast<double>(n) / eps));
}

// Rounds stop early once their outcome is settled; the verdict is unchanged.
inline Verdict decision_list_tester(FunctionOracle& f, Sampler& d, double eps, const DlParams& p = {}) {
    require(eps > 0 && eps < 1, "eps must lie in (0,1)");
    const std::size_t n = f.width();
    const auto rounds = dl_rounds(eps, p), inner = dl_inner(n, eps, p), need = dl_accept_threshold(n, eps, p);
    auto fill = [&](Verdict v) {
        if (auto* l = d.ledger()) v.ledger = l->report();
        return v;
    };
    for (std::uint64_t round = 0; round < rounds; ++round) {
        const BitString r = d.draw();
        std::uint64_t c = 0;
        for (std::uint64_t t = 0; t < inner && c + (inner - t) >= need; ++t) {
            if (check_dl(f, d, eps, r, p).accepted()) ++c;
            if (c >= need) return fill(Verdict::accept("decision-list"));
        }
    }
    return fill(Verdict::reject("decision-list", "no round reached " + std::to_string(need) + " accepting runs"));
}

// Closed-form worst-case ledgers (saturating).
inline LedgerReport amplified_budget(std::size_t n, double eps, const DlParams& p = {}, std::uint64_t cost = 1) {
    auto one = mdl_budget(n, eps, p.mdl);
    const auto t = amplify_count(n, p);
    return {sat_mul(sat_mul(t, one.function_queries), cost), sat_mul(t, one.samples_drawn)};
}

inline LedgerReport test_dl_budget(std::size_t n, double eps, const DlParams& p = {}) {
    const double nn = static_cast<double>(n);
    const auto draws = ceil_count(p.testdl_samples_c * lg(nn) / eps);
    auto inner = amplified_budget(n, eps / 2, p, 2);  // each h-query costs at most 2
    return {sat_add(1 + 2 * draws, inner.function_queries), sat_add(draws, inner.samples_drawn)};
}

inline LedgerReport check_dl_budget(std::size_t n, double eps, const DlParams& p = {}) {
    auto first = amplified_budget(n, eps, p);
    const std::uint64_t m = first.function_queries;  // bound on |S|
    auto tdl = test_dl_budget(n, eps, p);
    // Line 2, the sketch replay on S (values, extraction, halving) and one IndexSearch per string.
    std::uint64_t q = sat_add(first.function_queries, 1);
    q = sat_add(q, sat_mul(m, 2 + (1 + ceil_log2(m))));
    q = sat_add(q, sat_mul(m, index_search_bound(n)));
    q = sat_add(q, sat_mul(2, tdl.function_queries));
    return {q, sat_add(first.samples_drawn, sat_mul(2, tdl.samples_drawn))};
}

inline LedgerReport dl_budget(std::size_t n, double eps, const DlParams& p = {}) {
    const auto rounds = dl_rounds(eps, p);
    const auto runs = sat_mul(rounds, dl_inner(n, eps, p));
    auto c = check_dl_budget(n, eps, p);
    return {sat_mul(runs, c.function_queries), sat_add(rounds, sat_mul(runs, c.samples_drawn))};
}

}  // namespace sublin
