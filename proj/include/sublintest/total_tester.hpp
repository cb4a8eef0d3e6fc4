#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "distribution.hpp"
#include "oracle.hpp"

namespace sublin {

struct TotalParams {
    double c_sk = 8;          // sketch draws: c_sk * sqrt(n) / eps
    double c_lc = 8;          // local-cycle draws of S and of T: c_lc * sqrt(n) / eps
    double c_long = 100;      // long-cycle draws: c_long / eps
    double overcrowd = 1000;  // block capacity: overcrowd * log n
};

inline std::uint64_t total_sketch_draws(std::size_t n, double eps, const TotalParams& p = {}) {
    return ceil_count(p.c_sk * std::sqrt(static_cast<double>(n)) / eps);
}
inline std::uint64_t total_local_draws(std::size_t n, double eps, const TotalParams& p = {}) {
    return ceil_count(p.c_lc * std::sqrt(static_cast<double>(n)) / eps);
}
inline std::uint64_t total_long_draws(double eps, const TotalParams& p = {}) { return ceil_count(p.c_long / eps); }
inline std::uint64_t total_block_capacity(std::size_t n, const TotalParams& p = {}) {
    return static_cast<std::uint64_t>(std::floor(p.overcrowd * lg(static_cast<double>(n)) + 1e-9));
}

// (s^(1), ..., s^(k)), verified s^(i) <_σ s^(i+1) at construction.
class TotalSketch {
public:
    TotalSketch() = default;
    explicit TotalSketch(std::vector<std::uint32_t> elems) : s_(std::move(elems)) {
        for (std::size_t i = 0; i < s_.size(); ++i) pos_.emplace(s_[i], static_cast<std::uint32_t>(i + 1));
    }

    std::size_t size() const { return s_.size(); }
    std::uint32_t at(std::size_t i) const { return s_[i - 1]; }  // 1-based
    const std::vector<std::uint32_t>& elements() const { return s_; }
    std::uint32_t position(std::uint32_t u) const {
        auto it = pos_.find(u);
        return it == pos_.end() ? 0 : it->second;
    }

private:
    std::vector<std::uint32_t> s_;
    std::unordered_map<std::uint32_t, std::uint32_t> pos_;
};

struct TotalSketchOutcome {
    std::optional<TotalSketch> sketch;
    Verdict verdict;  // reject verdict when sketch is empty
};

namespace detail {

// Top-down merge sort driven by the comparison oracle. Terminates in
// O(m log m) comparisons whatever the comparator does.
inline void merge_sort(std::vector<std::uint32_t>& a, std::vector<std::uint32_t>& tmp, std::size_t lo,
                       std::size_t hi, ComparisonOracle& sigma) {
    if (hi - lo < 2) return;
    std::size_t mid = lo + (hi - lo) / 2;
    merge_sort(a, tmp, lo, mid, sigma);
    merge_sort(a, tmp, mid, hi, sigma);
    std::size_t i = lo, j = mid, o = lo;
    while (i < mid && j < hi) {
        if (sigma.compare(a[j], a[i])) tmp[o++] = a[j++];
        else tmp[o++] = a[i++];
    }
    while (i < mid) tmp[o++] = a[i++];
    while (j < hi) tmp[o++] = a[j++];
    std::copy(tmp.begin() + lo, tmp.begin() + hi, a.begin() + lo);
}

}  // namespace detail

inline TotalSketchOutcome sketch_total(ComparisonOracle& sigma, PairSampler& d, double eps,
                                       const TotalParams& p = {}) {
    require(eps > 0 && eps < 1, "eps must lie in (0,1)");
    auto elems = d.draw_vertex_set(total_sketch_draws(sigma.width(), eps, p));
    std::vector<std::uint32_t> tmp(elems.size());
    detail::merge_sort(elems, tmp, 0, elems.size(), sigma);
    for (std::size_t i = 0; i + 1 < elems.size(); ++i) {
        if (!sigma.compare(elems[i], elems[i + 1]))
            return {std::nullopt, Verdict::reject("sketch", "adjacent " + std::to_string(elems[i]) + " " +
                                                                std::to_string(elems[i + 1]))};
    }
    return {TotalSketch(std::move(elems)), Verdict::accept("sketch")};
}

// Block index in [0:k]; at most ceil(log2 k) + 2 comparisons.
inline std::uint32_t find_block_total(ComparisonOracle& sigma, const TotalSketch& sk, std::uint32_t u) {
    const auto k = static_cast<std::uint32_t>(sk.size());
    if (k == 0) return 0;
    if (auto i = sk.position(u)) return i;
    if (sigma.compare(u, sk.at(1))) return 0;
    if (sigma.compare(sk.at(k), u)) return k;
    std::uint32_t upper = k, lower = 1;
    while (upper - lower > 1) {
        std::uint32_t mid = (upper + lower) / 2;
        if (sigma.compare(u, sk.at(mid))) upper = mid;
        else lower = mid;
    }
    // s^(lower) <_σ u <_σ s^(lower+1) at loop exit.
    return lower;
}

inline Verdict test_long_cycles(ComparisonOracle& sigma, PairSampler& d, double eps, const TotalSketch& sk,
                                const TotalParams& p = {}) {
    auto m = total_long_draws(eps, p);
    for (std::uint64_t t = 0; t < m; ++t) {
        Edge e = d.draw_edge();
        auto [a, b] = sigma.compare(e.u, e.v) ? std::pair{e.u, e.v} : std::pair{e.v, e.u};
        auto ba = find_block_total(sigma, sk, a);
        auto bb = find_block_total(sigma, sk, b);
        if (ba > bb)
            return Verdict::reject("long-cycles", "long-edge " + std::to_string(a) + " " + std::to_string(b) +
                                                      " blocks " + std::to_string(ba) + " " + std::to_string(bb));
    }
    return Verdict::accept("long-cycles");
}

inline Verdict test_local_cycles(ComparisonOracle& sigma, PairSampler& d, double eps, const TotalSketch& sk,
                                 const TotalParams& p = {}) {
    const std::size_t n = sigma.width();
    auto m = total_local_draws(n, eps, p);
    auto S = d.draw_edge_set(m);
    auto T = d.draw_vertex_set(m);

    struct Directed { std::uint32_t u, v, block; };  // u <_σ v
    std::vector<Directed> edges;
    edges.reserve(S.size());
    for (const auto& e : S) {
        auto [a, b] = sigma.compare(e.u, e.v) ? std::pair{e.u, e.v} : std::pair{e.v, e.u};
        auto ba = find_block_total(sigma, sk, a);
        auto bb = find_block_total(sigma, sk, b);
        if (ba == bb) edges.push_back({a, b, ba});
    }

    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> by_block;
    const auto cap = total_block_capacity(n, p);
    for (auto w : T) {
        auto& bucket = by_block[find_block_total(sigma, sk, w)];
        bucket.push_back(w);
        if (bucket.size() > cap)
            return Verdict::reject("local-cycles", "overcrowded block with " + std::to_string(bucket.size()) +
                                                       " elements");
    }

    for (const auto& e : edges) {
        auto it = by_block.find(e.block);
        if (it == by_block.end()) continue;
        for (auto w : it->second) {
            if (w == e.u || w == e.v) continue;
            // Triangle iff v <_σ w and w <_σ u.
            if (sigma.compare(e.v, w) && sigma.compare(w, e.u))
                return Verdict::reject("local-cycles", "triangle " + std::to_string(e.u) + " " +
                                                           std::to_string(e.v) + " " + std::to_string(w));
        }
    }
    return Verdict::accept("local-cycles");
}

inline Verdict test_total_ordering(ComparisonOracle& sigma, PairSampler& d, double eps, const TotalParams& p = {}) {
    auto fill = [&](Verdict v) {
        if (auto* l = sigma.ledger()) v.ledger = l->report();
        return v;
    };
    auto sk = sketch_total(sigma, d, eps, p);
    if (!sk.sketch) return fill(sk.verdict);
    if (auto v = test_long_cycles(sigma, d, eps, *sk.sketch, p); !v.accepted()) return fill(v);
    if (auto v = test_local_cycles(sigma, d, eps, *sk.sketch, p); !v.accepted()) return fill(v);
    return fill(Verdict::accept("total"));
}

// Worst-case ledger of test_total_ordering. A find_block_total call costs at
// most ceil(log2 k) + 2 comparisons with k <= m_sk; each sampled edge is
// oriented once and located twice.
inline LedgerReport total_budget(std::size_t n, double eps, const TotalParams& p = {}) {
    const auto m_sk = total_sketch_draws(n, eps, p);
    const auto m_lc = total_local_draws(n, eps, p);
    const auto m_long = total_long_draws(eps, p);
    const auto fb = ceil_log2(m_sk) + 2;
    LedgerReport b;
    b.function_queries = m_sk * ceil_log2(m_sk) + m_sk  // merge sort + adjacency
                         + m_long * (1 + 2 * fb)         // long cycles
                         + m_lc * (1 + 2 * fb) + m_lc * fb + 2 * m_lc * total_block_capacity(n, p);
    b.samples_drawn = m_sk + m_long + 2 * m_lc;
    return b;
}

}  // namespace sublin
