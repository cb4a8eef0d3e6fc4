#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "bitstring.hpp"
#include "decision_list.hpp"
#include "distribution.hpp"
#include "errors.hpp"

namespace sublin {

inline constexpr std::size_t exact_ordering_max_n = 10;
inline constexpr std::size_t exact_dl_max_n = 6;
inline constexpr std::size_t exact_cover_max_component = 24;

struct OrderingDistance {
    double distance = 0;
    std::vector<std::uint32_t> witness;  // nearest total ordering, smallest first
    std::uint64_t enumeration_size = 0;
};

struct MdlDistance {
    double distance = 0;
    MonotoneDLRep witness;
    std::uint64_t enumeration_size = 0;
};

struct DlDistance {
    double distance = 0;
    GeneralDLRep witness;
    std::uint64_t enumeration_size = 0;
};

using LessFn = std::function<bool(std::uint32_t, std::uint32_t)>;
using BoolFn = std::function<bool(const BitString&)>;

// Minimum over all n! orderings τ of the D-mass of pairs where τ and σ disagree.
inline OrderingDistance dist_total_orderings(const LessFn& less, const PairDistribution& d) {
    const std::size_t n = d.width();
    if (n > exact_ordering_max_n) throw SizeRefused("dist_total_orderings: n > 10");
    struct Oriented { std::uint32_t lo, hi; double w; };  // lo <_σ hi
    std::vector<Oriented> edges;
    for (std::size_t k = 0; k < d.size(); ++k) {
        auto [u, v] = d.edge(k);
        if (less(u, v)) edges.push_back({u, v, d.weight(k)});
        else edges.push_back({v, u, d.weight(k)});
    }
    std::vector<std::uint32_t> perm(n), pos(n + 1);
    std::iota(perm.begin(), perm.end(), 1u);
    OrderingDistance best;
    best.distance = std::numeric_limits<double>::infinity();
    do {
        for (std::size_t j = 0; j < n; ++j) pos[perm[j]] = static_cast<std::uint32_t>(j);
        double cost = 0;
        for (const auto& e : edges)
            if (pos[e.lo] > pos[e.hi]) cost += e.w;
        ++best.enumeration_size;
        if (cost < best.distance - 1e-15) {
            best.distance = cost;
            best.witness = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Same quantity by dynamic programming over the set of elements placed first.
inline double dist_total_orderings_dp(const LessFn& less, const PairDistribution& d) {
    const std::size_t n = d.width();
    if (n > 20) throw SizeRefused("dist_total_orderings_dp: n > 20");
    // back[v][u] = D-mass of {u, v} when v <_σ u.
    std::vector<std::vector<double>> back(n, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < d.size(); ++k) {
        auto [u, v] = d.edge(k);
        if (less(u, v)) back[u - 1][v - 1] += d.weight(k);
        else back[v - 1][u - 1] += d.weight(k);
    }
    const std::size_t full = std::size_t{1} << n;
    std::vector<double> dp(full, std::numeric_limits<double>::infinity());
    dp[0] = 0;
    for (std::size_t S = 0; S < full; ++S) {
        if (dp[S] == std::numeric_limits<double>::infinity()) continue;
        for (std::size_t v = 0; v < n; ++v) {
            if (S >> v & 1) continue;
            // Placing v after every u in S violates pairs with v <_σ u.
            double add = 0;
            for (std::size_t u = 0; u < n; ++u)
                if (S >> u & 1) add += back[v][u];
            dp[S | std::size_t{1} << v] = std::min(dp[S | std::size_t{1} << v], dp[S] + add);
        }
    }
    return dp[full - 1];
}

namespace detail {

// For a fixed rule order, the best ν puts each rule on the heavier side of
// the atoms it fires on.
template <class MinIndex>
double best_nu(const BoolFn& f, const FiniteDistribution& d, std::size_t n, MinIndex&& min_index_of,
               std::vector<std::uint8_t>& nu) {
    std::vector<double> w0(n + 2, 0.0), w1(n + 2, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        auto j = min_index_of(d.atom(i));
        (f(d.atom(i)) ? w1 : w0)[j] += d.weight(i);
    }
    nu.assign(n + 1, 1);
    double cost = 0;
    for (std::size_t j = 1; j <= n + 1; ++j) {
        nu[j - 1] = w1[j] >= w0[j] ? 1 : 0;
        cost += std::min(w0[j], w1[j]);
    }
    return cost;
}

}  // namespace detail

inline MdlDistance dist_mdl(const BoolFn& f, const FiniteDistribution& d) {
    const std::size_t n = d.width();
    if (n > exact_dl_max_n) throw SizeRefused("dist_mdl: n > 6");
    std::vector<std::uint32_t> pi(n);
    std::iota(pi.begin(), pi.end(), 1u);
    std::vector<std::uint8_t> nu;
    MdlDistance best;
    best.distance = std::numeric_limits<double>::infinity();
    do {
        MonotoneDLRep rep(pi, std::vector<std::uint8_t>(n + 1, 0));
        double cost = detail::best_nu(f, d, n, [&](const BitString& x) { return min_index(rep, x); }, nu);
        ++best.enumeration_size;
        if (cost < best.distance - 1e-15) {
            best.distance = cost;
            best.witness = MonotoneDLRep(pi, nu);
        }
    } while (std::next_permutation(pi.begin(), pi.end()));
    return best;
}

inline DlDistance dist_dl(const BoolFn& f, const FiniteDistribution& d) {
    const std::size_t n = d.width();
    if (n > exact_dl_max_n) throw SizeRefused("dist_dl: n > 6");
    std::vector<std::uint32_t> pi(n);
    std::iota(pi.begin(), pi.end(), 1u);
    std::vector<std::uint8_t> nu;
    DlDistance best;
    best.distance = std::numeric_limits<double>::infinity();
    do {
        MonotoneDLRep order(pi, std::vector<std::uint8_t>(n + 1, 0));
        for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
            BitString mu_bar(n);  // bit i set iff μ_i = 0
            for (std::size_t i = 0; i < n; ++i)
                if (!(m >> i & 1)) mu_bar.set(i + 1);
            double cost = detail::best_nu(
                f, d, n, [&](const BitString& x) { return min_index(order, x ^ mu_bar); }, nu);
            ++best.enumeration_size;
            if (cost < best.distance - 1e-15) {
                best.distance = cost;
                std::vector<std::uint8_t> mu(n);
                for (std::size_t i = 0; i < n; ++i) mu[i] = static_cast<std::uint8_t>(m >> i & 1);
                best.witness = GeneralDLRep(pi, std::move(mu), nu);
            }
        }
    } while (std::next_permutation(pi.begin(), pi.end()));
    return best;
}

// Hypergraph on vertices 0..num_vertices-1; edges of any size (2 for graphs).
struct Hypergraph {
    std::size_t num_vertices = 0;
    std::vector<std::vector<std::uint32_t>> edges;
};

namespace detail {

inline void cover_search(const std::vector<std::uint32_t>& masks, const std::vector<double>& w,
                         std::uint32_t chosen, double cost, double& best) {
    if (cost >= best) return;
    for (auto e : masks) {
        if (e & chosen) continue;
        // Branch on which endpoint of the first uncovered edge enters the cover.
        for (std::uint32_t rest = e; rest; rest &= rest - 1) {
            auto v = static_cast<std::uint32_t>(std::countr_zero(rest));
            cover_search(masks, w, chosen | (1u << v), cost + w[v], best);
        }
        return;
    }
    best = cost;
}

}  // namespace detail

// Minimum total weight of a vertex cover. Components are solved separately;
// each must have at most 24 vertices.
inline double min_vertex_cover_weight(const Hypergraph& g, const std::vector<double>& weight) {
    if (weight.size() != g.num_vertices) throw ContractViolation("vertex cover: weight size mismatch");
    std::vector<std::uint32_t> comp(g.num_vertices);
    std::iota(comp.begin(), comp.end(), 0u);
    std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t x) {
        return comp[x] == x ? x : comp[x] = find(comp[x]);
    };
    for (const auto& e : g.edges) {
        if (e.empty()) throw ContractViolation("vertex cover: empty edge");
        for (auto v : e) {
            if (v >= g.num_vertices) throw ContractViolation("vertex cover: vertex out of range");
            comp[find(v)] = find(e[0]);
        }
    }
    double total = 0;
    std::vector<std::vector<std::uint32_t>> members(g.num_vertices);
    for (std::uint32_t v = 0; v < g.num_vertices; ++v) members[find(v)].push_back(v);
    for (std::uint32_t root = 0; root < g.num_vertices; ++root) {
        const auto& vs = members[root];
        if (vs.empty()) continue;
        std::vector<std::uint32_t> local(g.num_vertices, 0);
        for (std::uint32_t i = 0; i < vs.size(); ++i) local[vs[i]] = i;
        std::vector<std::uint32_t> masks;
        for (const auto& e : g.edges) {
            if (find(e[0]) != root) continue;
            if (vs.size() > exact_cover_max_component)
                throw SizeRefused("vertex cover: component with more than 24 vertices");
            std::uint32_t m = 0;
            for (auto v : e) m |= 1u << local[v];
            masks.push_back(m);
        }
        if (masks.empty()) continue;
        std::vector<double> w(vs.size());
        for (std::uint32_t i = 0; i < vs.size(); ++i) w[i] = weight[vs[i]];
        double best = std::numeric_limits<double>::infinity();
        detail::cover_search(masks, w, 0, 0.0, best);
        total += best;
    }
    return total;
}

}  // namespace sublin
