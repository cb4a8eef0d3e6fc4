#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "distribution.hpp"
#include "errors.hpp"
#include "exact.hpp"
#include "rng.hpp"

namespace sublin {

// Bipartite graph on U = {0..u_size-1}, V = {0..v_size-1}. mu has u_size + 1
// entries and nu has v_size + 1; the last entry is the null symbol #.
struct BipartiteExperiment {
    std::size_t u_size = 0, v_size = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<double> mu, nu;
    std::uint64_t m = 1, m2 = 1;
    std::uint64_t trials = 1000;
};

// k-uniform hypergraph on V = {0..v_size-1}; mu has v_size + 1 entries.
struct HypergraphExperiment {
    std::size_t v_size = 0;
    std::size_t k = 3;
    std::vector<std::vector<std::uint32_t>> edges;
    std::vector<double> mu;
    std::uint64_t m = 1;
    std::uint64_t trials = 1000;
};

namespace detail {

inline AliasTable checked_alias(const std::vector<double>& w, std::size_t expect, const char* what) {
    if (w.size() != expect) throw ContractViolation(what);
    double total = 0;
    for (double x : w) {
        if (x < 0) throw ContractViolation(what);
        total += x;
    }
    if (std::abs(total - 1.0) > weight_tolerance) throw ContractViolation(what);
    // Zero-weight entries stay in the table with probability 0.
    return AliasTable(w);
}

}  // namespace detail

// Smallest μ(C1) + ν(C2) over vertex covers C1 ⊔ C2.
inline double certified_eps(const BipartiteExperiment& e) {
    Hypergraph g{e.u_size + e.v_size, {}};
    for (auto [u, v] : e.edges) g.edges.push_back({u, static_cast<std::uint32_t>(e.u_size + v)});
    std::vector<double> w(g.num_vertices);
    for (std::size_t i = 0; i < e.u_size; ++i) w[i] = e.mu[i];
    for (std::size_t j = 0; j < e.v_size; ++j) w[e.u_size + j] = e.nu[j];
    return min_vertex_cover_weight(g, w);
}

inline double certified_eps(const HypergraphExperiment& e) {
    Hypergraph g{e.v_size, e.edges};
    return min_vertex_cover_weight(g, std::vector<double>(e.mu.begin(), e.mu.begin() + e.v_size));
}

// m·m' ≥ 100|U|/ε² and m, m' ≥ 100/ε.
inline bool in_regime(const BipartiteExperiment& e, double eps) {
    const double m = static_cast<double>(e.m), m2 = static_cast<double>(e.m2);
    return eps > 0 && m * m2 >= 100.0 * static_cast<double>(e.u_size) / (eps * eps) && m >= 100.0 / eps &&
           m2 >= 100.0 / eps;
}

// m ≥ 10k²|V|^{(k-1)/k}/ε.
inline double hypergraph_min_samples(std::size_t v_size, std::size_t k, double eps) {
    const double kk = static_cast<double>(k);
    return 10.0 * kk * kk * std::pow(static_cast<double>(v_size), (kk - 1) / kk) / eps;
}
inline bool in_regime(const HypergraphExperiment& e, double eps) {
    return eps > 0 && static_cast<double>(e.m) >= hypergraph_min_samples(e.v_size, e.k, eps);
}

// Fraction of trials in which some x ∈ S, y ∈ S' form an edge.
inline double run_bipartite_birthday(const BipartiteExperiment& e, SeededRng& rng) {
    auto mu = detail::checked_alias(e.mu, e.u_size + 1, "bipartite: mu must be a distribution over U and #");
    auto nu = detail::checked_alias(e.nu, e.v_size + 1, "bipartite: nu must be a distribution over V and #");
    for (auto [u, v] : e.edges)
        if (u >= e.u_size || v >= e.v_size) throw ContractViolation("bipartite: edge out of range");
    std::uint64_t hits = 0;
    std::vector<char> in_s(e.u_size + 1), in_s2(e.v_size + 1);
    for (std::uint64_t t = 0; t < e.trials; ++t) {
        SeededRng r = rng.child(t);
        std::fill(in_s.begin(), in_s.end(), 0);
        std::fill(in_s2.begin(), in_s2.end(), 0);
        for (std::uint64_t i = 0; i < e.m; ++i) in_s[mu.draw(r)] = 1;
        for (std::uint64_t i = 0; i < e.m2; ++i) in_s2[nu.draw(r)] = 1;
        for (auto [u, v] : e.edges)
            if (in_s[u] && in_s2[v]) { ++hits; break; }
    }
    return static_cast<double>(hits) / static_cast<double>(e.trials);
}

// Fraction of trials in which the sample set contains every vertex of some edge.
inline double run_hypergraph_birthday(const HypergraphExperiment& e, SeededRng& rng) {
    if (e.k != 3 && e.k != 4) throw ContractViolation("hypergraph: k must be 3 or 4");
    auto mu = detail::checked_alias(e.mu, e.v_size + 1, "hypergraph: mu must be a distribution over V and #");
    for (const auto& edge : e.edges) {
        if (edge.size() != e.k) throw ContractViolation("hypergraph: edge size differs from k");
        for (auto v : edge)
            if (v >= e.v_size) throw ContractViolation("hypergraph: vertex out of range");
    }
    std::uint64_t hits = 0;
    std::vector<char> in_s(e.v_size + 1);
    for (std::uint64_t t = 0; t < e.trials; ++t) {
        SeededRng r = rng.child(t);
        std::fill(in_s.begin(), in_s.end(), 0);
        for (std::uint64_t i = 0; i < e.m; ++i) in_s[mu.draw(r)] = 1;
        for (const auto& edge : e.edges) {
            bool all = true;
            for (auto v : edge) all = all && in_s[v];
            if (all) { ++hits; break; }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(e.trials);
}

// Two sample sets of sizes m, m' from p over [n+1]; event: some i ∈ [n] in both.
inline double run_classical_bipartite(const std::vector<double>& p, std::uint64_t m, std::uint64_t m2,
                                      std::uint64_t trials, SeededRng& rng) {
    if (p.size() < 1) throw ContractViolation("classical: p must cover [n+1]");
    auto table = detail::checked_alias(p, p.size(), "classical: p must be a distribution");
    const std::size_t n = p.size() - 1;
    std::uint64_t hits = 0;
    std::vector<char> seen(n + 1);
    for (std::uint64_t t = 0; t < trials; ++t) {
        SeededRng r = rng.child(t);
        std::fill(seen.begin(), seen.end(), 0);
        for (std::uint64_t i = 0; i < m; ++i) seen[table.draw(r)] = 1;
        for (std::uint64_t i = 0; i < m2; ++i) {
            auto x = table.draw(r);
            if (x < n && seen[x]) { ++hits; break; }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

// m samples from [n+1] × [k] with mass p_i on each (i, j), Σ p_i = 1/k;
// event: some i ∈ [n] has every (i, j) drawn.
inline double run_classical_hypergraph(const std::vector<double>& p, std::size_t k, std::uint64_t m,
                                       std::uint64_t trials, SeededRng& rng) {
    if (p.empty() || k == 0) throw ContractViolation("classical: p must cover [n+1] and k >= 1");
    std::vector<double> cells;
    for (double x : p)
        for (std::size_t j = 0; j < k; ++j) cells.push_back(x);
    auto table = detail::checked_alias(cells, cells.size(), "classical: k * sum(p) must be 1");
    const std::size_t n = p.size() - 1;
    std::uint64_t hits = 0;
    std::vector<char> seen(cells.size());
    for (std::uint64_t t = 0; t < trials; ++t) {
        SeededRng r = rng.child(t);
        std::fill(seen.begin(), seen.end(), 0);
        for (std::uint64_t s = 0; s < m; ++s) seen[table.draw(r)] = 1;
        for (std::size_t i = 0; i < n; ++i) {
            bool all = true;
            for (std::size_t j = 0; j < k; ++j) all = all && seen[i * k + j];
            if (all) { ++hits; break; }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace sublin
