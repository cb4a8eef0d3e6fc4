#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bitstring.hpp"
#include "errors.hpp"
#include "rng.hpp"

namespace sublin {

inline constexpr double weight_tolerance = 1e-9;

namespace detail {

// Vose alias table: O(1) draws from a fixed discrete distribution.
class AliasTable {
public:
    AliasTable() = default;
    explicit AliasTable(const std::vector<double>& w) : prob_(w.size()), alias_(w.size()) {
        const std::size_t m = w.size();
        double total = 0;
        for (double x : w) total += x;
        std::vector<double> scaled(m);
        std::vector<std::uint32_t> small, large;
        for (std::size_t i = 0; i < m; ++i) {
            scaled[i] = w[i] * static_cast<double>(m) / total;
            (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
        }
        while (!small.empty() && !large.empty()) {
            auto s = small.back(); small.pop_back();
            auto l = large.back();
            prob_[s] = scaled[s];
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if (scaled[l] < 1.0) { large.pop_back(); small.push_back(l); }
        }
        for (auto i : large) { prob_[i] = 1.0; alias_[i] = i; }
        for (auto i : small) { prob_[i] = 1.0; alias_[i] = i; }
    }

    std::uint32_t draw(SeededRng& rng) const {
        auto i = static_cast<std::uint32_t>(rng.below(prob_.size()));
        return rng.uniform01() < prob_[i] ? i : alias_[i];
    }

    std::size_t size() const { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

inline void check_weights(const std::vector<double>& w) {
    if (w.empty()) throw ContractViolation("distribution has no atoms");
    double total = 0;
    for (double x : w) {
        if (!(x > 0.0) || x > 1.0 + weight_tolerance)
            throw ContractViolation("distribution weight outside (0,1]");
        total += x;
    }
    if (std::abs(total - 1.0) > weight_tolerance)
        throw ContractViolation("distribution weights do not sum to 1");
}

}  // namespace detail

// Explicit finite-support distribution over {0,1}^n.
class FiniteDistribution {
public:
    FiniteDistribution() = default;
    FiniteDistribution(std::size_t n, std::vector<BitString> atoms, std::vector<double> weights)
        : n_(n), atoms_(std::move(atoms)), weights_(std::move(weights)) {
        if (atoms_.size() != weights_.size()) throw ContractViolation("atoms/weights size mismatch");
        detail::check_weights(weights_);
        std::unordered_set<BitString, BitStringHash> seen;
        for (const auto& a : atoms_) {
            if (a.width() != n_) throw ContractViolation("atom width mismatch");
            if (!seen.insert(a).second) throw ContractViolation("duplicate atom");
        }
        alias_ = detail::AliasTable(weights_);
    }

    static FiniteDistribution uniform(std::size_t n, std::vector<BitString> atoms) {
        std::vector<double> w(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
        return FiniteDistribution(n, std::move(atoms), std::move(w));
    }

    static FiniteDistribution point(const BitString& x) {
        return FiniteDistribution(x.width(), {x}, {1.0});
    }

    std::size_t width() const { return n_; }
    std::size_t size() const { return atoms_.size(); }
    const BitString& atom(std::size_t i) const { return atoms_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<BitString>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }

    std::uint32_t sample_index(SeededRng& rng) const { return alias_.draw(rng); }
    const BitString& sample(SeededRng& rng) const { return atoms_[sample_index(rng)]; }

    template <class Pred>
    double mass(Pred&& pred) const {
        double m = 0;
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if (pred(atoms_[i])) m += weights_[i];
        return m;
    }

private:
    std::size_t n_ = 0;
    std::vector<BitString> atoms_;
    std::vector<double> weights_;
    detail::AliasTable alias_;
};

inline const BitString& sample(const FiniteDistribution& d, SeededRng& rng) { return d.sample(rng); }

// D ⊕ r: atom x of weight w becomes x ⊕ r with the same weight.
inline FiniteDistribution xor_shift(const FiniteDistribution& d, const BitString& r) {
    if (r.width() != d.width()) throw ContractViolation("xor_shift: width mismatch");
    std::vector<BitString> atoms;
    atoms.reserve(d.size());
    for (const auto& a : d.atoms()) atoms.push_back(a ^ r);
    return FiniteDistribution(d.width(), std::move(atoms), d.weights());
}

struct Edge {
    std::uint32_t u, v;  // u < v
    friend bool operator==(const Edge&, const Edge&) = default;
};

// Distribution over unordered pairs {u,v} of [n].
class PairDistribution {
public:
    PairDistribution() = default;
    PairDistribution(std::size_t n, std::vector<Edge> edges, std::vector<double> weights)
        : n_(n), edges_(std::move(edges)), weights_(std::move(weights)) {
        if (edges_.size() != weights_.size()) throw ContractViolation("edges/weights size mismatch");
        detail::check_weights(weights_);
        std::unordered_set<std::uint64_t> seen;
        for (auto& e : edges_) {
            if (e.u > e.v) std::swap(e.u, e.v);
            if (e.u < 1 || e.v > n_ || e.u == e.v) throw ContractViolation("bad pair");
            if (!seen.insert((std::uint64_t{e.u} << 32) | e.v).second)
                throw ContractViolation("duplicate pair");
        }
        alias_ = detail::AliasTable(weights_);
    }

    static PairDistribution uniform(std::size_t n, std::vector<Edge> edges) {
        std::vector<double> w(edges.size(), 1.0 / static_cast<double>(edges.size()));
        return PairDistribution(n, std::move(edges), std::move(w));
    }

    std::size_t width() const { return n_; }
    std::size_t size() const { return edges_.size(); }
    const Edge& edge(std::size_t i) const { return edges_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<double>& weights() const { return weights_; }

    std::uint32_t sample_index(SeededRng& rng) const { return alias_.draw(rng); }
    const Edge& sample(SeededRng& rng) const { return edges_[sample_index(rng)]; }

    // One draw from D*: an edge from D, then one endpoint uniformly.
    std::uint32_t sample_vertex(SeededRng& rng) const {
        const Edge& e = sample(rng);
        return (rng() >> 63) ? e.v : e.u;
    }

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> weights_;
    detail::AliasTable alias_;
};

// D*(i) = 1/2 * sum_j D({i,j}); entry 0 unused.
inline std::vector<double> vertex_marginal(const PairDistribution& d) {
    std::vector<double> m(d.width() + 1, 0.0);
    for (std::size_t k = 0; k < d.size(); ++k) {
        m[d.edge(k).u] += 0.5 * d.weight(k);
        m[d.edge(k).v] += 0.5 * d.weight(k);
    }
    return m;
}

}  // namespace sublin
