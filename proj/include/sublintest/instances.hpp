#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bitstring.hpp"
#include "decision_list.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "exact.hpp"
#include "oracle.hpp"
#include "rng.hpp"

namespace sublin {

enum class GroundTruth { yes, far, unknown };

inline const char* to_string(GroundTruth g) {
    switch (g) {
        case GroundTruth::yes: return "yes";
        case GroundTruth::far: return "far";
        default: return "unknown";
    }
}

// Serializable description of a Boolean function.
//   mdl, groups4-yes, groups4-no: pi, nu
//   dl: pi, mu, nu
//   table: table (index bit i-1 = x_i)
// `overrides` replace the value on listed strings.
struct FunctionSpec {
    std::string type;
    std::size_t n = 0;
    std::vector<std::uint32_t> pi;
    std::vector<std::uint8_t> mu, nu, table;
    std::vector<std::pair<BitString, bool>> overrides;
};

// Serializable description of a comparison function over [n].
//   total: pi lists [n] from smallest to largest
//   pentagon: pi is the group permutation
//   table: orient[(u-1)*n + (v-1)] = 1 iff u <_σ v (u ≠ v)
struct ComparisonSpec {
    std::string type;
    std::size_t n = 0;
    std::vector<std::uint32_t> pi;
    std::vector<std::uint8_t> orient;
};

struct BoolBundle {
    std::string family;
    FunctionSpec fn;
    FiniteDistribution dist;
    GroundTruth truth = GroundTruth::unknown;
    double far_eps = 0;  // certified distance lower bound when truth == far
    std::uint64_t seed = 0;

    std::size_t n() const { return fn.n; }
};

struct CompareBundle {
    std::string family;
    ComparisonSpec cmp;
    PairDistribution dist;
    GroundTruth truth = GroundTruth::unknown;
    double far_eps = 0;
    std::uint64_t seed = 0;

    std::size_t n() const { return cmp.n; }
};

// Position j ∈ [n/2+1, n] that opens a group 4k+1, with supp(x) hitting the
// group exactly in {4k+1, 4k+4}.
inline bool groups4_override(const MonotoneDLRep& rep, const BitString& x, std::uint32_t j) {
    const auto n = static_cast<std::uint32_t>(rep.n);
    if (j <= n / 2 || j > n || (j - 1) % 4 != 0) return false;
    return x.test(rep.pi_at(j)) && !x.test(rep.pi_at(j + 1)) && !x.test(rep.pi_at(j + 2)) &&
           x.test(rep.pi_at(j + 3));
}

inline FunctionOracle::Target make_target(const FunctionSpec& spec) {
    using Overrides = std::unordered_map<BitString, bool, BitStringHash>;
    auto ov = std::make_shared<Overrides>();
    for (const auto& [x, v] : spec.overrides) (*ov)[x] = v;
    auto patch = [ov](auto base) -> FunctionOracle::Target {
        if (ov->empty()) return base;
        return [ov, base](const BitString& x) {
            auto it = ov->find(x);
            return it != ov->end() ? it->second : base(x);
        };
    };
    if (spec.type == "mdl" || spec.type == "groups4-yes") {
        auto rep = std::make_shared<MonotoneDLRep>(spec.pi, spec.nu);
        return patch([rep](const BitString& x) { return eval_mdl(*rep, x); });
    }
    if (spec.type == "groups4-no") {
        auto rep = std::make_shared<MonotoneDLRep>(spec.pi, spec.nu);
        return patch([rep](const BitString& x) {
            auto j = min_index(*rep, x);
            return groups4_override(*rep, x, j) || rep->nu_at(j);
        });
    }
    if (spec.type == "dl") {
        auto rep = std::make_shared<GeneralDLRep>(spec.pi, spec.mu, spec.nu);
        return patch([rep](const BitString& x) { return eval_dl(*rep, x); });
    }
    if (spec.type == "table") {
        auto t = std::make_shared<TruthTable>(spec.n, spec.table);
        return patch([t](const BitString& x) { return (*t)(x); });
    }
    throw ContractViolation("unknown function type: " + spec.type);
}

inline FunctionOracle make_oracle(const BoolBundle& b, QueryLedger* ledger = nullptr) {
    return FunctionOracle(b.n(), make_target(b.fn), ledger);
}

inline ComparisonOracle::Target make_less(const ComparisonSpec& spec) {
    const std::size_t n = spec.n;
    if (spec.type == "total" || spec.type == "pentagon") {
        auto rank = std::make_shared<std::vector<std::uint32_t>>(n + 1, 0);
        for (std::size_t j = 0; j < n; ++j) (*rank)[spec.pi[j]] = static_cast<std::uint32_t>(j);
        if (spec.type == "total")
            return [rank](std::uint32_t u, std::uint32_t v) { return (*rank)[u] < (*rank)[v]; };
        return [rank](std::uint32_t u, std::uint32_t v) {
            auto a = (*rank)[u], b = (*rank)[v];
            if (a / 5 != b / 5) return a / 5 < b / 5;
            // Within a group: a -> a+1 (solid cycle) and a -> a+2 (dotted chords), mod 5.
            auto d = (b % 5 + 5 - a % 5) % 5;
            return d == 1 || d == 2;
        };
    }
    if (spec.type == "table") {
        auto o = std::make_shared<std::vector<std::uint8_t>>(spec.orient);
        return [o, n](std::uint32_t u, std::uint32_t v) { return (*o)[(u - 1) * n + (v - 1)] != 0; };
    }
    throw ContractViolation("unknown comparison type: " + spec.type);
}

inline ComparisonOracle make_oracle(const CompareBundle& b, QueryLedger* ledger = nullptr) {
    return ComparisonOracle(b.n(), make_less(b.cmp), ledger);
}

inline std::vector<std::uint32_t> random_permutation(std::size_t n, SeededRng& rng) {
    std::vector<std::uint32_t> pi(n);
    std::iota(pi.begin(), pi.end(), 1u);
    rng.shuffle(std::span<std::uint32_t>(pi));
    return pi;
}

// `count` distinct pairs a < b from [n] (count ≤ n(n-1)/2).
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> random_pairs(std::size_t n, std::size_t count,
                                                                         SeededRng& rng) {
    const std::size_t pairs = n * (n - 1) / 2;
    require(count <= pairs, "random_pairs: count exceeds n(n-1)/2");
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    if (count * 2 > pairs) {
        for (std::uint32_t a = 1; a <= n; ++a)
            for (std::uint32_t b = a + 1; b <= n; ++b) out.emplace_back(a, b);
        rng.shuffle(std::span(out));
        out.resize(count);
        return out;
    }
    std::unordered_set<std::uint64_t> seen;
    while (out.size() < count) {
        auto a = static_cast<std::uint32_t>(rng.below(n) + 1), b = static_cast<std::uint32_t>(rng.below(n) + 1);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        if (seen.insert(std::uint64_t{a} << 32 | b).second) out.emplace_back(a, b);
    }
    return out;
}

// `count` distinct strings of weight 2 when that many exist, else `count`
// distinct strings of any weight (n ≤ 20).
inline std::vector<BitString> random_low_weight_support(std::size_t n, std::size_t count, SeededRng& rng) {
    std::vector<BitString> out;
    if (count <= n * (n - 1) / 2) {
        for (auto [a, b] : random_pairs(n, count, rng)) out.push_back(BitString::unit(a, n) | BitString::unit(b, n));
        return out;
    }
    if (n > 20 || count > (std::size_t{1} << n)) throw ContractViolation("support size exceeds 2^n");
    std::vector<std::size_t> idx(std::size_t{1} << n);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(std::span(idx));
    for (std::size_t i = 0; i < count; ++i) out.push_back(TruthTable::from_index(idx[i], n));
    return out;
}

inline CompareBundle gen_pentagon(std::size_t n, SeededRng& rng) {
    if (n == 0 || n % 5 != 0) throw ContractViolation("gen_pentagon: n must be a positive multiple of 5");
    CompareBundle b;
    b.family = "pentagon";
    b.cmp = {"pentagon", n, random_permutation(n, rng), {}};
    std::vector<Edge> edges;
    for (std::size_t g = 0; g < n / 5; ++g)
        for (std::size_t a = 0; a < 5; ++a)
            edges.push_back({b.cmp.pi[5 * g + a], b.cmp.pi[5 * g + (a + 1) % 5]});
    b.dist = PairDistribution::uniform(n, std::move(edges));
    b.truth = GroundTruth::far;
    b.far_eps = 0.2;
    if (n <= exact_ordering_max_n) b.far_eps = dist_total_orderings_dp(make_less(b.cmp), b.dist);
    return b;
}

inline CompareBundle gen_total_yes(std::size_t n, std::size_t support_size, SeededRng& rng) {
    require(n >= 2, "gen_total_yes: n >= 2");
    if (support_size == 0 || support_size > n * (n - 1) / 2)
        throw ContractViolation("gen_total_yes: support size out of range");
    CompareBundle b;
    b.family = "total-yes";
    b.cmp = {"total", n, random_permutation(n, rng), {}};
    std::vector<Edge> edges;
    for (auto [u, v] : random_pairs(n, support_size, rng)) edges.push_back({u, v});
    std::vector<double> w(edges.size());
    double total = 0;
    for (auto& x : w) total += (x = 0.5 + rng.uniform01());
    for (auto& x : w) x /= total;
    b.dist = PairDistribution(n, std::move(edges), std::move(w));
    b.truth = GroundTruth::yes;
    return b;
}

// Uniformly random orientation, for exact-oracle cross-checks.
inline CompareBundle gen_random_tournament(std::size_t n, std::size_t support_size, SeededRng& rng) {
    CompareBundle b = gen_total_yes(n, support_size, rng);
    b.family = "tournament";
    b.cmp = {"table", n, {}, std::vector<std::uint8_t>(n * n, 0)};
    for (std::uint32_t u = 1; u <= n; ++u)
        for (std::uint32_t v = u + 1; v <= n; ++v) {
            bool less = rng() >> 63;
            b.cmp.orient[(u - 1) * n + (v - 1)] = less;
            b.cmp.orient[(v - 1) * n + (u - 1)] = !less;
        }
    b.truth = GroundTruth::unknown;
    return b;
}

// Lower-bound pair: groups are π-positions 4k+1..4k+4 for k ∈ [n/8, n/4-1];
// rules 1..n/2 and the default are 1.
inline BoolBundle gen_groups4(std::size_t n, SeededRng& rng, bool yes_side) {
    if (n == 0 || n % 16 != 0) throw ContractViolation("gen_groups4: n must be a positive multiple of 16");
    BoolBundle b;
    b.family = yes_side ? "groups4-yes" : "groups4-no";
    auto pi = random_permutation(n, rng);
    std::vector<std::uint8_t> nu(n + 1, 1);
    for (std::size_t k = n / 8; k < n / 4; ++k) {
        // nu[j-1] = ν_j
        if (yes_side) { nu[4 * k] = 0; nu[4 * k + 1] = 1; nu[4 * k + 2] = 1; nu[4 * k + 3] = 0; }
        else { nu[4 * k] = 0; nu[4 * k + 1] = 1; nu[4 * k + 2] = 0; nu[4 * k + 3] = 1; }
    }
    std::vector<BitString> atoms;
    auto pair = [&](std::size_t a, std::size_t c) { return BitString::unit(pi[a - 1], n) | BitString::unit(pi[c - 1], n); };
    for (std::size_t k = n / 8; k < n / 4; ++k) {
        const std::size_t j = 4 * k;
        if (yes_side) {
            atoms.push_back(pair(j + 1, j + 2));
            atoms.push_back(pair(j + 1, j + 3));
            atoms.push_back(pair(j + 2, j + 4));
            atoms.push_back(pair(j + 3, j + 4));
        } else {
            atoms.push_back(pair(j + 1, j + 2));
            atoms.push_back(pair(j + 2, j + 3));
            atoms.push_back(pair(j + 3, j + 4));
            atoms.push_back(pair(j + 4, j + 1));
        }
    }
    b.fn = {yes_side ? "groups4-yes" : "groups4-no", n, std::move(pi), {}, std::move(nu), {}, {}};
    b.dist = FiniteDistribution::uniform(n, std::move(atoms));
    b.truth = yes_side ? GroundTruth::yes : GroundTruth::far;
    b.far_eps = yes_side ? 0 : 0.25;
    return b;
}

inline BoolBundle gen_mdl_yes(std::size_t n, std::size_t support_size, SeededRng& rng) {
    require(n >= 2, "gen_mdl_yes: n >= 2");
    auto rep = random_mdl(n, rng);
    BoolBundle b;
    b.family = "mdl-yes";
    b.fn = {"mdl", n, rep.pi, {}, rep.nu, {}, {}};
    b.dist = FiniteDistribution::uniform(n, random_low_weight_support(n, support_size, rng));
    b.truth = GroundTruth::yes;
    return b;
}

// Atoms are μ̄ ⊕ w with w of low weight, so x agrees with μ exactly on supp(w).
inline BoolBundle gen_dl_yes(std::size_t n, std::size_t support_size, SeededRng& rng) {
    require(n >= 2, "gen_dl_yes: n >= 2");
    auto rep = random_dl(n, rng);
    BoolBundle b;
    b.family = "dl-yes";
    b.fn = {"dl", n, rep.order.pi, rep.mu, rep.order.nu, {}, {}};
    auto support = random_low_weight_support(n, support_size, rng);
    for (auto& x : support) x ^= rep.mu_bar;
    b.dist = FiniteDistribution::uniform(n, std::move(support));
    b.truth = GroundTruth::yes;
    return b;
}

// Random truth table and random distribution on `support_size` strings (n ≤ 20).
inline BoolBundle gen_random_table(std::size_t n, std::size_t support_size, SeededRng& rng) {
    BoolBundle b;
    b.family = "table";
    std::vector<std::uint8_t> t(std::size_t{1} << n);
    for (auto& v : t) v = static_cast<std::uint8_t>(rng() >> 63);
    b.fn = {"table", n, {}, {}, {}, std::move(t), {}};
    std::vector<BitString> atoms = random_low_weight_support(n, std::min(support_size, std::size_t{1} << n), rng);
    std::vector<double> w(atoms.size());
    double total = 0;
    for (auto& x : w) total += (x = 0.1 + rng.uniform01());
    for (auto& x : w) x /= total;
    b.dist = FiniteDistribution(n, std::move(atoms), std::move(w));
    return b;
}

struct PlantResult {
    std::optional<BoolBundle> bundle;
    std::string infeasible;  // reason when bundle is empty
};

// Adds planted strings of total mass ε₀ to a yes MDL bundle (base weights are
// scaled by 1 - ε₀) and overrides f on some of them. Gadgets sit on windows of
// four consecutive ranks j..j+3 where ν alternates, so the base function is
// unchanged off the planted strings. With a = ν_j and {p,q} = e_π(p) ∨ e_π(q):
//   1: y = {j,j+3} (value a, MaxIndex π(j)) and x = {j,j+1} flipped to ā
//   2, 3: {j,j+1} flipped to ā, with e_π(j) and e_π(j+1) also planted
//   4: chain {j+1,j+2}, {j+2,j+3} closed by {j+1,j+3} flipped to a
//   5: 4-cycle {j,j+1}, {j+1,j+2}, {j+2,j+3}, {j+3,j} flipped to ā
inline PlantResult gen_planted_violation(const BoolBundle& base, int c, double eps0, SeededRng& rng) {
    if (base.fn.type != "mdl" || base.truth != GroundTruth::yes) return {std::nullopt, "base must be a yes MDL bundle"};
    if (c < 1 || c > 5) return {std::nullopt, "type must be in 1..5"};
    if (!(eps0 > 0 && eps0 < 1)) return {std::nullopt, "eps0 must lie in (0,1)"};
    const std::size_t n = base.n();
    if (n < 4) return {std::nullopt, "n too small for a gadget"};
    MonotoneDLRep rep(base.fn.pi, base.fn.nu);
    auto pair = [&](std::size_t p, std::size_t q) {
        return BitString::unit(rep.pi_at(p), n) | BitString::unit(rep.pi_at(q), n);
    };
    std::vector<std::pair<BitString, bool>> overrides;
    std::vector<BitString> planted;
    const std::size_t start = rng.below(4);
    for (std::size_t j = 1 + start; j + 3 <= n;) {
        const bool a = rep.nu_at(j);
        if (rep.nu_at(j + 1) == a || rep.nu_at(j + 2) != a || rep.nu_at(j + 3) == a) { ++j; continue; }
        switch (c) {
            case 1:
                planted.push_back(pair(j, j + 3));
                planted.push_back(pair(j, j + 1));
                overrides.emplace_back(pair(j, j + 1), !a);
                break;
            case 2:
            case 3:
                planted.push_back(pair(j, j + 1));
                planted.push_back(BitString::unit(rep.pi_at(j), n));
                planted.push_back(BitString::unit(rep.pi_at(j + 1), n));
                overrides.emplace_back(pair(j, j + 1), !a);
                break;
            case 4:
                planted.push_back(pair(j + 1, j + 2));
                planted.push_back(pair(j + 2, j + 3));
                planted.push_back(pair(j + 1, j + 3));
                overrides.emplace_back(pair(j + 1, j + 3), a);
                break;
            case 5:
                planted.push_back(pair(j, j + 1));
                planted.push_back(pair(j + 1, j + 2));
                planted.push_back(pair(j + 2, j + 3));
                planted.push_back(pair(j + 3, j));
                overrides.emplace_back(pair(j + 3, j), !a);
                break;
        }
        j += 4;
    }
    if (planted.empty()) return {std::nullopt, "no window of alternating rules"};
    std::unordered_map<BitString, double, BitStringHash> mass;
    for (std::size_t i = 0; i < base.dist.size(); ++i) mass[base.dist.atom(i)] += (1 - eps0) * base.dist.weight(i);
    for (const auto& x : planted) mass[x] += eps0 / static_cast<double>(planted.size());
    std::vector<BitString> atoms;
    std::vector<double> w;
    auto take = [&](const BitString& x) {
        if (auto it = mass.find(x); it != mass.end()) {
            atoms.push_back(x);
            w.push_back(it->second);
            mass.erase(it);
        }
    };
    for (const auto& x : base.dist.atoms()) take(x);
    for (const auto& x : planted) take(x);
    BoolBundle b;
    b.family = "planted-" + std::to_string(c);
    b.fn = base.fn;
    b.fn.overrides = std::move(overrides);
    b.dist = FiniteDistribution(n, std::move(atoms), std::move(w));
    b.truth = GroundTruth::unknown;
    b.seed = base.seed;
    if (n <= exact_dl_max_n) {
        // Small planted bundles are certified exactly.
        const double dist = dist_mdl(make_target(b.fn), b.dist).distance;
        b.truth = dist > 1e-12 ? GroundTruth::far : GroundTruth::yes;
        b.far_eps = dist > 1e-12 ? dist : 0;
    }
    return {std::move(b), {}};
}

}  // namespace sublin
