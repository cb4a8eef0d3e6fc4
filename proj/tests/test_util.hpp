#pragma once

#include <cstdint>
#include <vector>

#include "sublintest.hpp"

namespace sublin::testutil {

// Rank of every variable from a plain linear scan of π.
inline std::uint32_t naive_min_index(const std::vector<std::uint32_t>& pi, const BitString& x) {
    for (std::size_t j = 0; j < pi.size(); ++j)
        if (x.test(pi[j])) return static_cast<std::uint32_t>(j + 1);
    return static_cast<std::uint32_t>(pi.size() + 1);
}

inline bool naive_eval_dl(const std::vector<std::uint32_t>& pi, const std::vector<std::uint8_t>& mu,
                          const std::vector<std::uint8_t>& nu, const BitString& x) {
    for (std::size_t j = 0; j < pi.size(); ++j)
        if (x.test(pi[j]) == (mu[pi[j] - 1] != 0)) return nu[j] != 0;
    return nu[pi.size()] != 0;
}

inline std::uint32_t naive_dl_min_index(const std::vector<std::uint32_t>& pi, const std::vector<std::uint8_t>& mu,
                                        const BitString& x) {
    for (std::size_t j = 0; j < pi.size(); ++j)
        if (x.test(pi[j]) == (mu[pi[j] - 1] != 0)) return static_cast<std::uint32_t>(j + 1);
    return static_cast<std::uint32_t>(pi.size() + 1);
}

inline BitString random_string(std::size_t n, SeededRng& rng, double density = 0.5) {
    BitString x(n);
    for (std::size_t i = 1; i <= n; ++i)
        if (rng.bernoulli(density)) x.set(i);
    return x;
}

inline BitString random_nonzero(std::size_t n, SeededRng& rng, double density = 0.5) {
    for (;;) {
        auto x = random_string(n, rng, density);
        if (!x.none()) return x;
    }
}

// Strings of weight 1..w_max on random variables.
inline BitString random_sparse(std::size_t n, std::size_t w_max, SeededRng& rng) {
    BitString x(n);
    const auto w = 1 + rng.below(w_max);
    for (std::uint64_t t = 0; t < w; ++t) x.set(rng.below(n) + 1);
    return x;
}

}  // namespace sublin::testutil
