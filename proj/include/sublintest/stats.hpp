#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace sublin {

// One-sided 99% normal quantile.
inline constexpr double z_one_sided_99 = 2.326;

struct Interval {
    double lo = 0, hi = 1;
};

// Wilson score interval for k successes in t trials.
inline Interval wilson(std::uint64_t k, std::uint64_t t, double z = z_one_sided_99) {
    if (t == 0) return {0, 1};
    const double n = static_cast<double>(t), p = static_cast<double>(k) / n, z2 = z * z;
    const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// Contract thresholds: rate must reach 2/3 - slack.
inline constexpr double contract_rate = 2.0 / 3;
inline constexpr double contract_slack = 0.05;

}  // namespace sublin
