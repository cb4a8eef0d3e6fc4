#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace sublin {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Counter-based generator keyed by (master_seed, stream_id): draw number c
// is mix64(key + (c+1)*gamma), the SplitMix64 sequence started at key. The
// bounded and real-valued draws below are defined here rather than taken from
// <random> because the standard distributions are not specified bit-exactly
// across library implementations.
class SeededRng {
public:
    using result_type = std::uint64_t;
    static constexpr std::uint64_t gamma = 0x9e3779b97f4a7c15ull;

    SeededRng() : SeededRng(0, 0) {}
    SeededRng(std::uint64_t master_seed, std::uint64_t stream_id)
        : master_(master_seed), stream_(stream_id),
          key_(mix64(master_seed ^ mix64(stream_id + 0x632be59bd9b4e019ull))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ + (++counter_) * gamma); }

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t stream_id() const { return stream_; }
    std::uint64_t position() const { return counter_; }

    // Independent generator for a sub-stream; does not advance *this.
    SeededRng child(std::uint64_t sub) const { return SeededRng(key_, sub); }

    // Uniform on [0, bound), Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform on [lo, hi] inclusive.
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    template <class T>
    void shuffle(std::span<T> v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::uint64_t master_;
    std::uint64_t stream_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Seed for trial t of a run with master seed s.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) {
    return mix64(master_seed * 0xd1b54a32d192ed03ull + mix64(trial + 1));
}

}  // namespace sublin
