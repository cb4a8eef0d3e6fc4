#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace sublin {

// Packed n-bit string. Indices are 1-based to match the decision-list
// notation; bit i lives at word (i-1)/64, position (i-1)%64. Bits past n are
// always zero so word-level comparison and hashing are exact.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    static BitString unit(std::size_t i, std::size_t n) {
        if (i < 1 || i > n) throw ContractViolation("unit: index out of range");
        BitString x(n);
        x.set(i);
        return x;
    }

    // "0110" -> bit 1 = '0', bit 2 = '1', ...
    static BitString from_bits(std::string_view s) {
        BitString x(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') x.set(i + 1);
            else if (s[i] != '0') throw ContractViolation("from_bits: expected '0' or '1'");
        }
        return x;
    }

    static BitString from_support(std::span<const std::uint32_t> idx, std::size_t n) {
        BitString x(n);
        for (auto i : idx) {
            if (i < 1 || i > n) throw ContractViolation("from_support: index out of range");
            x.set(i);
        }
        return x;
    }

    // Little-endian hex: bit 1 is the least significant bit of the first byte.
    static BitString from_hex(std::string_view hex, std::size_t n) {
        if (hex.size() != 2 * ((n + 7) / 8))
            throw ContractViolation("from_hex: length does not match width");
        auto nibble = [](char c) -> unsigned {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            throw ContractViolation("from_hex: bad digit");
        };
        BitString x(n);
        for (std::size_t b = 0; b < hex.size() / 2; ++b) {
            unsigned byte = (nibble(hex[2 * b]) << 4) | nibble(hex[2 * b + 1]);
            for (unsigned k = 0; k < 8; ++k) {
                if (!(byte >> k & 1u)) continue;
                std::size_t i = b * 8 + k + 1;
                if (i > n) throw ContractViolation("from_hex: bit beyond width");
                x.set(i);
            }
        }
        return x;
    }

    std::size_t width() const { return n_; }
    std::size_t words() const { return w_.size(); }
    const std::uint64_t* data() const { return w_.data(); }
    std::uint64_t* data() { return w_.data(); }

    bool test(std::size_t i) const { return (w_[(i - 1) >> 6] >> ((i - 1) & 63)) & 1u; }
    void set(std::size_t i) { w_[(i - 1) >> 6] |= std::uint64_t{1} << ((i - 1) & 63); }
    void reset(std::size_t i) { w_[(i - 1) >> 6] &= ~(std::uint64_t{1} << ((i - 1) & 63)); }
    void flip(std::size_t i) { w_[(i - 1) >> 6] ^= std::uint64_t{1} << ((i - 1) & 63); }
    void clear() { std::fill(w_.begin(), w_.end(), 0); }

    std::size_t popcount() const {
        std::size_t c = 0;
        for (auto w : w_) c += std::popcount(w);
        return c;
    }
    bool none() const {
        return std::all_of(w_.begin(), w_.end(), [](std::uint64_t w) { return w == 0; });
    }

    template <class F>
    void for_each_set(F&& fn) const {
        for (std::size_t k = 0; k < w_.size(); ++k) {
            std::uint64_t w = w_[k];
            while (w) {
                fn(static_cast<std::uint32_t>(k * 64 + std::countr_zero(w) + 1));
                w &= w - 1;
            }
        }
    }

    std::vector<std::uint32_t> support() const {
        std::vector<std::uint32_t> s;
        for_each_set([&](std::uint32_t i) { s.push_back(i); });
        return s;
    }

    std::string to_bits() const {
        std::string s(n_, '0');
        for_each_set([&](std::uint32_t i) { s[i - 1] = '1'; });
        return s;
    }

    std::string to_hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        std::string s;
        s.reserve(2 * ((n_ + 7) / 8));
        for (std::size_t b = 0; b < (n_ + 7) / 8; ++b) {
            unsigned byte = (w_[b / 8] >> (8 * (b % 8))) & 0xffu;
            s.push_back(digits[byte >> 4]);
            s.push_back(digits[byte & 15]);
        }
        return s;
    }

    BitString& operator|=(const BitString& o) {
        check_width(o);
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
        return *this;
    }
    BitString& operator^=(const BitString& o) {
        check_width(o);
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
        return *this;
    }

    friend BitString operator|(BitString a, const BitString& b) { return a |= b; }
    friend BitString operator^(BitString a, const BitString& b) { return a ^= b; }
    friend bool operator==(const BitString& a, const BitString& b) = default;
    friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) {
        if (auto c = a.n_ <=> b.n_; c != 0) return c;
        return a.w_ <=> b.w_;
    }

    std::size_t hash() const {
        std::uint64_t h = 0x9e3779b97f4a7c15ull ^ n_;
        for (auto w : w_) {
            h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdull;
        }
        return static_cast<std::size_t>(h ^ (h >> 33));
    }

private:
    void check_width(const BitString& o) const {
        if (o.n_ != n_) throw ContractViolation("bitstring width mismatch");
    }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

inline BitString bit_or(const BitString& x, const BitString& y) { return x | y; }
inline BitString bit_xor(const BitString& x, const BitString& y) { return x ^ y; }
inline BitString unit(std::size_t i, std::size_t n) { return BitString::unit(i, n); }

struct BitStringHash {
    std::size_t operator()(const BitString& x) const { return x.hash(); }
};

}  // namespace sublin

template <>
struct std::hash<sublin::BitString> {
    std::size_t operator()(const sublin::BitString& x) const { return x.hash(); }
};
