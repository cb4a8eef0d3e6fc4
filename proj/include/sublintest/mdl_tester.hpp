#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bitstring.hpp"
#include "distribution.hpp"
#include "oracle.hpp"

namespace sublin {

struct MdlParams {
    double delta = 1.0 / 6;
    double c_pre = 1;           // preprocess draws: c_pre * n^{1-δ/2} / eps
    double c_big_thresh = 4;    // big-block probe threshold: c * log n / eps
    double c_big_rounds = 200;  // absorption rounds: c / eps
    double c_big_inner = 100;   // draws per round: c / eps * log(n/eps)
    double c_big_stop = 5;      // stop when neighbour hits < c * log(n/eps)
    double c_small = 16;        // small-block bound: c * n^δ * log n / eps
    double c_nil = 8;           // nil probes: c / eps
    double c_type = 8;          // types 1, 3, 4, 5 sample constant
    double c_t2 = 1;            // type-2 sample constant
};

// Sample and threshold sizes, all ceil'd.
struct MdlSizes {
    std::uint64_t pre, big_probes, big_thresh, big_rounds, big_inner, big_stop, small_cap, partner_cap, nil;
    std::uint64_t t1, t2p, t2q, t3, t4, t5;

    MdlSizes(std::size_t n_, double eps, const MdlParams& p) {
        const double n = static_cast<double>(n_), d = p.delta, ln = lg(n), lne = lg(n / eps);
        pre = ceil_count(p.c_pre * std::pow(n, 1 - d / 2) / eps);
        big_probes = ceil_count(std::pow(n, 1 - d));
        big_thresh = ceil_count(p.c_big_thresh * ln / eps);
        big_rounds = ceil_count(p.c_big_rounds / eps);
        big_inner = ceil_count(p.c_big_inner / eps * lne);
        big_stop = ceil_count(p.c_big_stop * lne);
        small_cap = ceil_count(p.c_small * std::pow(n, d) * ln / eps);
        partner_cap = 2 * small_cap;
        nil = ceil_count(p.c_nil / eps);
        t1 = t3 = ceil_count(p.c_type * std::sqrt(n) / eps);
        t2p = ceil_count(p.c_t2 * std::pow(n, d / 2) / (eps * ln * ln));
        t2q = ceil_count(p.c_t2 * std::pow(n, 1 - d / 2) * ln * ln * ln / eps);
        t4 = ceil_count(p.c_type * std::pow(n, 2.0 / 3) / eps);
        t5 = ceil_count(p.c_type * std::pow(n, 0.75) / eps);
    }
};

// Deterministic halving search. Returns the position in X of x* with
// f(x* ∨ ⋁Y) = f(⋁(X ∪ Y)) when f is an MDL.
inline std::size_t find_rep(FunctionOracle& f, std::span<const BitString> X, std::span<const BitString> Y) {
    require(!X.empty(), "find_rep: X must be nonempty");
    const std::size_t n = f.width();
    BitString ory(n);
    for (const auto& y : Y) ory |= y;
    BitString probe = ory;
    for (const auto& x : X) probe |= x;
    const bool b = f.query(probe);
    std::size_t lo = 0, cnt = X.size();
    while (cnt > 1) {
        std::size_t h = cnt / 2;
        probe = ory;
        for (std::size_t i = lo; i < lo + h; ++i) probe |= X[i];
        if (f.query(probe) == b) cnt = h;
        else { lo += h; cnt -= h; }
    }
    return lo;
}

// find_rep over X = {e_j : j ∈ E} and Y = {y}. Returns the position in E.
inline std::size_t find_rep_units(FunctionOracle& f, std::span<const std::uint32_t> E, const BitString& y) {
    require(!E.empty(), "find_rep: X must be nonempty");
    BitString probe = y;
    for (auto j : E) probe.set(j);
    const bool b = f.query(probe);
    std::size_t lo = 0, cnt = E.size();
    while (cnt > 1) {
        std::size_t h = cnt / 2;
        probe = y;
        for (std::size_t i = lo; i < lo + h; ++i) probe.set(E[i]);
        if (f.query(probe) == b) cnt = h;
        else { lo += h; cnt -= h; }
    }
    return lo;
}

namespace detail {

// ORs over the alive members of a list of strings, by rank among the alive.
// Leaves are grouped in chunks of 16; a segment tree over chunk ORs and a
// Fenwick tree over alive flags give O(log m) word-vector operations per query.
class OrIndex {
public:
    static constexpr std::size_t chunk = 16;

    OrIndex(const std::vector<BitString>& items, std::vector<std::uint32_t> ids, std::size_t n)
        : items_(&items), ids_(std::move(ids)), words_((n + 63) / 64), alive_(ids_.size(), 1),
          fen_(ids_.size() + 1, 0), count_(ids_.size()) {
        const std::size_t len = ids_.size();
        for (std::size_t i = 1; i <= len; ++i) {
            fen_[i] += 1;
            if (std::size_t j = i + (i & (~i + 1)); j <= len) fen_[j] += fen_[i];
        }
        nchunks_ = (len + chunk - 1) / chunk;
        base_ = 1;
        while (base_ < std::max<std::size_t>(nchunks_, 1)) base_ *= 2;
        tree_.assign(2 * base_ * words_, 0);
        for (std::size_t c = 0; c < nchunks_; ++c) rebuild_chunk(c);
        for (std::size_t v = base_ - 1; v >= 1; --v) combine(v);
    }

    std::size_t alive() const { return count_; }
    std::uint32_t id_at(std::size_t pos) const { return ids_[pos]; }
    const std::uint64_t* total() const { return node(1); }

    // Position of the alive entry with 0-based rank r.
    std::size_t kth(std::size_t r) const {
        std::size_t pos = 0, rem = r + 1, step = 1;
        while (step * 2 <= ids_.size()) step *= 2;
        for (; step; step /= 2) {
            if (pos + step <= ids_.size() && fen_[pos + step] < rem) {
                pos += step;
                rem -= fen_[pos];
            }
        }
        return pos;  // 0-based position = (1-based index) - 1
    }

    void kill(std::size_t pos) {
        if (!alive_[pos]) return;
        alive_[pos] = 0;
        --count_;
        for (std::size_t i = pos + 1; i <= ids_.size(); i += i & (~i + 1)) fen_[i] -= 1;
        std::size_t c = pos / chunk;
        rebuild_chunk(c);
        for (std::size_t v = (base_ + c) / 2; v >= 1; v /= 2) combine(v);
    }

    // acc |= OR of alive entries with ranks in [rlo, rhi].
    void or_ranks(std::size_t rlo, std::size_t rhi, std::uint64_t* acc) const {
        or_positions(kth(rlo), kth(rhi), acc);
    }

private:
    const std::uint64_t* node(std::size_t v) const { return tree_.data() + v * words_; }
    std::uint64_t* node(std::size_t v) { return tree_.data() + v * words_; }

    void or_item(std::size_t pos, std::uint64_t* acc) const {
        const std::uint64_t* src = (*items_)[ids_[pos]].data();
        for (std::size_t w = 0; w < words_; ++w) acc[w] |= src[w];
    }
    static void or_into(std::uint64_t* acc, const std::uint64_t* src, std::size_t words) {
        for (std::size_t w = 0; w < words; ++w) acc[w] |= src[w];
    }

    void rebuild_chunk(std::size_t c) {
        std::uint64_t* dst = node(base_ + c);
        std::fill(dst, dst + words_, 0);
        for (std::size_t p = c * chunk; p < std::min(ids_.size(), (c + 1) * chunk); ++p)
            if (alive_[p]) or_item(p, dst);
    }
    void combine(std::size_t v) {
        std::uint64_t* dst = node(v);
        const std::uint64_t* a = node(2 * v);
        const std::uint64_t* b = node(2 * v + 1);
        for (std::size_t w = 0; w < words_; ++w) dst[w] = a[w] | b[w];
    }

    void or_positions(std::size_t plo, std::size_t phi, std::uint64_t* acc) const {
        std::size_t clo = plo / chunk, chi = phi / chunk;
        if (clo == chi) {
            for (std::size_t p = plo; p <= phi; ++p)
                if (alive_[p]) or_item(p, acc);
            return;
        }
        for (std::size_t p = plo; p < (clo + 1) * chunk; ++p)
            if (alive_[p]) or_item(p, acc);
        for (std::size_t p = chi * chunk; p <= phi; ++p)
            if (alive_[p]) or_item(p, acc);
        std::size_t l = base_ + clo + 1, r = base_ + chi;
        while (l < r) {
            if (l & 1) or_into(acc, node(l++), words_);
            if (r & 1) or_into(acc, node(--r), words_);
            l /= 2;
            r /= 2;
        }
    }

    const std::vector<BitString>* items_;
    std::vector<std::uint32_t> ids_;
    std::size_t words_;
    std::vector<std::uint8_t> alive_;
    std::vector<std::uint32_t> fen_;
    std::size_t count_;
    std::size_t nchunks_ = 0, base_ = 1;
    std::vector<std::uint64_t> tree_;
};

inline std::size_t find_rep_indexed(FunctionOracle& f, const OrIndex& X, const std::uint64_t* yor,
                                    BitString& probe) {
    const std::size_t words = probe.words();
    auto reset = [&] { std::copy(yor, yor + words, probe.data()); };
    reset();
    for (std::size_t w = 0; w < words; ++w) probe.data()[w] |= X.total()[w];
    const bool b = f.query(probe);
    std::size_t lo = 0, cnt = X.alive();
    while (cnt > 1) {
        std::size_t h = cnt / 2;
        reset();
        X.or_ranks(lo, lo + h - 1, probe.data());
        if (f.query(probe) == b) cnt = h;
        else { lo += h; cnt -= h; }
    }
    return X.kth(lo);
}

}  // namespace detail

// Output of the sketch construction before its consistency check: the
// extraction order x^(1..m) (indices into T), their values, and the maximal
// runs of equal value as [begin, end) ranges of the order.
struct SketchTrace {
    std::vector<std::uint32_t> order;
    std::vector<std::uint8_t> value;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> intervals;
};

inline SketchTrace sketch_trace(FunctionOracle& f, const std::vector<BitString>& T) {
    const std::size_t n = f.width(), m = T.size();
    std::vector<std::uint8_t> val(m);
    std::vector<std::uint32_t> ids[2];
    for (std::size_t i = 0; i < m; ++i) {
        val[i] = f.query(T[i]) ? 1 : 0;
        ids[val[i]].push_back(static_cast<std::uint32_t>(i));
    }
    detail::OrIndex side[2] = {detail::OrIndex(T, std::move(ids[0]), n), detail::OrIndex(T, std::move(ids[1]), n)};
    SketchTrace tr;
    tr.order.reserve(m);
    BitString probe(n);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t pos;
        int b;
        if (side[0].alive() && side[1].alive()) {
            for (std::size_t w = 0; w < probe.words(); ++w)
                probe.data()[w] = side[0].total()[w] | side[1].total()[w];
            b = f.query(probe) ? 1 : 0;
            pos = detail::find_rep_indexed(f, side[b], side[1 - b].total(), probe);
        } else {
            b = side[0].alive() ? 0 : 1;
            pos = side[b].kth(0);
        }
        tr.order.push_back(side[b].id_at(pos));
        side[b].kill(pos);
    }
    for (auto id : tr.order) tr.value.push_back(val[id]);
    for (std::uint32_t i = 0; i < m;) {
        std::uint32_t j = i;
        while (j < m && tr.value[j] == tr.value[i]) ++j;
        tr.intervals.emplace_back(i, j);
        i = j;
    }
    return tr;
}

// (s^(1), ..., s^(k)) with cached f(s^(ℓ)); 1-based accessors.
struct MdlSketch {
    std::vector<BitString> s;
    std::vector<std::uint8_t> value;

    std::uint32_t k() const { return static_cast<std::uint32_t>(s.size()); }
    const BitString& at(std::size_t l) const { return s[l - 1]; }
    bool value_at(std::size_t l) const { return value[l - 1] != 0; }
};

// Returns nil when the candidate sketch fails the consistency check.
inline std::optional<MdlSketch> sketch_mdl(FunctionOracle& f, const std::vector<BitString>& T) {
    for (const auto& x : T)
        if (x.none()) throw ContractViolation("sketch_mdl: T must exclude 0^n");
    auto tr = sketch_trace(f, T);
    if (tr.intervals.size() < 2) {
        if (tr.intervals.empty()) throw ContractViolation("sketch_mdl: T is empty");
        throw ContractViolation("sketch_mdl: T needs a 0-string and a 1-string");
    }
    MdlSketch sk;
    for (auto [a, b] : tr.intervals) {
        BitString s(f.width());
        for (auto i = a; i < b; ++i) s |= T[tr.order[i]];
        sk.s.push_back(std::move(s));
    }
    sk.value.push_back(f.query(sk.s[0]) ? 1 : 0);
    for (std::size_t l = 1; l < sk.s.size(); ++l) {
        sk.value.push_back(f.query(sk.s[l]) ? 1 : 0);
        if (sk.value[l] == sk.value[l - 1]) return std::nullopt;
        if (f.query(sk.s[l - 1] | sk.s[l]) != (sk.value[l - 1] != 0)) return std::nullopt;
    }
    return sk;
}

// Block index ℓ ∈ [0:k+1]; at most 3 + ceil(log2 k) queries (2 + ... with fx given).
inline std::uint32_t find_block_mdl(FunctionOracle& f, const MdlSketch& sk, const BitString& x,
                                    std::optional<bool> fx_cached = std::nullopt) {
    const std::uint32_t k = sk.k();
    const bool fx = fx_cached ? *fx_cached : f.query(x);
    // s^(a) ≻_f x iff f(s^(a) ∨ x) ≠ f(x), for a whose value differs from f(x).
    auto above = [&](std::uint32_t a) { return f.query(sk.at(a) | x) != fx; };
    if (sk.value_at(1) == fx) {
        // Odd block: compare against the even-indexed strings.
        if (!above(2)) return 1;
        const std::uint32_t K = 2 * (k / 2);
        if (K == 2 || above(K)) return K + 1;
        std::uint32_t lo = 2, hi = K;  // s^(lo) ≻ x ≻ s^(hi)
        while (hi - lo > 2) {
            std::uint32_t mid = lo + 2 * ((hi - lo) / 4);
            if (mid == lo) mid += 2;
            if (above(mid)) lo = mid;
            else hi = mid;
        }
        return lo + 1;
    }
    // Even block: compare against the odd-indexed strings.
    if (!above(1)) return 0;
    const std::uint32_t K = (k % 2) ? k : k - 1;
    if (K == 1 || above(K)) return K + 1;
    std::uint32_t lo = 1, hi = K;
    while (hi - lo > 2) {
        std::uint32_t mid = lo + 2 * ((hi - lo) / 4);
        if (mid == lo) mid += 2;
        if (above(mid)) lo = mid;
        else hi = mid;
    }
    return lo + 1;
}

// L ⊆ [0:k+1] with its neighbour set N(L).
class BigBlockSet {
public:
    BigBlockSet() = default;
    explicit BigBlockSet(std::uint32_t k) : member_(k + 2, 0) {}

    std::uint32_t span() const { return static_cast<std::uint32_t>(member_.size()); }
    bool contains(std::uint32_t l) const { return l < member_.size() && member_[l]; }
    bool neighbor(std::uint32_t l) const {
        if (l >= member_.size() || member_[l]) return false;
        return (l > 0 && member_[l - 1]) || (l + 1 < member_.size() && member_[l + 1]);
    }
    // Outside L ∪ N(L).
    bool small(std::uint32_t l) const { return !contains(l) && !neighbor(l); }
    void insert(std::uint32_t l) { member_.at(l) = 1; }
    std::vector<std::uint32_t> members() const {
        std::vector<std::uint32_t> v;
        for (std::uint32_t l = 0; l < member_.size(); ++l)
            if (member_[l]) v.push_back(l);
        return v;
    }
    std::vector<std::uint32_t> neighbors() const {
        std::vector<std::uint32_t> v;
        for (std::uint32_t l = 0; l < member_.size(); ++l)
            if (neighbor(l)) v.push_back(l);
        return v;
    }
    void absorb_neighbors() {
        for (auto l : neighbors()) member_[l] = 1;
    }
    std::size_t size() const { return members().size(); }

private:
    std::vector<std::uint8_t> member_;
};

inline BigBlockSet find_big_blocks(FunctionOracle& f, Sampler& d, double eps, const MdlSketch& sk,
                                   const MdlParams& p = {}) {
    const std::size_t n = f.width();
    const MdlSizes sz(n, eps, p);
    const std::uint32_t k = sk.k();
    std::vector<std::uint64_t> c(k + 2, 0);
    for (std::uint64_t t = 0; t < sz.big_probes; ++t) {
        auto i = static_cast<std::uint32_t>(d.rng().below(n) + 1);
        ++c[find_block_mdl(f, sk, BitString::unit(i, n))];
    }
    BigBlockSet L(k);
    for (std::uint32_t l = 0; l < k + 2; ++l)
        if (c[l] >= sz.big_thresh) L.insert(l);
    for (std::uint64_t round = 0; round < sz.big_rounds; ++round) {
        auto around = L.neighbors();
        if (around.empty()) return L;  // no draw can hit a neighbor
        std::vector<std::uint8_t> nb(k + 2, 0);
        for (auto l : around) nb[l] = 1;
        std::uint64_t hits = 0;
        for (std::uint64_t t = 0; t < sz.big_inner; ++t)
            if (nb[find_block_mdl(f, sk, d.draw())]) ++hits;
        if (hits < sz.big_stop) return L;
        L.absorb_neighbors();
    }
    return L;
}

struct MaxIndexResult {
    std::uint32_t block = 0;
    bool fx = false;
    std::optional<std::uint32_t> index;  // nil when empty
};

// MaxIndex for x ≠ 0^n whose value and block are already known.
inline std::optional<std::uint32_t> max_index_at(FunctionOracle& f, const MdlSketch& sk, const BigBlockSet& L,
                                                 const BitString& x, bool fx, std::uint32_t l, double eps,
                                                 const MdlParams& p = {}) {
    const std::size_t n = f.width();
    const std::uint32_t k = sk.k();
    const BitString next = (l >= k) ? BitString(n) : sk.at(l + 1);
    std::vector<std::uint32_t> E = x.support();
    // Line-4 / line-13 conditions, shared by both branches.
    auto passes = [&](std::uint32_t i, const BitString* rest) {
        auto ei = BitString::unit(i, n);
        bool fe = f.query(ei);
        if (find_block_mdl(f, sk, ei, fe) != l || fe != fx) return false;
        if (!rest) return true;
        return f.query(ei | *rest) == fx;
    };
    if (L.contains(l)) {
        auto i = E[find_rep_units(f, E, next)];
        if (passes(i, nullptr)) return i;
        return std::nullopt;
    }
    const std::uint64_t cap = MdlSizes(n, eps, p).small_cap;
    std::vector<std::uint32_t> U;
    auto or_rest = [&] {
        BitString y = next;
        for (auto j : E) y.set(j);
        return y;
    };
    while (U.size() < cap && !E.empty() && f.query(or_rest()) == fx) {
        auto pos = find_rep_units(f, E, next);
        U.push_back(E[pos]);
        E.erase(E.begin() + static_cast<std::ptrdiff_t>(pos));
    }
    BitString rest(n);
    for (auto j : E) rest.set(j);
    for (auto i : U)
        if (passes(i, &rest)) return i;
    return std::nullopt;
}

inline MaxIndexResult max_index(FunctionOracle& f, const MdlSketch& sk, const BigBlockSet& L, const BitString& x,
                                double eps, const MdlParams& p = {}) {
    if (x.none()) throw ContractViolation("max_index: x must be nonzero");
    MaxIndexResult r;
    r.fx = f.query(x);
    r.block = find_block_mdl(f, sk, x, r.fx);
    r.index = max_index_at(f, sk, L, x, r.fx, r.block, eps, p);
    return r;
}

struct PreprocessOutcome {
    std::optional<Verdict> decided;  // early accept or reject
    std::optional<MdlSketch> sketch;
    BigBlockSet L;
};

inline PreprocessOutcome preprocess(FunctionOracle& f, Sampler& d, double eps, const MdlParams& p = {}) {
    require(eps > 0 && eps < 1, "eps must lie in (0,1)");
    const MdlSizes sz(f.width(), eps, p);
    std::vector<BitString> T;
    for (auto i : d.draw_set(sz.pre))
        if (!d.atom(i).none()) T.push_back(d.atom(i));
    if (T.empty()) return {Verdict::accept("preprocess"), std::nullopt, {}};
    bool seen[2] = {false, false};
    for (const auto& x : T) seen[f.query(x) ? 1 : 0] = true;
    if (!seen[0] || !seen[1]) return {Verdict::accept("preprocess"), std::nullopt, {}};
    auto sk = sketch_mdl(f, T);
    if (!sk) return {Verdict::reject("preprocess", "sketch inconsistent"), std::nullopt, {}};
    auto L = find_big_blocks(f, d, eps, *sk, p);
    return {std::nullopt, std::move(sk), std::move(L)};
}

namespace detail {

struct TypePoint {
    std::uint32_t atom = 0;
    std::uint32_t block = 0;
    bool fx = false;
    bool has_mi = false;
    std::optional<std::uint32_t> mi;
};

struct TypeContext {
    FunctionOracle& f;
    Sampler& d;
    double eps;
    const MdlSketch& sk;
    const BigBlockSet& L;
    const MdlParams& p;
    MdlSizes sz;

    std::vector<std::uint32_t> draw_nonzero(std::uint64_t m) {
        std::vector<std::uint32_t> out;
        for (auto i : d.draw_set(m))
            if (!d.atom(i).none()) out.push_back(i);
        return out;
    }

    // FindBlock and, when `want_mi` accepts the block, MaxIndex for each distinct atom.
    template <class Want>
    std::unordered_map<std::uint32_t, TypePoint> locate(std::initializer_list<const std::vector<std::uint32_t>*> sets,
                                                        Want&& want_mi) {
        std::unordered_map<std::uint32_t, TypePoint> pts;
        for (const auto* s : sets)
            for (auto a : *s) {
                if (pts.count(a)) continue;
                TypePoint tp;
                tp.atom = a;
                const BitString& x = d.atom(a);
                tp.fx = f.query(x);
                tp.block = find_block_mdl(f, sk, x, tp.fx);
                if (want_mi(tp.block)) {
                    tp.has_mi = true;
                    tp.mi = max_index_at(f, sk, L, x, tp.fx, tp.block, eps, p);
                }
                pts.emplace(a, tp);
            }
        return pts;
    }

    // Inverted index: variable -> points among `set` whose string contains it.
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> by_support(const std::vector<std::uint32_t>& set) {
        std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> idx;
        for (auto a : set) d.atom(a).for_each_set([&](std::uint32_t i) { idx[i].push_back(a); });
        return idx;
    }

    bool pair_value(std::uint32_t u, std::uint32_t v) {
        const std::size_t n = f.width();
        return f.query(BitString::unit(u, n) | BitString::unit(v, n));
    }
};

inline std::string pt_str(const Sampler& d, std::uint32_t a) { return d.atom(a).to_hex(); }

// Vertices (u = MaxIndex, block, f(e_u)) of the sampled points lying in blocks outside L ∪ N(L).
struct SmallVertex {
    std::uint32_t u;
    std::uint32_t block;
    bool fu;
    std::uint32_t atom;
};

inline std::unordered_map<std::uint32_t, std::vector<SmallVertex>> small_vertices(
    const std::unordered_map<std::uint32_t, TypePoint>& pts, const std::vector<std::uint32_t>& P,
    const BigBlockSet& L) {
    std::unordered_map<std::uint32_t, std::vector<SmallVertex>> by_block;
    std::unordered_set<std::uint32_t> seen;
    for (auto a : P) {
        const auto& tp = pts.at(a);
        if (!tp.mi || !L.small(tp.block)) continue;
        if (!seen.insert(*tp.mi).second) continue;
        by_block[tp.block].push_back({*tp.mi, tp.block, tp.fx, a});
    }
    return by_block;
}

// f(e_a ∨ e_b) for pairs between adjacent small blocks, each vertex taking part
// in at most `cap` distinct pair queries.
class PairLabels {
public:
    PairLabels(TypeContext& ctx, std::uint64_t cap) : ctx_(ctx), cap_(cap) {}

    std::optional<bool> get(std::uint32_t a, std::uint32_t b) {
        std::uint64_t key = a < b ? (std::uint64_t{a} << 32 | b) : (std::uint64_t{b} << 32 | a);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        if (used_[a] >= cap_ || used_[b] >= cap_) return std::nullopt;
        ++used_[a];
        ++used_[b];
        bool v = ctx_.pair_value(a, b);
        cache_.emplace(key, v);
        return v;
    }

private:
    TypeContext& ctx_;
    std::uint64_t cap_;
    std::unordered_map<std::uint64_t, bool> cache_;
    std::unordered_map<std::uint32_t, std::uint64_t> used_;
};

}  // namespace detail

inline Verdict test_type(int c, FunctionOracle& f, Sampler& d, double eps, const MdlSketch& sk, const BigBlockSet& L,
                         const MdlParams& p = {}) {
    detail::TypeContext ctx{f, d, eps, sk, L, p, MdlSizes(f.width(), eps, p)};
    const auto& sz = ctx.sz;
    const std::string stage = "type-" + std::to_string(c);
    auto all = [](std::uint32_t) { return true; };

    if (c == 1 || c == 2) {
        auto P = ctx.draw_nonzero(c == 1 ? sz.t1 : sz.t2p);
        auto Q = ctx.draw_nonzero(c == 1 ? sz.t1 : sz.t2q);
        auto pts = c == 1 ? ctx.locate({&P, &Q}, all)
                          : ctx.locate({&P, &Q}, [&](std::uint32_t l) { return L.contains(l); });
        auto idx = ctx.by_support(P);
        for (auto ay : Q) {
            const auto& y = pts.at(ay);
            if (!y.mi) continue;
            if (c == 2 && !L.contains(y.block)) continue;
            auto it = idx.find(*y.mi);
            if (it == idx.end()) continue;
            for (auto ax : it->second) {
                const auto& x = pts.at(ax);
                bool hit = c == 1 ? (x.fx != y.fx && y.block + 2 <= x.block)
                                  : (y.block + 1 == x.block && L.contains(x.block));
                if (hit)
                    return Verdict::reject(stage, "x=" + detail::pt_str(d, ax) + " y=" + detail::pt_str(d, ay) +
                                                      " blocks " + std::to_string(x.block) + " " +
                                                      std::to_string(y.block) + " maxindex " +
                                                      std::to_string(*y.mi));
            }
        }
        return Verdict::accept(stage);
    }

    if (c == 3) {
        auto P = ctx.draw_nonzero(sz.t3);
        auto Q = ctx.draw_nonzero(sz.t3);
        auto pts = ctx.locate({&P, &Q}, all);
        std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> by_mi;
        for (auto ay : Q) {
            const auto& y = pts.at(ay);
            if (y.mi && L.small(y.block)) by_mi[*y.mi].push_back(ay);
        }
        std::unordered_map<std::uint64_t, bool> cache;
        for (auto ax : P) {
            const auto& x = pts.at(ax);
            if (!x.mi || !L.small(x.block)) continue;
            const std::uint32_t u = *x.mi;
            std::uint64_t partners = 0;
            std::optional<Verdict> found;
            d.atom(ax).for_each_set([&](std::uint32_t v) {
                if (found || partners >= sz.partner_cap) return;
                auto it = by_mi.find(v);
                if (it == by_mi.end()) return;
                for (auto ay : it->second) {
                    const auto& y = pts.at(ay);
                    if (x.block != y.block + 1 && y.block != x.block + 1) continue;
                    ++partners;
                    std::uint64_t key = std::uint64_t{u} << 32 | v;
                    auto cit = cache.find(key);
                    bool val = cit != cache.end() ? cit->second : cache.emplace(key, ctx.pair_value(u, v)).first->second;
                    if (val != x.fx)
                        found = Verdict::reject(stage, "u=" + std::to_string(u) + " v=" + std::to_string(v) +
                                                           " blocks " + std::to_string(x.block) + " " +
                                                           std::to_string(y.block));
                    return;  // the pair (u, v) is settled by any such y
                }
            });
            if (found) return *found;
        }
        return Verdict::accept(stage);
    }

    if (c == 4 || c == 5) {
        auto P = ctx.draw_nonzero(c == 4 ? sz.t4 : sz.t5);
        auto pts = ctx.locate({&P}, all);
        auto groups = detail::small_vertices(pts, P, L);
        detail::PairLabels lab(ctx, sz.partner_cap);
        std::vector<std::uint32_t> blocks;
        for (const auto& [b, _] : groups) blocks.push_back(b);
        std::sort(blocks.begin(), blocks.end());

        if (c == 4) {
            // u in block ℓ+1, v in ℓ, w in ℓ-1 with e_u ≻ e_v ≻ e_w.
            for (auto l : blocks) {
                if (l == 0 || !groups.count(l + 1) || !groups.count(l - 1)) continue;
                for (const auto& v : groups.at(l)) {
                    std::optional<std::uint32_t> up, down;
                    for (const auto& u : groups.at(l + 1)) {
                        auto q = lab.get(u.u, v.u);
                        if (q && *q == u.fu) { up = u.u; break; }
                    }
                    if (!up) continue;
                    for (const auto& w : groups.at(l - 1)) {
                        auto q = lab.get(v.u, w.u);
                        if (q && *q == v.fu) { down = w.u; break; }
                    }
                    if (down)
                        return Verdict::reject(stage, "u=" + std::to_string(*up) + " v=" + std::to_string(v.u) +
                                                          " w=" + std::to_string(*down) + " blocks " +
                                                          std::to_string(l + 1) + " " + std::to_string(l) + " " +
                                                          std::to_string(l - 1));
                }
            }
            return Verdict::accept(stage);
        }

        // Type 5: u1, u3 in block ℓ+1 and u2, u4 in ℓ with
        // f(u1∨u2) = f(u3∨u4) = 0 and f(u2∨u3) = f(u4∨u1) = 1.
        for (auto l : blocks) {
            if (!groups.count(l + 1)) continue;
            const auto& hi = groups.at(l + 1);
            const auto& lo = groups.at(l);
            const std::size_t words = (lo.size() + 63) / 64;
            std::vector<std::vector<std::uint64_t>> Z(hi.size(), std::vector<std::uint64_t>(words, 0)), O = Z;
            for (std::size_t a = 0; a < hi.size(); ++a)
                for (std::size_t b = 0; b < lo.size(); ++b)
                    if (auto q = lab.get(hi[a].u, lo[b].u))
                        (*q ? O : Z)[a][b / 64] |= std::uint64_t{1} << (b % 64);
            auto meet = [&](const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& y) -> int {
                for (std::size_t w = 0; w < words; ++w)
                    if (x[w] & y[w]) return static_cast<int>(w * 64 + std::countr_zero(x[w] & y[w]));
                return -1;
            };
            for (std::size_t a = 0; a < hi.size(); ++a)
                for (std::size_t b = a + 1; b < hi.size(); ++b) {
                    int u2 = meet(Z[a], O[b]);
                    if (u2 < 0) continue;
                    int u4 = meet(Z[b], O[a]);
                    if (u4 < 0) continue;
                    return Verdict::reject(stage, "u1=" + std::to_string(hi[a].u) + " u2=" +
                                                      std::to_string(lo[u2].u) + " u3=" + std::to_string(hi[b].u) +
                                                      " u4=" + std::to_string(lo[u4].u));
                }
        }
        return Verdict::accept(stage);
    }
    throw ContractViolation("test_type: type must be in 1..5");
}

inline Verdict monotone_dl_tester(FunctionOracle& f, Sampler& d, double eps, const MdlParams& p = {}) {
    auto fill = [&](Verdict v) {
        if (auto* l = d.ledger()) v.ledger = l->report();
        return v;
    };
    auto pre = preprocess(f, d, eps, p);
    if (pre.decided) return fill(*pre.decided);
    const auto& sk = *pre.sketch;
    const MdlSizes sz(f.width(), eps, p);
    for (std::uint64_t t = 0; t < sz.nil; ++t) {
        const BitString& x = d.draw();
        if (x.none()) continue;
        auto r = max_index(f, sk, pre.L, x, eps, p);
        if (!r.index) return fill(Verdict::reject("nil-probe", "x=" + x.to_hex()));
    }
    for (int c = 1; c <= 5; ++c)
        if (auto v = test_type(c, f, d, eps, sk, pre.L, p); !v.accepted()) return fill(v);
    return fill(Verdict::accept("mdl"));
}

// Closed-form worst-case ledger of monotone_dl_tester.
inline LedgerReport mdl_budget(std::size_t n, double eps, const MdlParams& p = {}) {
    const MdlSizes sz(n, eps, p);
    auto findrep = [](std::uint64_t s) { return 1 + ceil_log2(s); };
    const std::uint64_t m = sz.pre;
    const std::uint64_t fb = 3 + ceil_log2(m);  // k <= |T| <= m
    const std::uint64_t mi_big = findrep(n) + 1 + fb;
    const std::uint64_t mi_small = sz.small_cap * (1 + findrep(n)) + 1 + sz.small_cap * (2 + fb);
    const std::uint64_t point = 1 + fb + std::max(mi_big, mi_small);  // f(x), FindBlock, MaxIndex
    const std::uint64_t point_big = 1 + fb + mi_big;

    LedgerReport b;
    std::uint64_t& q = b.function_queries;
    std::uint64_t& s = b.samples_drawn;
    // Preprocess: value scan, sketch (values, extraction, verification), big blocks.
    q += m + m + m * (1 + findrep(m)) + 2 * m;
    q += sz.big_probes * fb + sz.big_rounds * sz.big_inner * fb;
    s += m + sz.big_rounds * sz.big_inner;
    q += sz.nil * point;
    s += sz.nil;
    q += 2 * sz.t1 * point;
    s += 2 * sz.t1;
    q += (sz.t2p + sz.t2q) * point_big;
    s += sz.t2p + sz.t2q;
    q += 2 * sz.t3 * point + sz.t3 * sz.partner_cap;
    s += 2 * sz.t3;
    q += sz.t4 * point + sz.t4 * sz.partner_cap;
    s += sz.t4;
    q += sz.t5 * point + sz.t5 * sz.partner_cap;
    s += sz.t5;
    return b;
}

}  // namespace sublin
