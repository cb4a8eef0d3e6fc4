#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "birthday.hpp"
#include "instances.hpp"

namespace sublin {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Bundle = std::variant<BoolBundle, CompareBundle>;

inline GroundTruth truth_from_string(const std::string& s) {
    if (s == "yes") return GroundTruth::yes;
    if (s == "far") return GroundTruth::far;
    if (s == "unknown") return GroundTruth::unknown;
    throw UsageError("bad ground_truth: " + s);
}

inline Json to_json(const BoolBundle& b) {
    Json fn;
    fn["type"] = b.fn.type;
    if (b.fn.type == "table") {
        fn["table"] = b.fn.table;
    } else {
        fn["pi"] = b.fn.pi;
        if (b.fn.type == "dl") fn["mu"] = b.fn.mu;
        fn["nu"] = b.fn.nu;
    }
    if (!b.fn.overrides.empty()) {
        Json ov = Json::array();
        for (const auto& [x, v] : b.fn.overrides) ov.push_back({{"x", x.to_hex()}, {"v", v ? 1 : 0}});
        fn["overrides"] = ov;
    }
    Json dist = Json::array();
    for (std::size_t i = 0; i < b.dist.size(); ++i)
        dist.push_back({{"x", b.dist.atom(i).to_hex()}, {"p", b.dist.weight(i)}});
    return Json{{"version", 1},   {"n", b.n()},          {"family", b.family},
                {"ground_truth", to_string(b.truth)},   {"far_eps", b.far_eps},
                {"seed", b.seed}, {"function", fn},      {"distribution", dist}};
}

inline Json to_json(const CompareBundle& b) {
    Json fn;
    fn["type"] = b.cmp.type;
    if (b.cmp.type == "table") fn["orient"] = b.cmp.orient;
    else fn["pi"] = b.cmp.pi;
    Json pairs = Json::array();
    for (std::size_t i = 0; i < b.dist.size(); ++i)
        pairs.push_back({{"u", b.dist.edge(i).u}, {"v", b.dist.edge(i).v}, {"p", b.dist.weight(i)}});
    return Json{{"version", 1},   {"n", b.n()},          {"family", b.family},
                {"ground_truth", to_string(b.truth)},   {"far_eps", b.far_eps},
                {"seed", b.seed}, {"function", fn},      {"distribution", {{"pairs", pairs}}}};
}

inline std::string serialize(const Bundle& b) {
    return std::visit([](const auto& x) { return to_json(x).dump(); }, b);
}

namespace detail {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace detail

// A distribution array means a Boolean bundle; {pairs: [...]} a comparison bundle.
inline Bundle bundle_from_json(const Json& j) {
    try {
        if (j.at("version").get<int>() != 1) throw UsageError("unsupported instance version");
        const auto n = j.at("n").get<std::size_t>();
        const Json& fn = j.at("function");
        const Json& dist = j.at("distribution");
        const auto family = detail::get_or<std::string>(j, "family", "file");
        const auto truth = truth_from_string(detail::get_or<std::string>(j, "ground_truth", "unknown"));
        const auto far_eps = detail::get_or<double>(j, "far_eps", 0.0);
        const auto seed = detail::get_or<std::uint64_t>(j, "seed", 0);
        if (dist.is_array()) {
            BoolBundle b;
            b.family = family;
            b.truth = truth;
            b.far_eps = far_eps;
            b.seed = seed;
            b.fn.type = fn.at("type").get<std::string>();
            b.fn.n = n;
            if (b.fn.type == "table") {
                b.fn.table = fn.at("table").get<std::vector<std::uint8_t>>();
            } else {
                b.fn.pi = fn.at("pi").get<std::vector<std::uint32_t>>();
                b.fn.nu = fn.at("nu").get<std::vector<std::uint8_t>>();
                if (b.fn.type == "dl") b.fn.mu = fn.at("mu").get<std::vector<std::uint8_t>>();
            }
            if (fn.contains("overrides"))
                for (const auto& o : fn.at("overrides"))
                    b.fn.overrides.emplace_back(BitString::from_hex(o.at("x").get<std::string>(), n),
                                                o.at("v").get<int>() != 0);
            std::vector<BitString> atoms;
            std::vector<double> w;
            for (const auto& a : dist) {
                atoms.push_back(BitString::from_hex(a.at("x").get<std::string>(), n));
                w.push_back(a.at("p").get<double>());
            }
            b.dist = FiniteDistribution(n, std::move(atoms), std::move(w));
            make_target(b.fn);  // validates the type and representation
            return b;
        }
        CompareBundle b;
        b.family = family;
        b.truth = truth;
        b.far_eps = far_eps;
        b.seed = seed;
        b.cmp.type = fn.at("type").get<std::string>();
        b.cmp.n = n;
        if (b.cmp.type == "table") b.cmp.orient = fn.at("orient").get<std::vector<std::uint8_t>>();
        else b.cmp.pi = fn.at("pi").get<std::vector<std::uint32_t>>();
        std::vector<Edge> edges;
        std::vector<double> w;
        for (const auto& e : dist.at("pairs")) {
            edges.push_back({e.at("u").get<std::uint32_t>(), e.at("v").get<std::uint32_t>()});
            w.push_back(e.at("p").get<double>());
        }
        b.dist = PairDistribution(n, std::move(edges), std::move(w));
        make_less(b.cmp);
        return b;
    } catch (const Json::exception& e) {
        throw UsageError(std::string("malformed instance: ") + e.what());
    } catch (const ContractViolation& e) {
        throw UsageError(std::string("invalid instance: ") + e.what());
    }
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

inline Bundle load_bundle(const std::string& path) { return bundle_from_json(read_json_file(path)); }

// Birthday experiments:
//   {type:"bipartite", u_size, v_size, edges:[[u,v]], mu, nu, m, m2, trials}
//   {type:"hypergraph", v_size, k, edges:[[...]], mu, m, trials}
using Experiment = std::variant<BipartiteExperiment, HypergraphExperiment>;

inline Json to_json(const BipartiteExperiment& e) {
    Json edges = Json::array();
    for (auto [u, v] : e.edges) edges.push_back({u, v});
    return Json{{"type", "bipartite"}, {"u_size", e.u_size}, {"v_size", e.v_size}, {"edges", edges},
                {"mu", e.mu},          {"nu", e.nu},         {"m", e.m},           {"m2", e.m2},
                {"trials", e.trials}};
}

inline Json to_json(const HypergraphExperiment& e) {
    return Json{{"type", "hypergraph"}, {"v_size", e.v_size}, {"k", e.k},           {"edges", e.edges},
                {"mu", e.mu},           {"m", e.m},           {"trials", e.trials}};
}

inline Experiment experiment_from_json(const Json& j) {
    try {
        const auto type = j.at("type").get<std::string>();
        if (type == "bipartite") {
            BipartiteExperiment e;
            e.u_size = j.at("u_size").get<std::size_t>();
            e.v_size = j.at("v_size").get<std::size_t>();
            for (const auto& p : j.at("edges")) e.edges.emplace_back(p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>());
            e.mu = j.at("mu").get<std::vector<double>>();
            e.nu = j.at("nu").get<std::vector<double>>();
            e.m = j.at("m").get<std::uint64_t>();
            e.m2 = j.at("m2").get<std::uint64_t>();
            e.trials = detail::get_or<std::uint64_t>(j, "trials", 1000);
            return e;
        }
        if (type == "hypergraph") {
            HypergraphExperiment e;
            e.v_size = j.at("v_size").get<std::size_t>();
            e.k = j.at("k").get<std::size_t>();
            e.edges = j.at("edges").get<std::vector<std::vector<std::uint32_t>>>();
            e.mu = j.at("mu").get<std::vector<double>>();
            e.m = j.at("m").get<std::uint64_t>();
            e.trials = detail::get_or<std::uint64_t>(j, "trials", 1000);
            return e;
        }
        throw UsageError("unknown experiment type: " + type);
    } catch (const Json::exception& e) {
        throw UsageError(std::string("malformed experiment: ") + e.what());
    }
}

// CSV reporting. runtime_ms is the only column outside the determinism check.
struct TrialRow {
    std::string family;
    std::size_t n = 0;
    double eps = 0, delta = 0;
    std::string trial;  // index, or "summary"
    std::uint64_t seed = 0;
    std::string verdict;  // accept | reject | overbudget | mean
    std::uint64_t queries = 0, samples = 0;
    double runtime_ms = 0;

    friend bool operator==(const TrialRow&, const TrialRow&) = default;
};

inline constexpr const char* csv_header = "family,n,eps,delta,trial,seed,verdict,queries,samples,runtime_ms";

// Shortest representation that parses back to the same double.
inline std::string format_double(double x) { return Json(x).dump(); }

inline std::string csv_line(const TrialRow& r) {
    std::ostringstream o;
    char rt[64];
    std::snprintf(rt, sizeof rt, "%.3f", r.runtime_ms);
    o << r.family << ',' << r.n << ',' << format_double(r.eps) << ',' << format_double(r.delta) << ',' << r.trial
      << ',' << r.seed << ',' << r.verdict << ',' << r.queries << ',' << r.samples << ',' << rt;
    return o.str();
}

// The CSV with runtime_ms dropped: the byte-compared part of a report.
inline std::string deterministic_part(const std::vector<TrialRow>& rows) {
    std::string out;
    for (const auto& r : rows) {
        auto line = csv_line(r);
        out += line.substr(0, line.rfind(','));
        out += '\n';
    }
    return out;
}

inline std::string to_csv(const std::vector<TrialRow>& rows) {
    std::string out = std::string(csv_header) + "\n";
    for (const auto& r : rows) out += csv_line(r) + "\n";
    return out;
}

inline std::vector<TrialRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != csv_header) throw UsageError("csv: missing header");
    std::vector<TrialRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
        if (f.size() != 10) throw UsageError("csv: expected 10 columns: " + line);
        try {
            TrialRow r;
            r.family = f[0];
            r.n = std::stoull(f[1]);
            r.eps = std::stod(f[2]);
            r.delta = std::stod(f[3]);
            r.trial = f[4];
            r.seed = std::stoull(f[5]);
            r.verdict = f[6];
            r.queries = std::stoull(f[7]);
            r.samples = std::stoull(f[8]);
            r.runtime_ms = std::stod(f[9]);
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw UsageError("csv: bad value in: " + line);
        }
    }
    return rows;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
}

}  // namespace sublin
