#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "birthday.hpp"
#include "dl_tester.hpp"
#include "exact.hpp"
#include "instances.hpp"
#include "io.hpp"
#include "mdl_tester.hpp"
#include "stats.hpp"
#include "total_tester.hpp"

namespace sublin {

enum class TesterKind { total, mdl, dl };

inline const char* to_string(TesterKind k) {
    switch (k) {
        case TesterKind::total: return "test-total";
        case TesterKind::mdl: return "test-mdl";
        default: return "test-dl";
    }
}

struct RunConfig {
    TesterKind tester = TesterKind::total;
    std::string family;  // empty: the tester's default yes family
    std::size_t n = 1024;
    double eps = 0.1;
    double delta = 1.0 / 6;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> budget;  // function-query cap; default is B(n, ε)
    std::map<std::string, double> consts;
    std::optional<std::string> instance;  // fixed instance file for every trial
    std::size_t jobs = 1;
};

struct Params {
    TotalParams total;
    DlParams dl;  // dl.mdl doubles as the MDL tester's parameters
    std::size_t support = 0;  // instance support size; 0 means n
};

// Applies --delta and --const overrides. Unknown names are usage errors.
inline Params resolve_params(const RunConfig& cfg) {
    Params p;
    p.dl.mdl.delta = cfg.delta;
    auto& m = p.dl.mdl;
    const std::map<std::string, double*> slots = {
        {"c_sk", &p.total.c_sk},        {"c_lc", &p.total.c_lc},
        {"c_long", &p.total.c_long},    {"overcrowd", &p.total.overcrowd},
        {"c_pre", &m.c_pre},            {"c_big_thresh", &m.c_big_thresh},
        {"c_big_rounds", &m.c_big_rounds}, {"c_big_inner", &m.c_big_inner},
        {"c_big_stop", &m.c_big_stop},  {"c_small", &m.c_small},
        {"c_nil", &m.c_nil},            {"c_type", &m.c_type},
        {"c_t2", &m.c_t2},              {"rounds_c", &p.dl.rounds_c},
        {"inner_c", &p.dl.inner_c},     {"accept_c", &p.dl.accept_c},
        {"t_amplify", &p.dl.t_amplify}, {"testdl_samples_c", &p.dl.testdl_samples_c},
        {"testdl_reject_c", &p.dl.testdl_reject_c},
    };
    for (const auto& [name, value] : cfg.consts) {
        if (!(value > 0) || !std::isfinite(value)) throw UsageError("--const " + name + " must be positive");
        if (name == "t_fixed") p.dl.t_fixed = static_cast<std::uint64_t>(value);
        else if (name == "support") p.support = static_cast<std::size_t>(value);
        else if (auto it = slots.find(name); it != slots.end()) *it->second = value;
        else throw UsageError("unknown constant: " + name);
    }
    return p;
}

inline void validate(const RunConfig& cfg) {
    if (cfg.n < 2) throw UsageError("n must be at least 2");
    if (!(cfg.eps > 0 && cfg.eps < 1)) throw UsageError("eps must lie in (0,1)");
    if (!(cfg.delta > 0 && cfg.delta < 1)) throw UsageError("delta must lie in (0,1)");
    if (cfg.trials < 1) throw UsageError("trials must be at least 1");
    if (cfg.jobs < 1) throw UsageError("jobs must be at least 1");
}

inline std::vector<std::string> families(TesterKind k) {
    switch (k) {
        case TesterKind::total: return {"total-yes", "pentagon", "tournament"};
        case TesterKind::mdl:
            return {"mdl-yes", "groups4-yes", "groups4-no", "table",
                    "planted-1", "planted-2", "planted-3", "planted-4", "planted-5"};
        default: return {"dl-yes", "mdl-yes", "groups4-yes", "groups4-no", "table"};
    }
}

inline std::string default_family(TesterKind k) { return families(k).front(); }

// Builds one instance of `family` from the instance stream.
inline Bundle make_bundle(const std::string& family, std::size_t n, double eps, std::size_t support,
                          SeededRng& rng) {
    const std::size_t s = support ? support : n;
    try {
        if (family == "total-yes") return gen_total_yes(n, std::min(s, n * (n - 1) / 2), rng);
        if (family == "pentagon") return gen_pentagon(n, rng);
        if (family == "tournament") return gen_random_tournament(n, std::min(s, n * (n - 1) / 2), rng);
        if (family == "mdl-yes") return gen_mdl_yes(n, s, rng);
        if (family == "dl-yes") return gen_dl_yes(n, s, rng);
        if (family == "groups4-yes") return gen_groups4(n, rng, true);
        if (family == "groups4-no") return gen_groups4(n, rng, false);
        if (family == "table") {
            if (n > 20) throw UsageError("table family needs n <= 20");
            return gen_random_table(n, s, rng);
        }
        if (family.rfind("planted-", 0) == 0 && family.size() == 9) {
            const int c = family[8] - '0';
            auto base = gen_mdl_yes(n, s, rng);
            auto r = gen_planted_violation(base, c, std::min(0.99, 2 * eps), rng);
            if (!r.bundle) throw UsageError("planted family infeasible: " + r.infeasible);
            return *r.bundle;
        }
    } catch (const ContractViolation& e) {
        throw UsageError(family + ": " + e.what());
    }
    throw UsageError("unknown family: " + family);
}

inline bool is_comparison_family(const std::string& f) {
    return f == "total-yes" || f == "pentagon" || f == "tournament";
}

inline LedgerReport tester_budget(TesterKind k, std::size_t n, double eps, const Params& p) {
    switch (k) {
        case TesterKind::total: return total_budget(n, eps, p.total);
        case TesterKind::mdl: return mdl_budget(n, eps, p.dl.mdl);
        default: return dl_budget(n, eps, p.dl);
    }
}

struct TrialOutcome {
    TrialRow row;
    std::string stage, witness;
};

struct TrialReport {
    std::vector<TrialOutcome> trials;
    std::uint64_t accepts = 0, rejects = 0, overbudget = 0;
    LedgerReport total;   // sum of per-trial ledgers
    LedgerReport budget;  // closed-form B(n, ε)
    Interval accept_ci, reject_ci;

    double accept_rate() const {
        const auto decided = accepts + rejects + overbudget;
        return decided ? static_cast<double>(accepts) / static_cast<double>(decided) : 0;
    }
    double reject_rate() const {
        const auto decided = accepts + rejects + overbudget;
        return decided ? static_cast<double>(rejects) / static_cast<double>(decided) : 0;
    }
    std::vector<TrialRow> rows() const {
        std::vector<TrialRow> out;
        for (const auto& t : trials) out.push_back(t.row);
        return out;
    }
};

// Runs body(i) for i in [0, count) on `jobs` threads; the first exception is rethrown.
inline void parallel_for(std::uint64_t count, std::size_t jobs, const std::function<void(std::uint64_t)>& body) {
    jobs = std::max<std::size_t>(1, std::min<std::uint64_t>(jobs, count));
    if (jobs == 1) {
        for (std::uint64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (std::uint64_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mu);
                    if (!error) error = std::current_exception();
                    next = count;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// One tester run on a fixed bundle with its own ledger.
inline Verdict run_tester(TesterKind k, const Bundle& bundle, double eps, const Params& p, SeededRng& rng,
                          QueryLedger& ledger) {
    if (k == TesterKind::total) {
        const auto* b = std::get_if<CompareBundle>(&bundle);
        if (!b) throw UsageError("test-total needs a comparison instance");
        auto sigma = make_oracle(*b, &ledger);
        PairSampler d(b->dist, rng, &ledger);
        auto v = test_total_ordering(sigma, d, eps, p.total);
        v.ledger = ledger.report();
        return v;
    }
    const auto* b = std::get_if<BoolBundle>(&bundle);
    if (!b) throw UsageError(std::string(to_string(k)) + " needs a Boolean instance");
    auto f = make_oracle(*b, &ledger);
    Sampler d(b->dist, rng, &ledger);
    auto v = k == TesterKind::mdl ? monotone_dl_tester(f, d, eps, p.dl.mdl) : decision_list_tester(f, d, eps, p.dl);
    v.ledger = ledger.report();
    return v;
}

inline std::size_t bundle_width(const Bundle& b) {
    return std::visit([](const auto& x) { return x.n(); }, b);
}

inline TrialReport run_trials(const RunConfig& cfg) {
    validate(cfg);
    const Params p = resolve_params(cfg);
    std::optional<Bundle> fixed;
    std::string family = cfg.family.empty() ? default_family(cfg.tester) : cfg.family;
    std::size_t n = cfg.n;
    if (cfg.instance) {
        fixed = load_bundle(*cfg.instance);
        n = bundle_width(*fixed);
        if (cfg.family.empty()) family = std::visit([](const auto& x) { return x.family; }, *fixed);
    } else {
        const auto fams = families(cfg.tester);
        if (std::find(fams.begin(), fams.end(), family) == fams.end())
            throw UsageError("unknown family for " + std::string(to_string(cfg.tester)) + ": " + family);
    }
    TrialReport rep;
    rep.budget = tester_budget(cfg.tester, n, cfg.eps, p);
    const std::uint64_t qcap = cfg.budget ? std::min(*cfg.budget, rep.budget.function_queries) : rep.budget.function_queries;
    rep.trials.resize(cfg.trials);
    parallel_for(cfg.trials, cfg.jobs, [&](std::uint64_t t) {
        const std::uint64_t s = trial_seed(cfg.seed, t);
        SeededRng inst_rng(s, 0), test_rng(s, 1);
        const Bundle bundle = fixed ? *fixed : make_bundle(family, n, cfg.eps, p.support, inst_rng);
        QueryLedger ledger(qcap, rep.budget.samples_drawn);
        TrialOutcome out;
        out.row = {family, n, cfg.eps, cfg.delta, std::to_string(t), s, "", 0, 0, 0};
        const auto start = std::chrono::steady_clock::now();
        try {
            auto v = run_tester(cfg.tester, bundle, cfg.eps, p, test_rng, ledger);
            out.row.verdict = v.accepted() ? "accept" : "reject";
            out.stage = v.stage;
            out.witness = v.witness;
        } catch (const BudgetExhausted& e) {
            out.row.verdict = "overbudget";
            out.stage = "budget";
            out.witness = e.what();
        }
        out.row.runtime_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        out.row.queries = ledger.function_queries();
        out.row.samples = ledger.samples_drawn();
        rep.trials[t] = std::move(out);
    });
    for (const auto& t : rep.trials) {
        if (t.row.verdict == "accept") ++rep.accepts;
        else if (t.row.verdict == "reject") ++rep.rejects;
        else ++rep.overbudget;
        rep.total += {t.row.queries, t.row.samples};
    }
    const auto decided = rep.accepts + rep.rejects + rep.overbudget;
    rep.accept_ci = wilson(rep.accepts, decided);
    rep.reject_ci = wilson(rep.rejects, decided);
    return rep;
}

// Mean-valued summary row for a block of trial rows at one n.
inline TrialRow summary_row(const std::vector<TrialRow>& rows, std::uint64_t seed) {
    TrialRow s = rows.front();
    s.trial = "summary";
    s.seed = seed;
    s.verdict = "mean";
    double q = 0, smp = 0, rt = 0;
    for (const auto& r : rows) {
        q += static_cast<double>(r.queries);
        smp += static_cast<double>(r.samples);
        rt += r.runtime_ms;
    }
    const double k = static_cast<double>(rows.size());
    s.queries = static_cast<std::uint64_t>(std::llround(q / k));
    s.samples = static_cast<std::uint64_t>(std::llround(smp / k));
    s.runtime_ms = rt / k;
    return s;
}

struct ScalingResult {
    std::vector<TrialRow> rows;  // trial rows per n, each block followed by its summary row
    std::vector<TrialReport> reports;
    bool overbudget = false;
};

inline ScalingResult scaling_experiment(RunConfig cfg, const std::vector<std::size_t>& ns) {
    if (ns.empty()) throw UsageError("scaling needs at least one n");
    ScalingResult out;
    const std::uint64_t master = cfg.seed;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        cfg.n = ns[i];
        cfg.seed = trial_seed(master, 1'000'000 + i);  // independent seeds per n
        auto rep = run_trials(cfg);
        auto rows = rep.rows();
        out.rows.insert(out.rows.end(), rows.begin(), rows.end());
        out.rows.push_back(summary_row(rows, cfg.seed));
        out.overbudget = out.overbudget || rep.overbudget > 0;
        out.reports.push_back(std::move(rep));
    }
    return out;
}

// Exact-oracle cross-check at tiny n.
struct OracleCheckConfig {
    TesterKind tester = TesterKind::mdl;
    std::size_t n = 4;
    std::size_t bundles = 200;
    std::uint64_t trials = 400;
    double eps = 0.2;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    Params params;
};

enum class Stratum { member, between, far };

inline const char* to_string(Stratum s) {
    switch (s) {
        case Stratum::member: return "member";
        case Stratum::far: return "far";
        default: return "between";
    }
}

struct OracleCheckRow {
    std::string family;
    double distance = 0;
    Stratum stratum = Stratum::between;
    std::uint64_t accepts = 0, trials = 0;
    bool violation = false;

    double accept_rate() const { return trials ? static_cast<double>(accepts) / static_cast<double>(trials) : 0; }
};

struct OracleCheckReport {
    std::vector<OracleCheckRow> rows;
    std::size_t violations() const {
        std::size_t v = 0;
        for (const auto& r : rows) v += r.violation;
        return v;
    }
    std::size_t count(Stratum s) const {
        std::size_t c = 0;
        for (const auto& r : rows) c += r.stratum == s;
        return c;
    }
};

// Half in-class functions under random supported D, half random tables under
// full-support D, where distance 0 coincides with class membership.
inline std::vector<BoolBundle> oracle_corpus(TesterKind k, std::size_t n, std::size_t count, std::uint64_t seed) {
    if (n > exact_dl_max_n) throw SizeRefused("oracle corpus: n > 6");
    std::vector<BoolBundle> out;
    const std::size_t full = std::size_t{1} << n;
    for (std::size_t i = 0; i < count; ++i) {
        SeededRng rng(trial_seed(seed, i), 0);
        if (i % 2 == 0) {
            const std::size_t s = 1 + rng.below(full);
            auto b = k == TesterKind::dl ? gen_dl_yes(n, s, rng) : gen_mdl_yes(n, s, rng);
            out.push_back(std::move(b));
        } else {
            out.push_back(gen_random_table(n, full, rng));
        }
    }
    return out;
}

inline double exact_distance(TesterKind k, const BoolBundle& b) {
    auto target = make_target(b.fn);
    return k == TesterKind::dl ? dist_dl(target, b.dist).distance : dist_mdl(target, b.dist).distance;
}

inline OracleCheckReport oracle_check(const OracleCheckConfig& cfg, const std::vector<BoolBundle>& corpus) {
    if (cfg.tester == TesterKind::total) throw UsageError("oracle-check runs test-mdl or test-dl");
    if (!(cfg.eps > 0 && cfg.eps < 1)) throw UsageError("eps must lie in (0,1)");
    OracleCheckReport rep;
    const double threshold = contract_rate - contract_slack;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& b = corpus[i];
        OracleCheckRow row;
        row.family = b.family;
        row.distance = exact_distance(cfg.tester, b);
        row.stratum = row.distance <= 1e-12 ? Stratum::member : row.distance >= cfg.eps - 1e-12 ? Stratum::far : Stratum::between;
        std::vector<std::uint8_t> acc(cfg.trials, 0);
        const std::uint64_t bseed = trial_seed(cfg.seed, i);
        const Bundle bundle = b;
        parallel_for(cfg.trials, cfg.jobs, [&](std::uint64_t t) {
            SeededRng rng(trial_seed(bseed, t), 1);
            QueryLedger ledger;
            acc[t] = run_tester(cfg.tester, bundle, cfg.eps, cfg.params, rng, ledger).accepted();
        });
        for (auto a : acc) row.accepts += a;
        row.trials = cfg.trials;
        if (row.stratum == Stratum::member) row.violation = row.accept_rate() < threshold;
        if (row.stratum == Stratum::far) row.violation = 1 - row.accept_rate() < threshold;
        rep.rows.push_back(row);
    }
    return rep;
}

// Built-in in-regime birthday experiments with fixed, exactly certifiable weights.
struct NamedBipartite {
    std::string name;
    BipartiteExperiment exp;
};
struct NamedHypergraph {
    std::string name;
    HypergraphExperiment exp;
};

// |U| = |V| = 12: a perfect matching plus the chords u_i -> v_{i+1} on even i.
// μ and ν put 0.06 on each vertex and 0.28 on #.
inline NamedBipartite builtin_bipartite(std::uint64_t trials = 1000) {
    BipartiteExperiment e;
    e.u_size = e.v_size = 12;
    for (std::uint32_t i = 0; i < 12; ++i) e.edges.emplace_back(i, i);
    for (std::uint32_t i = 0; i < 12; i += 2) e.edges.emplace_back(i, i + 1);
    e.mu.assign(13, 0.06);
    e.mu[12] = 0.28;
    e.nu = e.mu;
    e.trials = trials;
    const double eps = certified_eps(e);
    const auto m = static_cast<std::uint64_t>(
        std::ceil(std::max(100.0 / eps, std::sqrt(100.0 * static_cast<double>(e.u_size)) / eps) - 1e-9));
    e.m = e.m2 = m;
    return {"bipartite-12x12", e};
}

// Disjoint k-edges covering 24 vertices; μ puts 0.0375 on each vertex and 0.1 on #.
inline NamedHypergraph builtin_hypergraph(std::size_t k, std::uint64_t trials = 1000) {
    HypergraphExperiment e;
    e.v_size = 24;
    e.k = k;
    for (std::uint32_t s = 0; s + k <= 24; s += static_cast<std::uint32_t>(k)) {
        std::vector<std::uint32_t> edge;
        for (std::uint32_t j = 0; j < k; ++j) edge.push_back(s + j);
        e.edges.push_back(edge);
    }
    e.mu.assign(25, 0.9 / 24);
    e.mu[24] = 0.1;
    e.trials = trials;
    const double eps = certified_eps(e);
    e.m = static_cast<std::uint64_t>(std::ceil(hypergraph_min_samples(e.v_size, k, eps) - 1e-9));
    return {std::to_string(k) + "-uniform-24", e};
}

struct BirthdayResult {
    std::string name;
    double certified_eps = 0;
    bool in_regime = false;
    std::uint64_t m = 0, m2 = 0, trials = 0;
    double rate = 0;
    Interval ci;
};

inline BirthdayResult run_experiment(const std::string& name, const Experiment& exp, std::uint64_t seed) {
    SeededRng rng(seed, 2);
    BirthdayResult r;
    r.name = name;
    if (const auto* b = std::get_if<BipartiteExperiment>(&exp)) {
        r.certified_eps = certified_eps(*b);
        r.in_regime = in_regime(*b, r.certified_eps);
        r.m = b->m;
        r.m2 = b->m2;
        r.trials = b->trials;
        r.rate = run_bipartite_birthday(*b, rng);
    } else {
        const auto& h = std::get<HypergraphExperiment>(exp);
        r.certified_eps = certified_eps(h);
        r.in_regime = in_regime(h, r.certified_eps);
        r.m = h.m;
        r.trials = h.trials;
        r.rate = run_hypergraph_birthday(h, rng);
    }
    r.ci = wilson(static_cast<std::uint64_t>(std::llround(r.rate * static_cast<double>(r.trials))), r.trials);
    return r;
}

}  // namespace sublin
