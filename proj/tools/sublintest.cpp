#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sublintest.hpp"

using namespace sublin;

namespace {

constexpr int exit_ok = 0, exit_usage = 2, exit_overbudget = 3;

struct Flags {
    std::vector<std::size_t> n{1024};
    double eps = 0.1;
    double delta = 1.0 / 6;
    std::uint64_t trials = 1;
    std::uint64_t seed = 0;
    std::string family;
    std::string instance;
    std::optional<std::uint64_t> budget;
    std::string out;
    std::size_t jobs = 1;
    std::vector<std::string> consts;
    std::string tester = "total";
    std::string oracle_tester = "mdl";
    std::size_t bundles = 200;
};

void add_common(CLI::App* app, Flags& f, bool multi_n) {
    if (multi_n) app->add_option("--n", f.n, "Instance sizes")->expected(1, -1);
    else app->add_option("--n", f.n, "Instance size")->expected(1);
    app->add_option("--eps", f.eps, "Distance parameter");
    app->add_option("--delta", f.delta, "MDL tester delta");
    app->add_option("--trials", f.trials, "Trial count");
    app->add_option("--seed", f.seed, "Master seed (default: SUBLINTEST_SEED or 0)");
    app->add_option("--family", f.family, "Instance family");
    app->add_option("--instance", f.instance, "Instance JSON file");
    app->add_option("--budget", f.budget, "Function-query cap");
    app->add_option("--out", f.out, "Output path (default: stdout)");
    app->add_option("--jobs", f.jobs, "Worker threads");
    app->add_option("--const", f.consts, "Constant override name=value");
}

std::map<std::string, double> parse_consts(const std::vector<std::string>& items) {
    std::map<std::string, double> out;
    for (const auto& s : items) {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--const expects name=value: " + s);
        try {
            std::size_t used = 0;
            double v = std::stod(s.substr(eq + 1), &used);
            if (used != s.size() - eq - 1) throw std::invalid_argument(s);
            out[s.substr(0, eq)] = v;
        } catch (const std::logic_error&) {
            throw UsageError("--const value is not a number: " + s);
        }
    }
    return out;
}

TesterKind parse_tester(const std::string& s) {
    if (s == "total" || s == "test-total") return TesterKind::total;
    if (s == "mdl" || s == "test-mdl") return TesterKind::mdl;
    if (s == "dl" || s == "test-dl") return TesterKind::dl;
    throw UsageError("unknown tester: " + s);
}

RunConfig make_config(const Flags& f, TesterKind k) {
    RunConfig c;
    c.tester = k;
    c.family = f.family;
    c.n = f.n.front();
    c.eps = f.eps;
    c.delta = f.delta;
    c.trials = f.trials;
    c.seed = f.seed;
    c.budget = f.budget;
    c.consts = parse_consts(f.consts);
    if (!f.instance.empty()) c.instance = f.instance;
    c.jobs = f.jobs;
    return c;
}

void emit(const Flags& f, const std::string& text) {
    if (f.out.empty()) std::cout << text;
    else write_text(f.out, text);
}

void print_summary(const TrialReport& r) {
    std::cerr << "trials=" << r.trials.size() << " accept=" << r.accepts << " reject=" << r.rejects
              << " overbudget=" << r.overbudget << " accept_rate=" << r.accept_rate() << " accept_ci=["
              << r.accept_ci.lo << "," << r.accept_ci.hi << "] reject_rate=" << r.reject_rate() << " reject_ci=["
              << r.reject_ci.lo << "," << r.reject_ci.hi << "] budget_queries=" << r.budget.function_queries
              << " budget_samples=" << r.budget.samples_drawn << " total_queries=" << r.total.function_queries
              << " total_samples=" << r.total.samples_drawn << "\n";
    std::map<std::string, std::uint64_t> stages;
    for (const auto& t : r.trials) ++stages[t.row.verdict + "@" + t.stage];
    for (const auto& [k, v] : stages) std::cerr << "  " << k << ": " << v << "\n";
}

int cmd_test(const Flags& f, TesterKind k) {
    auto rep = run_trials(make_config(f, k));
    emit(f, to_csv(rep.rows()));
    print_summary(rep);
    return rep.overbudget ? exit_overbudget : exit_ok;
}

int cmd_scaling(const Flags& f) {
    auto cfg = make_config(f, parse_tester(f.tester));
    auto res = scaling_experiment(cfg, f.n);
    emit(f, to_csv(res.rows));
    for (const auto& r : res.rows)
        if (r.trial == "summary")
            std::cerr << "n=" << r.n << " mean_queries=" << r.queries << " mean_samples=" << r.samples << "\n";
    return res.overbudget ? exit_overbudget : exit_ok;
}

int cmd_oracle_check(const Flags& f) {
    OracleCheckConfig cfg;
    cfg.tester = parse_tester(f.oracle_tester);
    cfg.n = f.n.front();
    cfg.bundles = f.bundles;
    cfg.trials = f.trials;
    cfg.eps = f.eps;
    cfg.seed = f.seed;
    cfg.jobs = f.jobs;
    RunConfig rc = make_config(f, cfg.tester);
    rc.n = std::max<std::size_t>(2, rc.n);
    validate(rc);
    cfg.params = resolve_params(rc);
    std::vector<BoolBundle> corpus;
    if (!f.instance.empty()) {
        auto b = load_bundle(f.instance);
        if (!std::holds_alternative<BoolBundle>(b)) throw UsageError("oracle-check needs a Boolean instance");
        corpus.push_back(std::get<BoolBundle>(b));
    } else {
        corpus = oracle_corpus(cfg.tester, cfg.n, cfg.bundles, cfg.seed);
    }
    auto rep = oracle_check(cfg, corpus);
    std::string text = "bundle,family,distance,stratum,accepts,trials,violation\n";
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& r = rep.rows[i];
        text += std::to_string(i) + "," + r.family + "," + format_double(r.distance) + "," + to_string(r.stratum) +
                "," + std::to_string(r.accepts) + "," + std::to_string(r.trials) + "," +
                (r.violation ? "1" : "0") + "\n";
    }
    emit(f, text);
    std::cerr << "bundles=" << rep.rows.size() << " member=" << rep.count(Stratum::member)
              << " far=" << rep.count(Stratum::far) << " between=" << rep.count(Stratum::between)
              << " violations=" << rep.violations() << "\n";
    return exit_ok;
}

int cmd_birthday(const Flags& f, bool trials_set) {
    std::vector<std::pair<std::string, Experiment>> exps;
    if (!f.instance.empty()) {
        exps.emplace_back(f.instance, experiment_from_json(read_json_file(f.instance)));
    } else {
        const std::string fam = f.family.empty() ? "all" : f.family;
        const std::uint64_t t = trials_set ? f.trials : 1000;
        if (fam == "bipartite" || fam == "all") {
            auto b = builtin_bipartite(t);
            exps.emplace_back(b.name, b.exp);
        }
        for (std::size_t k : {3, 4})
            if (fam == "hyper" + std::to_string(k) || fam == "all") {
                auto h = builtin_hypergraph(k, t);
                exps.emplace_back(h.name, h.exp);
            }
        if (exps.empty()) throw UsageError("unknown birthday family: " + fam);
    }
    Json out = Json::array();
    for (const auto& [name, e] : exps) {
        auto r = run_experiment(name, e, f.seed);
        out.push_back({{"name", r.name},   {"certified_eps", r.certified_eps}, {"in_regime", r.in_regime},
                       {"m", r.m},         {"m2", r.m2},                       {"trials", r.trials},
                       {"rate", r.rate},   {"wilson_lo", r.ci.lo},             {"wilson_hi", r.ci.hi}});
    }
    emit(f, out.dump(2) + "\n");
    return exit_ok;
}

int cmd_gen_instance(const Flags& f) {
    RunConfig cfg = make_config(f, TesterKind::total);
    validate(cfg);
    const Params p = resolve_params(cfg);
    if (f.family.empty()) throw UsageError("gen-instance needs --family");
    SeededRng rng(trial_seed(f.seed, 0), 0);
    Bundle b = make_bundle(f.family, cfg.n, cfg.eps, p.support, rng);
    std::visit([&](auto& x) { x.seed = f.seed; }, b);
    emit(f, serialize(b) + "\n");
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distribution-free property testers: harness"};
    app.require_subcommand(1);
    Flags f;
    if (const char* env = std::getenv("SUBLINTEST_SEED")) {
        try {
            f.seed = std::stoull(env);
        } catch (const std::logic_error&) {
            std::cerr << "SUBLINTEST_SEED is not an unsigned integer\n";
            return exit_usage;
        }
    }
    auto* total = app.add_subcommand("test-total", "Total-ordering tester");
    auto* mdl = app.add_subcommand("test-mdl", "Monotone decision list tester");
    auto* dl = app.add_subcommand("test-dl", "Decision list tester");
    auto* birthday = app.add_subcommand("birthday", "Birthday-paradox experiments");
    auto* scaling = app.add_subcommand("scaling", "Query scaling over a list of n");
    auto* oracle = app.add_subcommand("oracle-check", "Tester rates against exact distances");
    auto* gen = app.add_subcommand("gen-instance", "Write an instance JSON");
    for (auto* s : {total, mdl, dl, gen}) add_common(s, f, false);
    add_common(scaling, f, true);
    add_common(oracle, f, false);
    add_common(birthday, f, false);
    scaling->add_option("--tester", f.tester, "total | mdl | dl");
    oracle->add_option("--tester", f.oracle_tester, "mdl | dl");
    oracle->add_option("--bundles", f.bundles, "Corpus size");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }
    try {
        if (*total) return cmd_test(f, TesterKind::total);
        if (*mdl) return cmd_test(f, TesterKind::mdl);
        if (*dl) return cmd_test(f, TesterKind::dl);
        if (*scaling) return cmd_scaling(f);
        if (*oracle) return cmd_oracle_check(f);
        if (*birthday) return cmd_birthday(f, birthday->count("--trials") > 0);
        if (*gen) return cmd_gen_instance(f);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const SizeRefused& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return exit_usage;
    } catch (const ContractViolation& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}
