#pragma once

// Command-line front end. Exit codes: 0 success / feasible / pass, 1 negative
// verdict, 2 usage or input error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bordercurve.hpp"

namespace bordercurve::cli {

struct RunConfig {
    std::string subcommand;
    std::vector<std::string> inputs;
    double eta = kDefaultEta;
    double t_max = kDefaultTmax;
    std::size_t grid = 0;  // 0: per-command default
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    std::string out;
    bool json = false;
};

/// Rounds to 12 significant digits for JSON output.
inline double sig12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

inline nlohmann::json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return sig12(x);
}

inline ReducedForm read_forms(const std::vector<std::string>& paths) {
    if (paths.empty()) throw InputError("expected one reduced-form CSV per bidder");
    std::vector<MonotoneFn> xs;
    for (const auto& p : paths) {
        MonotoneFn f = MonotoneFn::read_csv(p);
        if (!f.is_cdf(1e-9)) throw InputError(p + ": not a CDF on [0,1] (nondecreasing, values in [0,1], x(1) = 1)");
        xs.push_back(std::move(f));
    }
    return ReducedForm(std::move(xs), false);
}

/// Opens `name` inside the output directory, or returns nullptr for stdout.
inline std::unique_ptr<std::ofstream> open_out(const RunConfig& cfg, const std::string& name) {
    if (cfg.out.empty()) return nullptr;
    std::filesystem::create_directories(cfg.out);
    auto f = std::make_unique<std::ofstream>(std::filesystem::path(cfg.out) / name);
    if (!*f) throw InputError("cannot write " + (std::filesystem::path(cfg.out) / name).string());
    return f;
}

inline int cmd_feasible(const RunConfig& cfg, std::ostream& out) {
    const ReducedForm x = read_forms(cfg.inputs);
    const PrincipalCurve c(x);
    const auto v = check_feasible(c, cfg.eta, cfg.grid ? cfg.grid : 4096);
    if (cfg.json) {
        nlohmann::json j{{"status", status_name(v.status)}, {"sup_B", num(v.sup_B)},
                         {"witness_s", num(v.witness_s)}, {"witness_B", num(v.witness_B)},
                         {"extremality_gap", num(v.extremality_gap)}, {"grid_points", v.grid_points}};
        out << j.dump(2) << '\n';
    } else {
        out << std::setprecision(12) << "status: " << status_name(v.status) << "\nsup B: " << v.sup_B
            << "\nwitness s: " << v.witness_s << " (B = " << v.witness_B << ")\nwitness u:";
        for (double u : c.nu(v.witness_s)) out << ' ' << u;
        out << "\nextremality gap: " << v.extremality_gap << '\n';
    }
    return v.status == FeasibilityStatus::Infeasible ? 1 : 0;
}

inline int cmd_extremal(const RunConfig& cfg, std::ostream& out) {
    const ReducedForm x = read_forms(cfg.inputs);
    const PrincipalCurve c(x);
    const auto v = check_feasible(c, cfg.eta, cfg.grid ? cfg.grid : 4096);
    const bool feasible = v.status != FeasibilityStatus::Infeasible;
    const bool extremal = feasible && v.extremality_gap <= cfg.eta;
    if (cfg.json) {
        nlohmann::json j{{"extremal", extremal}, {"feasible", feasible}, {"sup_B", num(v.sup_B)},
                         {"extremality_gap", num(v.extremality_gap)}};
        out << j.dump(2) << '\n';
    } else {
        out << std::setprecision(12) << (extremal ? "extremal" : feasible ? "not extremal" : "infeasible")
            << "\nsup B: " << v.sup_B << "\nextremality gap: " << v.extremality_gap << '\n';
    }
    return extremal ? 0 : 1;
}

inline int cmd_curve(const RunConfig& cfg, std::ostream& out) {
    const ReducedForm x = read_forms(cfg.inputs);
    const PrincipalCurve c(x);
    auto f = open_out(cfg, "curve.csv");
    write_curve_csv(f ? *f : out, c, cfg.grid ? cfg.grid : 1001);
    return 0;
}

inline Environment env_from(const RunConfig& cfg, const std::string& path) {
    Environment e = load_environment(path);
    if (cfg.t_max != kDefaultTmax) {
        Tolerances tol = e.tolerances();
        tol.eta = cfg.eta;
        e = Environment(e.bidders(), cfg.t_max, tol);
    }
    return e;
}

inline int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    if (cfg.inputs.size() != 1) throw InputError("solve takes exactly one environment file");
    const Environment env = env_from(cfg, cfg.inputs[0]);
    SolverOptions opt;
    if (cfg.grid) opt.base_nodes = cfg.grid;
    const SolverPath path = solve_path(env, opt);
    nlohmann::json summary;
    summary["T"] = path.T ? num(*path.T) : nlohmann::json(nullptr);
    summary["regime"] = regime_name(path.regime);
    summary["nodes"] = path.t.size();
    summary["mre_residual"] = num(mre_residual(path));
    const auto reg = regularity_report(path);
    summary["regularity"] = {{"worst_concavity", num(reg.worst_concavity)},
                             {"t_concavity", num(reg.t_concavity)},
                             {"worst_uniqueness", num(reg.worst_uniqueness)},
                             {"t_uniqueness", num(reg.t_uniqueness)},
                             {"ok", reg.ok()}};
    std::vector<std::string> warnings = env.warnings();
    warnings.insert(warnings.end(), path.warnings.begin(), path.warnings.end());
    if (path.regime != Regime::Unsupported) {
        const ReducedForm xstar = optimal_reduced_form(path);
        summary["revenue"] = num(expected_revenue(env, xstar));
        try {
            summary["revenue_myerson"] = num(expected_revenue(env, myerson_reduced_form(env)));
        } catch (const Error& e) {
            summary["revenue_myerson"] = nullptr;
            warnings.push_back(std::string("myerson comparison unavailable: ") + e.what());
        }
        const ScoreRule rule = optimal_fractions(path);
        if (auto f = open_out(cfg, "allocation.csv")) write_allocation_csv(*f, path, xstar, rule);
    } else {
        summary["revenue"] = nullptr;
        summary["revenue_myerson"] = nullptr;
    }
    summary["warnings"] = warnings;
    if (auto f = open_out(cfg, "path.csv")) write_path_csv(*f, path);
    if (auto f = open_out(cfg, "summary.json")) *f << summary.dump(2) << '\n';
    if (cfg.json || cfg.out.empty()) {
        out << summary.dump(2) << '\n';
    } else {
        out << std::setprecision(12) << "regime: " << regime_name(path.regime) << "\nT: "
            << (path.T ? std::to_string(*path.T) : std::string("infinite")) << "\nrevenue: "
            << summary["revenue"] << "\nwrote path.csv, allocation.csv, summary.json to " << cfg.out
            << '\n';
    }
    return path.regime == Regime::Unsupported ? 1 : 0;
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    if (cfg.inputs.empty()) throw InputError("simulate needs an environment file or score CSVs");
    std::optional<Environment> env;
    ScoreRule rule;
    ReducedForm exact;
    const std::string& first = cfg.inputs[0];
    if (cfg.inputs.size() == 1 && std::filesystem::path(first).extension() == ".json") {
        env = env_from(cfg, first);
        const SolverPath path = solve_path(*env);
        if (path.regime == Regime::Unsupported) throw DomainError("solver regime unsupported");
        rule = optimal_fractions(path);
        exact = optimal_reduced_form(path);
    } else {
        std::vector<MonotoneFn> q;
        for (const auto& p : cfg.inputs) q.push_back(MonotoneFn::read_csv(p));
        rule = ScoreRule(std::move(q));
        exact = induced_reduced_form_exact(rule);
    }
    const McEstimate mc = induced_reduced_form_mc(rule, cfg.samples, cfg.seed, cfg.grid ? cfg.grid : 101);
    auto f = open_out(cfg, "simulate.csv");
    write_simulate_csv(f ? *f : out, exact, mc);
    if (f && env) {
        bool quad = true;
        for (std::size_t i = 0; i < env->size(); ++i) quad = quad && env->quadratic_in_x(i);
        if (quad) {
            const auto r = revenue_mc(*env, rule, cfg.samples, cfg.seed);
            out << std::setprecision(12) << "revenue (Monte Carlo): " << r.mean << " +/- " << r.se
                << "\nrevenue (quadrature): " << expected_revenue(*env, exact) << '\n';
        }
    }
    return 0;
}

inline int cmd_revenue(const RunConfig& cfg, std::ostream& out) {
    if (cfg.inputs.size() < 2) throw InputError("revenue takes an environment file and reduced-form CSVs");
    const Environment env = env_from(cfg, cfg.inputs[0]);
    const ReducedForm x = read_forms({cfg.inputs.begin() + 1, cfg.inputs.end()});
    const double rev = expected_revenue(env, x);
    if (cfg.json)
        out << nlohmann::json{{"revenue", num(rev)}}.dump(2) << '\n';
    else
        out << std::setprecision(12) << rev << '\n';
    return 0;
}

struct Check {
    std::string name;
    double value;
    double expected;
    double tol;
    bool pass() const { return std::abs(value - expected) <= tol; }
};

/// Known-answer checks over the bundled fixtures.
inline std::vector<Check> verify_suite() {
    std::vector<Check> out;
    {
        const Environment ev = fixtures::ev_power_env({1.0, 0.5});
        out.push_back({"ev-power (1,1/2): Myerson revenue", expected_revenue(ev, myerson_reduced_form(ev)),
                       10.0 / 21.0, 1e-6});
        const ReducedForm excl_exact(
            {MonotoneFn::constant(1.0),
             MonotoneFn({0.0, 1.0}, {Piece::constant(0.0)}, 1.0)},
            false);
        out.push_back({"ev-power (1,1/2): exclusive bidder 1 revenue", expected_revenue(ev, excl_exact),
                       0.5, 1e-9});
        const SolverPath p = solve_path(ev);
        out.push_back({"ev-power (1,1/2): optimal revenue", expected_revenue(ev, optimal_reduced_form(p)),
                       0.5, 1e-6});
    }
    {
        const SolverPath p = solve_path(fixtures::cra_mixed_env(2, 1));
        out.push_back({"cra 2+1: cutoff T", p.T ? *p.T : kInf, reference::cra_2n1a_cutoff(), 1e-6});
        const ReducedForm x = optimal_reduced_form(p);
        out.push_back({"cra 2+1: neutral bidder jump at 1/2", x[0](0.5), 1.0 / 6.0, 1e-5});
        double lo = 0.55, hi = 0.85;
        for (int it = 0; it < 80; ++it) {
            const double m = 0.5 * (lo + hi);
            (x[0](m) < x[2](m) ? lo : hi) = m;
        }
        out.push_back({"cra 2+1: crossing point", 0.5 * (lo + hi), reference::cra_2n1a_crossing(), 1e-4});
        double err = 0.0;
        for (double u : numerics::linspace(0.0, 0.999, 1000))
            err = std::max(err, std::abs(x[2](u) - reference::cra_2n1a_averse(u)));
        out.push_back({"cra 2+1: averse bidder closed form (sup error)", err, 0.0, 1e-5});
    }
    {
        const PsiFn psi = psi_transform(fixtures::staircase_form());
        const double at[] = {0.0, 1.0 / 16.0, 0.25, 3.0 / 8.0, 9.0 / 16.0};
        const double want[] = {0.25, 0.25, 0.5, 0.75, 0.75};
        for (int k = 0; k < 5; ++k) {
            std::ostringstream name;
            name << "staircase psi(" << at[k] << ")";
            out.push_back({name.str(), psi(at[k]), want[k], 1e-9});
        }
    }
    {
        out.push_back({"power forms (0.6,0.6): sup B", check_feasible(fixtures::power_forms({0.6, 0.6})).sup_B,
                       1.2, 1e-6});
        out.push_back({"power forms (0.5,0.5): extremality gap",
                       check_feasible(fixtures::power_forms({0.5, 0.5})).extremality_gap, 0.0, 1e-9});
        out.push_back({"staircase pair: B(3/4,3/4)", border_at(fixtures::staircase_pair(), {0.75, 0.75}),
                       1.0, 1e-12});
    }
    {
        const std::vector<double> betas{0.9, 0.5};
        const SolverPath p = solve_path(fixtures::ev_power_env(betas));
        double err = 0.0;
        for (std::size_t k = 0; k < p.t.size() && p.t[k] <= 20.0; ++k) {
            for (std::size_t i = 0; i < 2; ++i)
                err = std::max(err, std::abs(p.sharp[k][i] - reference::ev_power_delta(betas, i, p.t[k])));
            err = std::max(err, std::abs(p.p_sharp[k] - reference::ev_power_price(betas, p.t[k])));
        }
        out.push_back({"ev-power (0.9,0.5): path closed form (sup error)", err, 0.0, 1e-6});
    }
    return out;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const auto checks = verify_suite();
    bool all = true;
    if (cfg.json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : checks) {
            arr.push_back({{"check", c.name}, {"value", num(c.value)}, {"expected", num(c.expected)},
                           {"tol", c.tol}, {"pass", c.pass()}});
            all = all && c.pass();
        }
        out << arr.dump(2) << '\n';
    } else {
        out << std::setprecision(12);
        for (const auto& c : checks) {
            out << (c.pass() ? "PASS  " : "FAIL  ") << std::left << std::setw(50) << c.name << " value "
                << c.value << "  expected " << c.expected << "  tol " << c.tol << '\n';
            all = all && c.pass();
        }
        out << (all ? "all checks passed" : "some checks failed") << '\n';
    }
    return all ? 0 : 1;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"Border-constraint feasibility, extremality and optimal-auction toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    app.add_option("--tol", cfg.eta, "feasibility tolerance eta")->check(CLI::PositiveNumber);
    app.add_option("--tmax", cfg.t_max, "time horizon for delta paths")->check(CLI::PositiveNumber);
    app.add_option("--grid", cfg.grid, "grid size (points, nodes or levels)");
    app.add_option("--samples", cfg.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--out", cfg.out, "output directory");
    app.add_flag("--json", cfg.json, "machine-readable output");

    struct Sub {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&, std::ostream&);
        bool takes_inputs;
    };
    const Sub subs[] = {
        {"feasible", "Border feasibility of reduced forms (one CSV per bidder)", cmd_feasible, true},
        {"extremal", "extremality of reduced forms", cmd_extremal, true},
        {"curve", "principal curve and B along it", cmd_curve, true},
        {"solve", "optimal reduced form for an environment", cmd_solve, true},
        {"simulate", "Monte Carlo inducement for an environment or score CSVs", cmd_simulate, true},
        {"revenue", "expected revenue of reduced forms in an environment", cmd_revenue, true},
        {"verify", "known-answer checks", cmd_verify, false},
    };
    for (const auto& s : subs) {
        auto* sc = app.add_subcommand(s.name, s.help);
        if (s.takes_inputs) sc->add_option("inputs", cfg.inputs, "input files")->required();
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }
    for (const auto& s : subs) {
        if (!app.got_subcommand(s.name)) continue;
        cfg.subcommand = s.name;
        try {
            return s.fn(cfg, out);
        } catch (const InputError& e) {
            err << "input error: " << e.what() << '\n';
            return 2;
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return 2;
        }
    }
    return 2;
}

inline int run(int argc, char** argv) {
    return run(std::vector<std::string>(argv, argv + argc));
}

}  // namespace bordercurve::cli
