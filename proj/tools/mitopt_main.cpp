// Command line front end: compute locally D-optimal three point designs for
// the Mitscherlich curve mu(x) = b1 + b2 x^b3, reproduce the built-in
// illustration tables, run efficiency sweeps, Monte Carlo simulation and the
// self-verification suite.
//
// Exit codes: 0 success, 1 usage or internal error, 2 infeasible problem
// (window, domain or intercept requirements), 3 verification failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mitopt/json_io.hpp"
#include "mitopt/mle.hpp"
#include "mitopt/presets.hpp"
#include "mitopt/solver.hpp"

using namespace mitopt;

namespace {

struct Options {
    std::string family = "gaussian";
    int trials = 25;
    std::vector<double> beta{0.5, 1.0, 1.0};
    std::vector<double> bounds{presets::kLower, presets::kUpper};
    double grid_step = 0.01;
    std::optional<double> power;
    double sigma2 = 1.0;
    std::string transform = "identity";
    double dilution = 15.0;
    std::uint64_t seed = 1;
    int replicates = 200;
    int n_per_point = 100;
    bool json = false;
    bool csv = false;
    std::string out;
    bool inject_x2_sign_error = false;
};

ModelParams params_of(const Options& o) {
    return ModelParams{o.beta.at(0), o.beta.at(1), o.beta.at(2)};
}

Bounds bounds_of(const Options& o) { return Bounds{o.bounds.at(0), o.bounds.at(1)}; }

void emit(const Options& o, const std::string& text) {
    if (!o.out.empty()) {
        std::ofstream f(o.out);
        if (!f) throw ConfigError("cannot open output file: " + o.out);
        f << text;
        return;
    }
    std::cout << text;
}

std::string fmt(double v, int prec) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << v;
    return s.str();
}

std::string fmt_full(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

// The config file is a flat key=value format (one option per line, '#'
// comments). Validated up front so errors carry file:line positions and a
// bad file never triggers partial execution.
int validate_config(const std::string& path, const std::vector<std::string>& keys) {
    std::ifstream f(path);
    if (!f) {
        std::cerr << "error: cannot read config file: " << path << "\n";
        return 1;
    }
    const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    std::string line;
    int lineno = 0;
    int bad = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            std::cerr << path << ":" << lineno << ": expected key=value\n";
            ++bad;
            continue;
        }
        const std::string key = trim(t.substr(0, eq));
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            std::cerr << path << ":" << lineno << ": unknown key '" << key << "'\n";
            ++bad;
        }
    }
    return bad;
}

SolveReport run_solver(const Options& o) {
    SolverOptions sopt;
    sopt.grid_step = o.grid_step;
    const auto p = params_of(o);
    const auto b = bounds_of(o);
    if (o.power) {
        if (o.family != "gaussian") {
            throw ConfigError("--power describes a normal response; drop --family");
        }
        return hetero_solve(HeteroSpec::power(*o.power, o.sigma2), p, b, sopt);
    }
    const auto f = Family::from_name(o.family, o.trials);
    if (o.transform != "identity" && o.transform != "id") {
        return transformed_solve(f, TransformSpec::from_name(o.transform), p, b, sopt);
    }
    return solve(f, p, b, sopt);
}

int cmd_design(const Options& o) {
    const auto rep = run_solver(o);
    const auto p = params_of(o);
    const auto b = bounds_of(o);
    if (o.json) {
        const auto f = o.power ? Family::gaussian() : Family::from_name(o.family, o.trials);
        auto j = design_report_json(rep, f, p, b);
        if (o.power) {
            j["variance_power"] = *o.power;
            j["sigma2"] = o.sigma2;
        }
        if (o.transform != "identity" && o.transform != "id") j["transform"] = o.transform;
        emit(o, j.dump(2) + "\n");
        return 0;
    }
    std::ostringstream s;
    if (o.csv) {
        s << "family,beta1,beta2,beta3,x1,x2,x3,det,method,theorem_backed\n"
          << o.family << ',' << fmt_full(p.beta1) << ',' << fmt_full(p.beta2) << ','
          << fmt_full(p.beta3) << ',' << fmt_full(rep.design.x[0]) << ','
          << fmt_full(rep.design.x[1]) << ',' << fmt_full(rep.design.x[2]) << ','
          << fmt_full(rep.design.det) << ',' << to_string(rep.method) << ','
          << (rep.theorem_backed ? 1 : 0) << '\n';
        emit(o, s.str());
        return 0;
    }
    s << "family:  " << o.family;
    if (o.family == "binomial") s << " (trials " << o.trials << ")";
    if (o.power) s << "  [normal, variance sigma2 * mu^" << *o.power << "]";
    if (o.transform != "identity" && o.transform != "id") s << "  transform " << o.transform;
    s << "\nbeta:    " << p.beta1 << ' ' << p.beta2 << ' ' << p.beta3 << "\nwindow:  ["
      << b.lower << ", " << b.upper << "]\n";
    s << "design:  x = " << fmt(rep.design.x[0], 2) << "  " << fmt(rep.design.x[1], 2) << "  "
      << fmt(rep.design.x[2], 2) << "\n";
    s << "det:     " << fmt_full(rep.design.det) << "\n";
    s << "method:  " << to_string(rep.method)
      << (rep.theorem_backed ? "" : "  (no placement guarantee, grid only)") << "\n";
    const auto cond = [](const ConditionReport& c) {
        std::ostringstream t;
        t << "w>=0 " << (c.c1 ? "yes" : "no") << ", concave " << (c.c2 ? "yes" : "no")
          << ", pin-top " << (c.c3 ? "yes" : "no");
        return t.str();
    };
    s << "conditions at window ends: lower [" << cond(rep.cond_lower) << "], upper ["
      << cond(rep.cond_upper) << "]\n";
    s << "x2 bracket: [" << fmt(rep.x2_interval.lo, 4) << ", " << fmt(rep.x2_interval.hi, 4)
      << "]  contains x2: "
      << (rep.x2_interval.contains(rep.design.x[1], 1e-12) ? "yes" : "no") << "\n";
    const bool inside = rep.design.x[0] >= b.lower - 1e-12 && rep.design.x[2] <= b.upper + 1e-12 &&
                        rep.design.x[0] < rep.design.x[1] && rep.design.x[1] < rep.design.x[2];
    s << "stimuli ordered and inside window: " << (inside ? "yes" : "no") << "\n";
    emit(o, s.str());
    return 0;
}

// one row of the first illustration table: interior stimulus per family
struct Table1Row {
    ModelParams p;
    double gaussian, poisson, gamma;
    std::array<double, 3> binomial;
};

std::vector<Table1Row> table1_rows(double grid_step) {
    SolverOptions sopt;
    sopt.grid_step = grid_step;
    std::vector<Table1Row> rows;
    for (size_t r = 0; r < presets::kParamRows.size(); ++r) {
        Table1Row row;
        row.p = presets::row(static_cast<int>(r));
        const auto b = presets::window();
        row.gaussian = solve(Family::gaussian(), row.p, b, sopt).design.x[1];
        row.poisson = solve(Family::poisson(), row.p, b, sopt).design.x[1];
        row.gamma = solve(Family::gamma(), row.p, b, sopt).design.x[1];
        for (size_t t = 0; t < presets::kBinomialTrials.size(); ++t) {
            row.binomial[t] =
                solve(Family::binomial(presets::kBinomialTrials[t]), row.p, b, sopt)
                    .design.x[1];
        }
        rows.push_back(row);
    }
    return rows;
}

int cmd_table1(const Options& o) {
    const auto rows = table1_rows(o.grid_step);
    std::ostringstream s;
    if (o.json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows) {
            arr.push_back({{"beta", {r.p.beta1, r.p.beta2, r.p.beta3}},
                           {"gaussian", r.gaussian},
                           {"poisson", r.poisson},
                           {"gamma", r.gamma},
                           {"binomial_25", r.binomial[0]},
                           {"binomial_50", r.binomial[1]},
                           {"binomial_100", r.binomial[2]}});
        }
        nlohmann::json j{{"schema", "mitopt.table1/1"},
                         {"window", {presets::kLower, presets::kUpper}},
                         {"rows", arr}};
        emit(o, j.dump(2) + "\n");
        return 0;
    }
    const char* head = "beta1,beta2,beta3,gaussian,poisson,gamma,binomial_25,binomial_50,binomial_100";
    if (o.csv) {
        s << head << '\n';
        for (const auto& r : rows) {
            s << fmt_full(r.p.beta1) << ',' << fmt_full(r.p.beta2) << ',' << fmt_full(r.p.beta3)
              << ',' << fmt_full(r.gaussian) << ',' << fmt_full(r.poisson) << ','
              << fmt_full(r.gamma) << ',' << fmt_full(r.binomial[0]) << ','
              << fmt_full(r.binomial[1]) << ',' << fmt_full(r.binomial[2]) << '\n';
        }
        emit(o, s.str());
        return 0;
    }
    s << "interior stimulus x2 on [" << presets::kLower << ", " << presets::kUpper << "]\n";
    s << "beta1 beta2 beta3 | gaussian poisson gamma   bin N=25 bin N=50 bin N=100\n";
    for (const auto& r : rows) {
        s << fmt(r.p.beta1, 1) << "   " << fmt(r.p.beta2, 1) << "   " << fmt(r.p.beta3, 1)
          << "   |   " << fmt(r.gaussian, 2) << "    " << fmt(r.poisson, 2) << "   "
          << fmt(r.gamma, 2) << "      " << fmt(r.binomial[0], 2) << "     "
          << fmt(r.binomial[1], 2) << "     " << fmt(r.binomial[2], 2) << "\n";
    }
    emit(o, s.str());
    return 0;
}

int cmd_table2(const Options& o) {
    SolverOptions sopt;
    sopt.grid_step = o.grid_step;
    std::ostringstream s;
    nlohmann::json arr = nlohmann::json::array();
    std::ostringstream csv;
    csv << "beta1,beta2,beta3,x2,x3,det";
    for (const double d : presets::kDilutions) csv << ",eff_ratio_d" << d;
    csv << '\n';
    s << "inverse gaussian optimal designs on [" << presets::kLower << ", " << presets::kUpper
      << "], x1 = 0\n";
    s << "beta1 beta2 beta3 |   x2     x3     det    | eff% d=60 d=30 d=15\n";
    for (size_t r = 0; r < presets::kParamRows.size(); ++r) {
        const auto p = presets::row(static_cast<int>(r));
        const auto rep = solve(Family::inverse_gaussian(), p, presets::window(), sopt);
        std::array<double, 3> eff{};
        for (size_t t = 0; t < presets::kDilutions.size(); ++t) {
            const auto cand = dilution_design(presets::window(), presets::kDilutions[t]);
            eff[t] = efficiency(Family::inverse_gaussian(), p, cand, rep.design).ratio;
        }
        s << fmt(p.beta1, 1) << "   " << fmt(p.beta2, 1) << "   " << fmt(p.beta3, 1) << "   | "
          << fmt(rep.design.x[1], 2) << "  " << fmt(rep.design.x[2], 2) << "  "
          << fmt(rep.design.det, 4) << " |    " << fmt(100.0 * eff[0], 1) << " "
          << fmt(100.0 * eff[1], 1) << " " << fmt(100.0 * eff[2], 1) << "\n";
        csv << fmt_full(p.beta1) << ',' << fmt_full(p.beta2) << ',' << fmt_full(p.beta3) << ','
            << fmt_full(rep.design.x[1]) << ',' << fmt_full(rep.design.x[2]) << ','
            << fmt_full(rep.design.det);
        for (const double e : eff) csv << ',' << fmt_full(e);
        csv << '\n';
        arr.push_back({{"beta", {p.beta1, p.beta2, p.beta3}},
                       {"design", to_json(rep.design)},
                       {"efficiency_ratio",
                        {{"d60", eff[0]}, {"d30", eff[1]}, {"d15", eff[2]}}}});
    }
    if (o.json) {
        nlohmann::json j{{"schema", "mitopt.table2/1"},
                         {"window", {presets::kLower, presets::kUpper}},
                         {"rows", arr}};
        emit(o, j.dump(2) + "\n");
    } else if (o.csv) {
        emit(o, csv.str());
    } else {
        emit(o, s.str());
    }
    return 0;
}

int cmd_efficiency(const Options& o) {
    const auto p = params_of(o);
    const auto b = bounds_of(o);
    const auto f = Family::from_name(o.family, o.trials);
    SolverOptions sopt;
    sopt.grid_step = o.grid_step;
    const auto rep = solve(f, p, b, sopt);
    const auto cand = dilution_design(b, o.dilution);
    const auto e = efficiency(f, p, cand, rep.design);
    if (o.json) {
        nlohmann::json j{{"schema", "mitopt.efficiency/1"},
                         {"family", f.name()},
                         {"beta", {p.beta1, p.beta2, p.beta3}},
                         {"dilution", o.dilution},
                         {"optimal", to_json(rep.design)},
                         {"candidate", to_json(cand)},
                         {"ratio", e.ratio},
                         {"d_efficiency", e.d_efficiency}};
        emit(o, j.dump(2) + "\n");
        return 0;
    }
    std::ostringstream s;
    if (o.csv) {
        s << "family,dilution,ratio,d_efficiency\n"
          << f.name() << ',' << fmt_full(o.dilution) << ',' << fmt_full(e.ratio) << ','
          << fmt_full(e.d_efficiency) << '\n';
        emit(o, s.str());
        return 0;
    }
    s << "optimal design:  " << fmt(rep.design.x[0], 2) << "  " << fmt(rep.design.x[1], 2)
      << "  " << fmt(rep.design.x[2], 2) << "\n";
    s << "dilution " << o.dilution << " ladder: " << fmt(cand.x[0], 4) << "  "
      << fmt(cand.x[1], 4) << "  " << fmt(cand.x[2], 4) << "\n";
    s << "determinant ratio: " << fmt(100.0 * e.ratio, 1)
      << "%   per-parameter scale (cube root): " << fmt(100.0 * e.d_efficiency, 1) << "%\n";
    emit(o, s.str());
    return 0;
}

int cmd_simulate(const Options& o) {
    const auto p = params_of(o);
    const auto b = bounds_of(o);
    const auto f = Family::from_name(o.family, o.trials);
    SolverOptions sopt;
    sopt.grid_step = o.grid_step;
    const auto rep = solve(f, p, b, sopt);
    SimConfig cfg;
    cfg.seed = o.seed;
    cfg.replicates = o.replicates;
    cfg.n_per_point = o.n_per_point;
    cfg.sigma2 = o.sigma2;
    const auto r = covariance_check(f, p, rep.design, cfg);
    if (o.json) {
        emit(o, mc_report_json(r, f, p, rep.design, cfg).dump(2) + "\n");
        return 0;
    }
    std::ostringstream s;
    s << "design: " << fmt(rep.design.x[0], 2) << "  " << fmt(rep.design.x[1], 2) << "  "
      << fmt(rep.design.x[2], 2) << "\n";
    s << "replicates converged: " << r.converged << "/" << r.replicates << "\n";
    s << "max diagonal deviation (empirical vs expected covariance): "
      << fmt(100.0 * r.max_diag_rel_dev, 2) << "%\n";
    s << "generalized variance: empirical " << fmt_full(r.empirical_gen_var) << ", expected "
      << fmt_full(r.expected_gen_var) << "\n";
    emit(o, s.str());
    return 0;
}

int cmd_verify(const Options& o) {
    detail::corrupt_x2_sign = o.inject_x2_sign_error;
    int failures = 0;
    std::ostringstream s;
    const auto check = [&](const std::string& name, bool pass, const std::string& why = "") {
        s << (pass ? "[ok]   " : "[FAIL] ") << name;
        if (!pass && !why.empty()) s << "  (" << why << ")";
        s << "\n";
        if (!pass) ++failures;
    };
    const Bounds b = presets::window();

    // interior roots against exhaustive line searches, every preset row
    for (size_t r = 0; r < presets::kParamRows.size(); ++r) {
        const auto p = presets::row(static_cast<int>(r));
        for (const auto& f : {Family::gaussian(), Family::poisson(), Family::gamma()}) {
            const std::string name =
                "oracle agreement " + f.name() + " row " + std::to_string(r + 1);
            try {
                const auto rep = solve(f, p, b);
                FixedStimuli fixed;
                fixed.x1 = b.lower;
                fixed.x3 = b.upper;
                const auto crit = [&](double x1, double x2, double x3) {
                    return det_explicit(f, p, Design{{x1, x2, x3}, {1, 1, 1}, 0.0});
                };
                const auto line = brute_force_oracle(crit, b, 1e-3, fixed);
                check(name, std::abs(line.x[1] - rep.design.x[1]) <= 1e-3,
                      "solver and grid disagree");
            } catch (const Error& e) {
                check(name, false, e.what());
            }
        }
    }
    // analytic bracket for the log link
    try {
        const ModelParams p0{0.0, 1.0, 1.0};
        const auto rep = solve(Family::poisson(), p0, b);
        const auto br = poisson_x2_bounds(p0, b.upper);
        check("log link zero-intercept endpoint",
              std::abs(rep.design.x[1] - br.lo) < 1e-6);
    } catch (const Error& e) {
        check("log link zero-intercept endpoint", false, e.what());
    }
    // Monte Carlo covariance against the inverse information
    for (const auto& f : {Family::gaussian(), Family::poisson()}) {
        const std::string name = "covariance check " + f.name();
        try {
            const ModelParams p{0.5, 1.0, 1.0};
            const auto rep = solve(f, p, b);
            SimConfig cfg;
            cfg.seed = o.seed;
            cfg.replicates = o.replicates;
            cfg.n_per_point = o.n_per_point;
            cfg.sigma2 = o.sigma2;
            const auto r = covariance_check(f, p, rep.design, cfg);
            check(name, r.max_diag_rel_dev < 0.2,
                  "diagonal deviation " + fmt(100.0 * r.max_diag_rel_dev, 1) + "%");
        } catch (const Error& e) {
            check(name, false, e.what());
        }
    }
    detail::corrupt_x2_sign = false;
    s << (failures == 0 ? "verification passed\n"
                        : "verification failed: " + std::to_string(failures) + " invariant(s)\n");
    emit(o, s.str());
    return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"locally D-optimal three point designs for Mitscherlich regression"};
    app.require_subcommand(1);
    // shared options live on the main app; subcommands inherit fallthrough so
    // "mitopt design --family ..." parses, and a flat key=value config file
    // (processed at the top level) can set any of them
    app.fallthrough();
    app.set_config("--config", "", "flat key=value configuration file");

    Options o;
    app.add_option("--family", o.family,
                   "gaussian|poisson|negative-binomial|gamma|binomial|inverse-gaussian")
        ->capture_default_str();
    app.add_option("--trials", o.trials, "binomial trial count")->capture_default_str();
    app.add_option("--beta", o.beta, "b1 b2 b3")->expected(3);
    app.add_option("--bounds", o.bounds, "stimulus window L U")->expected(2);
    app.add_option("--grid-step", o.grid_step, "search resolution")->capture_default_str();
    app.add_flag("--json", o.json, "machine readable output");
    app.add_flag("--csv", o.csv, "comma separated output with a header row");
    app.add_option("--out", o.out, "write to a file instead of stdout");
    app.add_option("--seed", o.seed, "simulation seed")->capture_default_str();
    app.add_option("--replicates", o.replicates, "Monte Carlo replicates")
        ->capture_default_str();
    app.add_option("--n-per-point", o.n_per_point, "observations per design point")
        ->capture_default_str();
    app.add_option("--sigma2", o.sigma2, "variance scale for normal responses")
        ->capture_default_str();

    auto* design = app.add_subcommand("design", "solve one design problem");
    design->add_option("--power", o.power, "variance power p for a normal response");
    design->add_option("--transform", o.transform, "response transform: id|sqrt|exp")
        ->capture_default_str();

    auto* t1 = app.add_subcommand("table1", "interior stimulus for the six preset rows");
    auto* t2 = app.add_subcommand("table2", "inverse gaussian designs for the preset rows");

    auto* eff = app.add_subcommand("efficiency", "serial dilution ladder vs optimal design");
    eff->add_option("--dilution", o.dilution, "dilution factor d > 1")->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "Monte Carlo covariance at the optimal design");

    auto* ver = app.add_subcommand("verify", "run the self verification suite");
    ver->add_flag("--inject-x2-sign-error", o.inject_x2_sign_error,
                  "corrupt the interior equation (negative control)")
        ->group("");  // hidden

    // validate any config file before parsing so nothing runs on a bad one
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) config_path = argv[i + 1];
        else if (a.rfind("--config=", 0) == 0) config_path = a.substr(9);
    }
    if (!config_path.empty()) {
        std::vector<std::string> keys;
        for (const auto* opt : app.get_options()) {
            for (const auto& n : opt->get_lnames()) {
                if (n != "config" && n != "help") keys.push_back(n);
            }
        }
        if (validate_config(config_path, keys) != 0) return 1;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (design->parsed()) return cmd_design(o);
        if (t1->parsed()) return cmd_table1(o);
        if (t2->parsed()) return cmd_table2(o);
        if (eff->parsed()) return cmd_efficiency(o);
        if (sim->parsed()) return cmd_simulate(o);
        if (ver->parsed()) return cmd_verify(o);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
