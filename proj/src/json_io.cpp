#include "mitopt/json_io.hpp"

#include <cmath>

namespace mitopt {

namespace {

// +inf is not representable in JSON; emit it as a string marker
nlohmann::json num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

nlohmann::json mat(const Mat3& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < 3; ++r) {
        rows.push_back({num(m(r, 0)), num(m(r, 1)), num(m(r, 2))});
    }
    return rows;
}

}  // namespace

nlohmann::json to_json(const Design& d) {
    return {
        {"x", {d.x[0], d.x[1], d.x[2]}},
        {"n", {d.n[0], d.n[1], d.n[2]}},
        {"det", num(d.det)},
    };
}

nlohmann::json to_json(const ConditionReport& c) {
    return {
        {"mu", c.mu},
        {"weight_nonnegative", c.c1},
        {"weight_concave", c.c2},
        {"upper_pinning", c.c3},
    };
}

nlohmann::json design_report_json(const SolveReport& r, const Family& f, const ModelParams& p,
                                  const Bounds& b) {
    return {
        {"schema", "mitopt.design/1"},
        {"family", f.name()},
        {"trials", f.trials()},
        {"beta", {p.beta1, p.beta2, p.beta3}},
        {"bounds", {b.lower, b.upper}},
        {"design", to_json(r.design)},
        {"method", to_string(r.method)},
        {"theorem_backed", r.theorem_backed},
        {"conditions_lower", to_json(r.cond_lower)},
        {"conditions_upper", to_json(r.cond_upper)},
        {"x2_interval", {r.x2_interval.lo, r.x2_interval.hi}},
        {"iterations", r.iterations},
        {"grid_step", r.grid_step},
    };
}

nlohmann::json mc_report_json(const CovarianceReport& r, const Family& f, const ModelParams& p,
                              const Design& d, const SimConfig& cfg) {
    return {
        {"schema", "mitopt.mc/1"},
        {"family", f.name()},
        {"trials", f.trials()},
        {"beta", {p.beta1, p.beta2, p.beta3}},
        {"design", to_json(d)},
        {"seed", cfg.seed},
        {"replicates", cfg.replicates},
        {"n_per_point", cfg.n_per_point},
        {"converged", r.converged},
        {"empirical_covariance", mat(r.empirical)},
        {"expected_covariance", mat(r.expected)},
        {"max_diag_rel_dev", num(r.max_diag_rel_dev)},
        {"empirical_gen_var", num(r.empirical_gen_var)},
        {"expected_gen_var", num(r.expected_gen_var)},
    };
}

}  // namespace mitopt
