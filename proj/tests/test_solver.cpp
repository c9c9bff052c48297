#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "mitopt/fisher.hpp"
#include "mitopt/presets.hpp"
#include "mitopt/solver.hpp"

using namespace mitopt;

namespace {

Criterion det_criterion(const Family& f, const ModelParams& p) {
    return [f, p](double x1, double x2, double x3) {
        try {
            return det_explicit(f, p, Design{{x1, x2, x3}, {1, 1, 1}, 0.0});
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
}

struct SignHookGuard {
    SignHookGuard() { detail::corrupt_x2_sign = true; }
    ~SignHookGuard() { detail::corrupt_x2_sign = false; }
};

}  // namespace

TEST_CASE("closed form interior stimulus, frozen values") {
    const Bounds b{0.0, 15.0};
    // identity link: x2 = U exp(-1/b3) for a window starting at zero
    CHECK(gaussian_x2_closed_form({0.5, 1.2, 0.9}, b) ==
          doctest::Approx(4.93789481711858).epsilon(1e-12));
    CHECK(gaussian_x2_closed_form({0.5, 1.0, 1.0}, b) ==
          doctest::Approx(5.51819161757163).epsilon(1e-12));
    CHECK(gaussian_x2_closed_form({0.5, 0.8, 1.1}, b) ==
          doctest::Approx(6.04335482293699).epsilon(1e-12));
    // the interior value does not depend on beta1 or beta2
    CHECK(gaussian_x2_closed_form({1.0, 0.3, 0.9}, b) ==
          gaussian_x2_closed_form({0.5, 1.2, 0.9}, b));

    auto rep = solve(Family::gaussian(), {0.5, 1.0, 1.0}, b);
    CHECK(rep.method == SolveMethod::ClosedForm);
    CHECK(rep.theorem_backed);
    CHECK(rep.design.x[0] == 0.0);
    CHECK(rep.design.x[2] == 15.0);
    CHECK(rep.design.x[1] == doctest::Approx(5.51819161757163).epsilon(1e-12));
}

TEST_CASE("closed form agrees with the transformed-stimulus formula") {
    // on [1, 15] the interior stimulus satisfies
    // log x2 = z2(b3_tilde = 1, z1 = 0, z3 = log 15)
    const double z2 = z2_optimal_exp_growth(1.0, 0.0, std::log(15.0));
    CHECK(z2 == doctest::Approx(1.90148235832380).epsilon(1e-12));
    const double x2 = gaussian_x2_closed_form({0.0, 1.0, 1.0}, Bounds{1.0, 15.0});
    CHECK(std::log(x2) == doctest::Approx(z2).epsilon(1e-12));
}

TEST_CASE("upper bound on the interior stimulus") {
    CHECK(x2_upper_bound({0.5, 1.2, 0.9}, 0.0, 15.0) ==
          doctest::Approx(4.93789481711858).epsilon(1e-12));
    // a positive lower stimulus pushes the bound up
    CHECK(x2_upper_bound({0.5, 1.0, 1.0}, 1.0, 15.0) > 15.0 * std::exp(-1.0));
    // the root always lands strictly inside (x1, bound]
    auto rep = solve(Family::poisson(), {0.5, 1.2, 0.9}, Bounds{0.0, 15.0});
    CHECK(rep.design.x[1] > 0.0);
    CHECK(rep.design.x[1] <= x2_upper_bound({0.5, 1.2, 0.9}, 0.0, 15.0));
}

TEST_CASE("log link interior stimuli match the reference grid of solutions") {
    const Bounds b{0.0, 15.0};
    struct Row {
        ModelParams p;
        double x2;
    };
    const Row rows[] = {
        {{0.5, 1.2, 0.9}, 2.2375}, {{0.5, 1.0, 1.0}, 2.6666}, {{0.5, 0.8, 1.1}, 3.0978},
        {{1.0, 1.2, 0.9}, 2.5789}, {{1.0, 1.0, 1.0}, 3.0229}, {{1.0, 0.8, 1.1}, 3.4677},
    };
    for (const auto& r : rows) {
        auto rep = solve(Family::poisson(), r.p, b);
        CHECK(rep.method == SolveMethod::RootFind);
        CHECK(rep.theorem_backed);
        CHECK(rep.design.x[0] == 0.0);
        CHECK(rep.design.x[2] == 15.0);
        CHECK(rep.design.x[1] == doctest::Approx(r.x2).epsilon(0.0045));
        // solved stimulus straddles the optimality equation's sign change
        CHECK(x2_equation(Family::poisson(), r.p, 0.0, 15.0, rep.design.x[1] - 1e-4) > 0.0);
        CHECK(x2_equation(Family::poisson(), r.p, 0.0, 15.0, rep.design.x[1] + 1e-4) < 0.0);
        // and lies inside the closed-form bracket for this link
        const auto br = poisson_x2_bounds(r.p, b.upper);
        CHECK(br.contains(rep.design.x[1]));
        CHECK(rep.x2_interval.contains(rep.design.x[1]));
    }
}

TEST_CASE("reciprocal link interior stimuli match the reference grid of solutions") {
    const Bounds b{0.0, 15.0};
    struct Row {
        ModelParams p;
        double x2;
    };
    const Row rows[] = {
        {{0.5, 1.2, 0.9}, 0.7049}, {{0.5, 1.0, 1.0}, 0.9043}, {{0.5, 0.8, 1.1}, 1.1352},
        {{1.0, 1.2, 0.9}, 1.1234}, {{1.0, 1.0, 1.0}, 1.3835}, {{1.0, 0.8, 1.1}, 1.6753},
    };
    for (const auto& r : rows) {
        auto rep = solve(Family::gamma(), r.p, b);
        CHECK(rep.method == SolveMethod::RootFind);
        CHECK(rep.design.x[0] == 0.0);
        CHECK(rep.design.x[2] == 15.0);
        CHECK(rep.design.x[1] == doctest::Approx(r.x2).epsilon(0.0045));
    }
}

TEST_CASE("zero intercept with a log link hits the lower root bound exactly") {
    auto rep = solve(Family::poisson(), {0.0, 1.0, 1.0}, Bounds{0.0, 15.0});
    CHECK(rep.method == SolveMethod::RootFind);
    CHECK(rep.design.x[1] == doctest::Approx(2.03002924854919).epsilon(1e-6));
    CHECK(rep.design.x[1] ==
          doctest::Approx(poisson_x2_bounds({0.0, 1.0, 1.0}, 15.0).lo).epsilon(1e-6));
    // the information weight diverges at the zero mean, so the criterion does
    CHECK(std::isinf(rep.design.det));
    CHECK(rep.design.det > 0.0);
}

TEST_CASE("negative binomial designs are identical to the log link designs") {
    for (size_t i = 0; i < presets::kParamRows.size(); ++i) {
        const auto p = presets::row(static_cast<int>(i));
        auto a = solve(Family::poisson(), p, presets::window());
        auto bn = solve(Family::negative_binomial(), p, presets::window());
        CHECK(a.design.x[1] == bn.design.x[1]);
        CHECK(a.design.det == bn.design.det);
        CHECK(a.iterations == bn.iterations);
    }
}

TEST_CASE("logit link falls back to the full search and matches the reference") {
    auto rep = solve(Family::binomial(25), {0.5, 1.2, 0.9}, Bounds{0.0, 15.0});
    CHECK(rep.method == SolveMethod::GridSearch3D);
    CHECK_FALSE(rep.theorem_backed);
    CHECK(rep.design.x[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(rep.design.x[2] == doctest::Approx(15.0).epsilon(1e-9));
    CHECK(rep.design.x[1] == doctest::Approx(2.6472).epsilon(0.0045));

    auto rep2 = solve(Family::binomial(100), {1.0, 0.8, 1.1}, Bounds{0.0, 15.0});
    CHECK(rep2.design.x[1] == doctest::Approx(3.5800).epsilon(0.0045));
}

TEST_CASE("trial ceiling below the window mean range is infeasible") {
    CHECK_THROWS_AS(solve(Family::binomial(10), {1.0, 1.0, 1.0}, Bounds{0.0, 15.0}),
                    InfeasibleError);
}

TEST_CASE("squared reciprocal link searches the plane and matches the reference") {
    struct Row {
        ModelParams p;
        double x2, x3, det;
    };
    const Row rows[] = {
        {{0.5, 1.2, 0.9}, 0.26, 5.21, 1.4551},
        {{1.0, 1.0, 1.0}, 0.72, 10.65, 0.0530},
    };
    for (const auto& r : rows) {
        auto rep = solve(Family::inverse_gaussian(), r.p, Bounds{0.0, 15.0});
        CHECK(rep.method == SolveMethod::GridSearch2D);
        CHECK(rep.theorem_backed);
        CHECK(rep.design.x[0] == 0.0);
        CHECK(rep.design.x[1] == doctest::Approx(r.x2).epsilon(0.05));
        CHECK(std::abs(rep.design.x[1] - r.x2) < 0.011);
        CHECK(std::abs(rep.design.x[2] - r.x3) < 0.011);
        CHECK(rep.design.det == doctest::Approx(r.det).epsilon(0.004));
        // interior stimulus stays below the mean cap mu(x2) < 2 beta1
        CHECK(mean(r.p, rep.design.x[1]) < 2.0 * r.p.beta1);
        // the dedicated entry point is the same code path
        auto direct = invgauss_solve(r.p, Bounds{0.0, 15.0}, 0.01);
        CHECK(direct.design.x[1] == rep.design.x[1]);
        CHECK(direct.design.x[2] == rep.design.x[2]);
    }
    CHECK_THROWS_AS(solve(Family::inverse_gaussian(), {0.0, 1.0, 1.0}, Bounds{0.0, 15.0}),
                    InfeasibleError);
    CHECK_THROWS_AS(invgauss_solve({0.0, 1.0, 1.0}, Bounds{0.0, 15.0}, 0.01), InfeasibleError);
}

TEST_CASE("zero intercept with reciprocal links is infeasible at a zero lower bound") {
    CHECK_THROWS_AS(solve(Family::gamma(), {0.0, 1.0, 1.0}, Bounds{0.0, 15.0}),
                    InfeasibleError);
    // a positive lower bound lifts the means off the boundary
    CHECK_NOTHROW(solve(Family::gamma(), {0.0, 1.0, 1.0}, Bounds{0.5, 15.0}));
}

TEST_CASE("degenerate window refuses to solve") {
    CHECK_THROWS_AS(solve(Family::poisson(), {0.5, 1.0, 1.0}, Bounds{0.0, 0.05}),
                    InfeasibleError);
}

TEST_CASE("interior root agrees with an exhaustive line search") {
    const ModelParams p{0.5, 1.2, 0.9};
    auto rep = solve(Family::poisson(), p, Bounds{0.0, 15.0});
    FixedStimuli fixed;
    fixed.x1 = 0.0;
    fixed.x3 = 15.0;
    auto line = brute_force_oracle(det_criterion(Family::poisson(), p), Bounds{0.0, 15.0},
                                   1e-3, fixed);
    CHECK(std::abs(line.x[1] - rep.design.x[1]) <= 1e-3);

    // unconstrained search lands on the same design up to its grid
    auto full = brute_force_oracle(det_criterion(Family::poisson(), p), Bounds{0.0, 15.0},
                                   0.05, {});
    CHECK(full.x[0] == 0.0);
    CHECK(full.x[2] == 15.0);
    CHECK(std::abs(full.x[1] - rep.design.x[1]) <= 0.05);
}

TEST_CASE("interior stimulus grows with the window top") {
    double prev = 0.0;
    for (double u : {10.0, 12.0, 15.0}) {
        auto rep = solve(Family::poisson(), {0.5, 1.0, 1.0}, Bounds{0.0, u});
        CHECK(rep.design.x[1] > prev);
        prev = rep.design.x[1];
    }
}

TEST_CASE("replicate counts scale the criterion but not the stimuli") {
    SolverOptions opt;
    auto one = solve(Family::poisson(), {0.5, 1.0, 1.0}, Bounds{0.0, 15.0}, opt);
    opt.replicates = {3, 1, 2};
    auto rep = solve(Family::poisson(), {0.5, 1.0, 1.0}, Bounds{0.0, 15.0}, opt);
    CHECK(rep.design.x[1] == one.design.x[1]);
    CHECK(rep.design.n == std::array<int, 3>{3, 1, 2});
    CHECK(rep.design.det == doctest::Approx(6.0 * one.design.det).epsilon(1e-13));
}

TEST_CASE("constant variance response uses the closed form") {
    auto spec = HeteroSpec::constant(2.5);
    auto rep = hetero_solve(spec, {0.5, 1.0, 1.0}, Bounds{0.0, 15.0});
    CHECK(rep.method == SolveMethod::ClosedForm);
    CHECK(rep.design.x[1] == doctest::Approx(5.51819161757163).epsilon(1e-12));

    // a vanishing variance power degenerates to the same design
    auto tiny = hetero_solve(HeteroSpec::power(1e-8, 2.5), {0.5, 1.0, 1.0}, Bounds{0.0, 15.0});
    CHECK(tiny.design.x[1] == doctest::Approx(rep.design.x[1]).epsilon(1e-6));
}

TEST_CASE("variance power at most two pins the upper stimulus") {
    auto rep = hetero_solve(HeteroSpec::power(1.0, 1.0), {0.5, 1.0, 1.0}, Bounds{0.0, 15.0});
    CHECK(rep.method == SolveMethod::RootFind);
    CHECK(rep.design.x[2] == 15.0);
    CHECK(rep.x2_interval.contains(rep.design.x[1]));
    // root agrees with an exhaustive line search on the weighted determinant
    const ModelParams p{0.5, 1.0, 1.0};
    const auto spec = HeteroSpec::power(1.0, 1.0);
    const auto crit = [&](double x1, double x2, double x3) {
        try {
            return hetero_info_matrix(spec, p, Design{{x1, x2, x3}, {1, 1, 1}, 0.0}).det();
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    FixedStimuli fixed;
    fixed.x1 = 0.0;
    fixed.x3 = 15.0;
    auto line = brute_force_oracle(crit, Bounds{0.0, 15.0}, 1e-3, fixed);
    CHECK(std::abs(line.x[1] - rep.design.x[1]) <= 1e-3);

    // the boundary power two still pins the top
    auto p2 = hetero_solve(HeteroSpec::power(2.0, 1.0), {0.5, 1.0, 1.0}, Bounds{0.0, 15.0});
    CHECK(p2.method == SolveMethod::RootFind);
    CHECK(p2.design.x[2] == 15.0);
}

TEST_CASE("variance power above two frees the upper stimulus") {
    const ModelParams p{1.0, 1.0, 1.0};
    struct Row {
        double sigma2, x2, x3;
    };
    // shrinking the variance floor pulls the top stimulus into the interior
    const Row rows[] = {{1.0, 1.30, 15.0}, {1e-4, 0.72, 10.75}};
    for (const auto& r : rows) {
        auto rep = hetero_solve(HeteroSpec::power(3.0, r.sigma2), p, Bounds{0.0, 15.0});
        CHECK(rep.method == SolveMethod::GridSearch2D);
        CHECK(rep.design.x[0] == 0.0);
        CHECK(std::abs(rep.design.x[1] - r.x2) < 0.011);
        CHECK(std::abs(rep.design.x[2] - r.x3) < 0.011);
    }
}

TEST_CASE("identity transform reproduces the plain solver exactly") {
    const ModelParams p{0.5, 1.2, 0.9};
    auto plain = solve(Family::poisson(), p, Bounds{0.0, 15.0});
    auto wrapped = transformed_solve(Family::poisson(), TransformSpec::identity(), p,
                                     Bounds{0.0, 15.0});
    CHECK(wrapped.design.x == plain.design.x);
    CHECK(wrapped.design.det == plain.design.det);
    CHECK(wrapped.method == plain.method);
}

TEST_CASE("square root transform keeps the endpoint placement") {
    // composite weight for the log link is proportional to mu^(-3/2), which
    // satisfies all three placement conditions
    const ModelParams p{0.5, 1.0, 1.0};
    auto rep = transformed_solve(Family::poisson(), TransformSpec::sqrt(), p, Bounds{0.0, 15.0});
    CHECK(rep.method == SolveMethod::RootFind);
    CHECK(rep.theorem_backed);
    CHECK(rep.design.x[0] == 0.0);
    CHECK(rep.design.x[2] == 15.0);

    // test-side composite determinant as an independent check
    const auto w = [](double mu) { return 0.25 * std::pow(mu, -1.5); };
    const auto crit = [&](double x1, double x2, double x3) {
        const double z1 = x1 == 0.0 ? 0.0 : std::pow(x1, p.beta3);
        const double z2 = std::pow(x2, p.beta3), z3 = std::pow(x3, p.beta3);
        double B = z2 * z3 * std::log(x3 / x2);
        if (x1 > 0.0) B += z1 * z2 * std::log(x2 / x1) - z1 * z3 * std::log(x3 / x1);
        return p.beta2 * p.beta2 * B * B * w(mean(p, x1)) * w(mean(p, x2)) * w(mean(p, x3));
    };
    FixedStimuli fixed;
    fixed.x1 = 0.0;
    fixed.x3 = 15.0;
    auto line = brute_force_oracle(crit, Bounds{0.0, 15.0}, 1e-3, fixed);
    CHECK(std::abs(line.x[1] - rep.design.x[1]) <= 1e-3);
}

TEST_CASE("exponential transform loses concavity and falls back to the full search") {
    const ModelParams p{0.5, 1.0, 1.0};
    auto rep = transformed_solve(Family::poisson(), TransformSpec::exp(), p, Bounds{0.0, 5.0});
    CHECK(rep.method == SolveMethod::GridSearch3D);
    CHECK_FALSE(rep.theorem_backed);

    SolverOptions opt;
    opt.allow_grid_fallback = false;
    CHECK_THROWS_AS(
        transformed_solve(Family::poisson(), TransformSpec::exp(), p, Bounds{0.0, 5.0}, opt),
        UnsupportedError);
}

TEST_CASE("a corrupted optimality equation is detected, not silently solved") {
    SignHookGuard guard;
    CHECK_THROWS_AS(solve(Family::poisson(), {0.5, 1.2, 0.9}, Bounds{0.0, 15.0}),
                    ConvergenceError);
}

TEST_CASE("exhaustive search budget and tie resolution") {
    const auto flat = [](double, double, double) { return 1.0; };
    CHECK_THROWS_AS(brute_force_oracle(flat, Bounds{0.0, 15.0}, 1e-4, {}), BudgetError);
    auto d = brute_force_oracle(flat, Bounds{0.0, 1.0}, 0.5, {});
    CHECK(d.x == std::array<double, 3>{0.0, 0.5, 1.0});
}

TEST_CASE("serial dilution designs and their efficiency") {
    const Bounds b{0.0, 15.0};
    auto d = dilution_design(b, 3.0);
    CHECK(d.x[0] == doctest::Approx(15.0 / 9.0));
    CHECK(d.x[1] == doctest::Approx(5.0));
    CHECK(d.x[2] == 15.0);
    CHECK_THROWS_AS(dilution_design(b, 1.0), RangeError);

    const ModelParams p{0.5, 1.0, 1.0};
    auto opt = solve(Family::poisson(), p, b);
    auto self = efficiency(Family::poisson(), p, opt.design, opt.design);
    CHECK(self.ratio == doctest::Approx(1.0).epsilon(1e-14));
    auto e = efficiency(Family::poisson(), p, d, opt.design);
    CHECK(e.ratio > 0.0);
    CHECK(e.ratio < 1.0);
    CHECK(e.d_efficiency == doctest::Approx(std::cbrt(e.ratio)).epsilon(1e-14));
}
