#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "mitopt/family.hpp"
#include "mitopt/fisher.hpp"
#include "mitopt/model.hpp"

namespace mitopt {

// How the returned design was obtained.
enum class SolveMethod {
    ClosedForm,    // identity link, interior stimulus in closed form
    RootFind,      // interior stimulus from the optimality equation
    GridSearch1D,  // interior stimulus from a line search, endpoints pinned
    GridSearch2D,  // x1 pinned, (x2, x3) from a plane search
    GridSearch3D,  // no placement guarantees, full search
};

std::string to_string(SolveMethod m);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v, double slack = 0.0) const {
        return v >= lo - slack && v <= hi + slack;
    }
};

struct SolveReport {
    Design design;
    SolveMethod method = SolveMethod::RootFind;
    // placement conditions at the means of the window endpoints
    ConditionReport cond_lower;
    ConditionReport cond_upper;
    // interval the interior stimulus is proven to lie in
    Interval x2_interval;
    int iterations = 0;
    double grid_step = 0.0;
    // false when the solver fell back to a search without placement
    // guarantees; the design is then optimal only up to the grid
    bool theorem_backed = true;
};

struct SolverOptions {
    double grid_step = 0.01;
    // one refinement pass at grid_step/100 around the coarse maximum
    bool refine = true;
    std::uint64_t cell_cap = 400'000'000;
    bool allow_grid_fallback = true;
    std::array<int, 3> replicates{1, 1, 1};
    // points in the mean-domain scan that selects the solution path
    int condition_grid = 101;
    bool parallel = true;
};

// Locally optimal three point design maximising the information
// determinant over bounds. Path selection:
//   * c1 and c2 hold across the mean range  -> x1 = lower bound
//   * c3 holds as well                      -> x3 = upper bound, x2 from
//     the interior-stimulus equation (closed form for the identity link)
//   * c3 fails somewhere                    -> plane search over (x2, x3)
//   * c2 fails somewhere                    -> full search, flagged
// Throws InfeasibleError for degenerate windows (width < 10 grid steps),
// mean-domain violations on the window, and intercept requirements
// (Gamma or InverseGaussian with lower bound 0 need beta1 > 0).
SolveReport solve(const Family& f, const ModelParams& p, const Bounds& b,
                  const SolverOptions& opt = {});

// Left side of the interior-stimulus optimality equation at x2, with the
// outer stimuli fixed:
//
//   b2 b3 g''(mu2) [ (x1 x2)^b3 log(x2/x1) - (x1 x3)^b3 log(x3/x1)
//                    + (x2 x3)^b3 log(x3/x2) ]
//   + 2 g'(mu2) [ b3 x1^b3 log(x2/x1) + b3 x3^b3 log(x3/x2) + x1^b3 - x3^b3 ] = 0
//
// For x1 = 0 the common factor x3^b3 is divided out, leaving
//
//   b2 b3 g''(mu2) x2^b3 log(x3/x2) + 2 g'(mu2) [ b3 log(x3/x2) - 1 ] = 0.
double x2_equation(const Family& f, const ModelParams& p, double x1, double x3, double x2);

// Upper bound on the interior stimulus implied by the optimality system:
// b3 log x2 <= [z3 log z3 - z1 log z1 - (z3 - z1)] / (z3 - z1), z_i = x_i^b3.
// With x1 = 0 this is x3 * exp(-1/b3).
double x2_upper_bound(const ModelParams& p, double x1, double x3);

// Identity link admits the closed form
//   x2 = exp{ [U^b3 log U - L^b3 log L] / [U^b3 - L^b3] - 1/b3 },
// which collapses to U * exp(-1/b3) when L = 0 (computed exactly so).
double gaussian_x2_closed_form(const ModelParams& p, const Bounds& b);

// For the log link with L = 0 the interior stimulus lies in
//   [U exp(-2/b3), U exp(-1/b3)],
// hitting the lower endpoint exactly when beta1 = 0.
Interval poisson_x2_bounds(const ModelParams& p, double upper);

// Inverse Gaussian with L = 0: plane search over (x2, x3) on the closed
// determinant, restricted to x2 < (2 beta1/beta2)^(1/b3); the grid maximum
// is refined by one bisection pass on the interior equation at fixed x3.
// Throws InfeasibleError when beta1 = 0.
SolveReport invgauss_solve(const ModelParams& p, const Bounds& b, double grid_step,
                           const SolverOptions& opt = {});

// Heteroscedastic normal with variance sigma2 * phi(mu). The placement
// logic runs on the weight h(mu) in place of g'(mu). For phi(mu) = mu^p,
//   mu h'(mu) + 2 h(mu) = (2 - p) / (sigma2 mu^p),
// so the upper stimulus is pinned at U exactly when p <= 2; for p > 2 the
// solver searches the (x2, x3) plane.
SolveReport hetero_solve(const HeteroSpec& spec, const ModelParams& p, const Bounds& b,
                         const SolverOptions& opt = {});

// Response transformation psi applied before the family link; the
// composite link derivatives are
//   gt'(mu)  = g'(psi(mu)) psi'(mu)^2
//   gt''(mu) = g''(psi(mu)) psi'(mu)^3 + 2 g'(psi(mu)) psi''(mu) psi'(mu).
struct TransformSpec {
    std::string name = "identity";
    std::function<double(double)> psi, dpsi, d2psi;

    static TransformSpec identity();
    static TransformSpec sqrt();
    static TransformSpec exp();
    static TransformSpec from_name(const std::string& name);
};

// Composite information weight gt'(mu) and its derivative at one mean.
// DomainError when psi(mu) leaves the family domain.
struct TransformedWeight {
    double w = 0.0;
    double dw = 0.0;
};
TransformedWeight transformed_weight(const Family& f, const TransformSpec& t, double mu);

// Solve under the composite link. psi = identity reproduces solve()
// exactly. Combinations whose composite weight fails the concavity
// condition fall back to the full search when allowed, otherwise throw
// UnsupportedError.
SolveReport transformed_solve(const Family& f, const TransformSpec& t, const ModelParams& p,
                              const Bounds& b, const SolverOptions& opt = {});

// Exhaustive reference search over the stimulus window: any subset of the
// stimuli may be fixed, the remaining ones run over a uniform grid. Ties
// resolve toward the lexicographically smallest stimulus triple. Throws
// BudgetError when the grid exceeds cell_cap.
struct FixedStimuli {
    std::optional<double> x1;
    std::optional<double> x3;
};

using Criterion = std::function<double(double, double, double)>;

Design brute_force_oracle(const Criterion& criterion, const Bounds& b, double grid_step,
                          const FixedStimuli& fixed = {},
                          std::uint64_t cell_cap = 400'000'000, bool parallel = true);

// Determinant ratio |I(candidate)| / |I(optimal)| and its cube root (the
// per-parameter scale). The plain ratio is what the built-in
// serial-dilution efficiency columns report.
struct Efficiency {
    double ratio = 0.0;
    double d_efficiency = 0.0;
};

Efficiency efficiency(const Family& f, const ModelParams& p, const Design& candidate,
                      const Design& optimal);

// Serial dilution design {U/d^2, U/d, U} for a dilution factor d > 1.
Design dilution_design(const Bounds& b, double dilution);

namespace detail {
// Test hook: flips the sign of the constant term in the second bracket of
// the interior-stimulus equation. Exists so the verification suite can
// prove it would catch a wrong equation; never set in production code.
extern bool corrupt_x2_sign;
}  // namespace detail

}  // namespace mitopt
