#include "mitopt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mitopt/grid.hpp"

namespace mitopt {

namespace detail {
bool corrupt_x2_sign = false;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// weight closures: w replaces g', dw replaces g''. The placement theory and
// the interior-stimulus equation only see the pair, so the family, the
// heteroscedastic and the transformed solvers all share one core.
struct WeightView {
    std::function<double(double)> w;
    std::function<double(double)> dw;
    std::function<bool(double)> admissible;
    bool closed_form = false;   // dw vanishes identically
    bool boundary_ok = false;   // mu = 0 at the lower stimulus is a removable
                                // boundary case (weight diverges, det = +inf)
};

ConditionReport weight_conditions(double mu, double w, double dw) {
    ConditionReport r;
    r.mu = mu;
    r.c1 = w >= 0.0;
    r.c2 = dw <= 0.0;
    const double scale = std::abs(mu * dw) + std::abs(2.0 * w);
    r.c3 = mu * dw + 2.0 * w >= -1e-12 * scale;
    return r;
}

struct ScanResult {
    bool c1 = true, c2 = true, c3 = true;
    ConditionReport lower, upper;
};

// Evaluate the placement conditions at the means of a uniform stimulus scan.
// A boundary mean at the very first point is nudged half a cell inward when
// the view allows it; any other domain violation is a hard failure.
ScanResult scan_conditions(const WeightView& v, const ModelParams& p, const Bounds& b, int m) {
    ScanResult s;
    for (int i = 0; i < m; ++i) {
        double x = b.lower + b.width() * i / (m - 1);
        double mu = mean(p, x);
        if (!v.admissible(mu)) {
            if (i == 0 && v.boundary_ok) {
                x = b.lower + 0.5 * b.width() / (m - 1);
                mu = mean(p, x);
            }
            if (!v.admissible(mu)) {
                throw InfeasibleError(
                    "stimulus window drives the mean outside the admissible domain");
            }
        }
        const auto r = weight_conditions(mu, v.w(mu), v.dw(mu));
        s.c1 = s.c1 && r.c1;
        s.c2 = s.c2 && r.c2;
        s.c3 = s.c3 && r.c3;
        if (i == 0) s.lower = r;
        if (i == m - 1) s.upper = r;
    }
    return s;
}

// z = x^b3 and z log z with the limits 0^b3 = 0 and 0 log 0 = 0.
double zpow(double x, double b3) { return x == 0.0 ? 0.0 : std::pow(x, b3); }

// Closed determinant with a caller supplied weight, mirroring the explicit
// information determinant: beta2^2 B^2 prod_i n_i w(mu_i).
double weighted_closed_det(const WeightView& v, const ModelParams& p, const Design& d) {
    const double z1 = zpow(d.x[0], p.beta3);
    const double z2 = zpow(d.x[1], p.beta3);
    const double z3 = zpow(d.x[2], p.beta3);
    double B = z2 * z3 * std::log(d.x[2] / d.x[1]);
    if (d.x[0] > 0.0) {
        B += z1 * z2 * std::log(d.x[1] / d.x[0]) - z1 * z3 * std::log(d.x[2] / d.x[0]);
    }
    double out = p.beta2 * p.beta2 * B * B;
    for (int i = 0; i < 3; ++i) {
        out *= d.n[i] * v.w(mean(p, d.x[i]));
    }
    return out;
}

// Interior-stimulus equation on shared weight closures; see x2_equation for
// the displayed form. The corrupt_x2_sign hook flips the constant term of
// the second bracket so the verification suite can prove a wrong equation
// gets caught (no root in the proven bracket -> ConvergenceError).
double x2_equation_core(const WeightView& v, const ModelParams& p, double x1, double x3,
                        double x2) {
    const double mu2 = mean(p, x2);
    const double b2 = p.beta2, b3 = p.beta3;
    if (x1 == 0.0) {
        const double L = std::log(x3 / x2);
        double c = b3 * L - 1.0;
        if (detail::corrupt_x2_sign) c = b3 * L + 1.0;
        return b2 * b3 * v.dw(mu2) * std::pow(x2, b3) * L + 2.0 * v.w(mu2) * c;
    }
    const double z1 = std::pow(x1, b3), z2 = std::pow(x2, b3), z3 = std::pow(x3, b3);
    const double B = z1 * z2 * std::log(x2 / x1) - z1 * z3 * std::log(x3 / x1) +
                     z2 * z3 * std::log(x3 / x2);
    double c = z1 - z3;
    if (detail::corrupt_x2_sign) c = z3 - z1;
    const double C = b3 * z1 * std::log(x2 / x1) + b3 * z3 * std::log(x3 / x2) + c;
    return b2 * b3 * v.dw(mu2) * B + 2.0 * v.w(mu2) * C;
}

struct RootResult {
    double x2 = 0.0;
    Interval bracket;
    int iterations = 0;
};

// Bisection on the interior equation over the proven bracket
// (x1, upper bound]: positive just inside the left end, nonpositive at the
// bound. Any other sign pattern means the equation is wrong for this model.
RootResult root_find(const WeightView& v, const ModelParams& p, double x1, double x3) {
    const double ub = x2_upper_bound(p, x1, x3);
    double lo = x1 + 1e-6 * (x3 - x1);
    bool ok = false;
    for (int t = 0; t < 8; ++t) {
        if (x2_equation_core(v, p, x1, x3, lo) > 0.0) {
            ok = true;
            break;
        }
        lo = x1 + (lo - x1) / 10.0;
    }
    double hi = ub;
    const double fhi = x2_equation_core(v, p, x1, x3, hi);
    if (!ok || fhi > 0.0) {
        throw ConvergenceError("interior-stimulus equation has no sign change on its bracket");
    }
    RootResult r;
    while (hi - lo > 1e-15 * std::max(1.0, hi) && r.iterations < 200) {
        const double mid = 0.5 * (lo + hi);
        if (x2_equation_core(v, p, x1, x3, mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++r.iterations;
    }
    r.x2 = 0.5 * (lo + hi);
    r.bracket = {lo, hi};
    return r;
}

std::vector<double> uniform_axis(double lo, double hi, double step) {
    std::vector<double> a;
    const auto n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
    a.reserve(static_cast<size_t>(n) + 1);
    for (int i = 0; i < n; ++i) a.push_back(lo + i * step);
    if (a.back() > hi) {
        a.back() = hi;
    } else if (hi - a.back() > 1e-6 * step) {
        a.push_back(hi);
    }
    return a;
}

std::vector<double> window_axis(double centre, double half, double step, const Bounds& b) {
    return uniform_axis(std::max(b.lower, centre - half), std::min(b.upper, centre + half),
                        step);
}

// Per-axis precomputation so grid cells cost a handful of multiplies instead
// of pow/log/link evaluations: z = x^b3, lx = log x (zero at x = 0, where the
// z factor kills every term involving it), g = weight at the mean.
struct AxisPre {
    std::vector<double> x, z, lx, g;
    std::vector<char> ok;
};

AxisPre precompute(const WeightView& v, const ModelParams& p, const std::vector<double>& xs) {
    AxisPre a;
    a.x = xs;
    const auto n = xs.size();
    a.z.resize(n);
    a.lx.resize(n);
    a.g.resize(n);
    a.ok.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const double x = xs[i];
        a.z[i] = zpow(x, p.beta3);
        a.lx[i] = x > 0.0 ? std::log(x) : 0.0;
        const double mu = mean(p, x);
        a.ok[i] = v.admissible(mu) ? 1 : 0;
        a.g[i] = a.ok[i] ? v.w(mu) : 0.0;
    }
    return a;
}

double pre_det(double b2sq, const AxisPre& a1, int i, const AxisPre& a2, int j,
               const AxisPre& a3, int k) {
    if (!(a1.ok[static_cast<size_t>(i)] && a2.ok[static_cast<size_t>(j)] &&
          a3.ok[static_cast<size_t>(k)])) {
        return -kInf;
    }
    const double z1 = a1.z[static_cast<size_t>(i)], w1 = a1.lx[static_cast<size_t>(i)];
    const double z2 = a2.z[static_cast<size_t>(j)], w2 = a2.lx[static_cast<size_t>(j)];
    const double z3 = a3.z[static_cast<size_t>(k)], w3 = a3.lx[static_cast<size_t>(k)];
    const double B = z1 * z2 * (w2 - w1) - z1 * z3 * (w3 - w1) + z2 * z3 * (w3 - w2);
    return b2sq * B * B * a1.g[static_cast<size_t>(i)] * a2.g[static_cast<size_t>(j)] *
           a3.g[static_cast<size_t>(k)];
}

// Plane search over (x2, x3) with the lower stimulus pinned. One coarse pass
// over the full window, then one windowed pass at step/100 around the coarse
// maximum when refinement is on.
SolveReport plane_search(const WeightView& v, const ModelParams& p, const Bounds& b,
                         const SolverOptions& opt) {
    const double x1 = b.lower;
    const double b2sq = p.beta2 * p.beta2;
    const auto axis = uniform_axis(b.lower, b.upper, opt.grid_step);
    const int n = static_cast<int>(axis.size());
    if (grid::cells2(n) > opt.cell_cap) {
        throw BudgetError("plane search exceeds the cell budget");
    }
    const auto base = precompute(v, p, {x1});
    if (!base.ok[0]) {
        throw InfeasibleError("no admissible design in the stimulus window");
    }
    const auto pre = precompute(v, p, axis);
    const grid::Eval2 coarse = [&](int j, int k) {
        if (axis[static_cast<size_t>(j)] <= x1) return -kInf;
        return pre_det(b2sq, base, 0, pre, j, pre, k);
    };
    const auto best =
        opt.parallel ? grid::argmax2(n, coarse) : grid::argmax2_serial(n, coarse);
    if (best.value == -kInf) {
        throw InfeasibleError("no admissible design in the stimulus window");
    }
    double x2 = axis[static_cast<size_t>(best.j)], x3 = axis[static_cast<size_t>(best.k)];
    double val = best.value;
    double step = opt.grid_step;
    if (opt.refine) {
        const double fine = opt.grid_step / 100.0;
        const auto w2 = window_axis(x2, opt.grid_step, fine, b);
        const auto w3 = window_axis(x3, opt.grid_step, fine, b);
        const auto m2 = static_cast<int>(w2.size()), m3 = static_cast<int>(w3.size());
        if (static_cast<std::uint64_t>(m2) * static_cast<std::uint64_t>(m3) > opt.cell_cap) {
            throw BudgetError("plane refinement exceeds the cell budget");
        }
        const auto p2 = precompute(v, p, w2), p3 = precompute(v, p, w3);
        const grid::Eval1 flat = [&](int q) {
            const int j = q / m3, k = q % m3;
            if (!(x1 < w2[static_cast<size_t>(j)] &&
                  w2[static_cast<size_t>(j)] < w3[static_cast<size_t>(k)])) {
                return -kInf;
            }
            return pre_det(b2sq, base, 0, p2, j, p3, k);
        };
        const auto fb = opt.parallel ? grid::argmax1(m2 * m3, flat)
                                     : grid::argmax1_serial(m2 * m3, flat);
        if (fb.value > val) {
            x2 = w2[static_cast<size_t>(fb.i / m3)];
            x3 = w3[static_cast<size_t>(fb.i % m3)];
            val = fb.value;
        }
        step = fine;
    }
    SolveReport rep;
    rep.design = Design{{x1, x2, x3}, opt.replicates, 0.0};
    rep.design.det = weighted_closed_det(v, p, rep.design);
    rep.method = SolveMethod::GridSearch2D;
    rep.grid_step = step;
    rep.x2_interval = {x2 - step, x2 + step};
    return rep;
}

// Full search without placement guarantees: coarse pass over the whole
// window, then windowed passes at grid_step and grid_step/100. A windowed
// maximum sitting on a window edge away from the stimulus bounds re-centres
// the window (up to three times per pass).
SolveReport volume_search(const WeightView& v, const ModelParams& p, const Bounds& b,
                          const SolverOptions& opt) {
    const double b2sq = p.beta2 * p.beta2;
    const double step0 = b.width() / 150.0;
    const auto axis = uniform_axis(b.lower, b.upper, step0);
    const int n = static_cast<int>(axis.size());
    if (grid::cells3(n) > opt.cell_cap) {
        throw BudgetError("full search exceeds the cell budget");
    }
    const auto pre = precompute(v, p, axis);
    const grid::Eval3 coarse = [&](int i, int j, int k) {
        return pre_det(b2sq, pre, i, pre, j, pre, k);
    };
    auto best = opt.parallel ? grid::argmax3(n, coarse) : grid::argmax3_serial(n, coarse);
    if (best.value == -kInf) {
        throw InfeasibleError("no admissible design in the stimulus window");
    }
    std::array<double, 3> c{axis[static_cast<size_t>(best.i)], axis[static_cast<size_t>(best.j)],
                            axis[static_cast<size_t>(best.k)]};
    double val = best.value;

    const auto windowed_pass = [&](double half, double step) {
        for (int attempt = 0; attempt < 4; ++attempt) {
            const auto w1 = window_axis(c[0], half, step, b);
            const auto w2 = window_axis(c[1], half, step, b);
            const auto w3 = window_axis(c[2], half, step, b);
            const auto m1 = static_cast<std::uint64_t>(w1.size());
            const auto m2 = static_cast<std::uint64_t>(w2.size());
            const auto m3 = static_cast<std::uint64_t>(w3.size());
            if (m1 * m2 * m3 > opt.cell_cap) {
                throw BudgetError("windowed search exceeds the cell budget");
            }
            const auto p1 = precompute(v, p, w1);
            const auto p2 = precompute(v, p, w2);
            const auto p3 = precompute(v, p, w3);
            const auto im2 = static_cast<int>(m2), im3 = static_cast<int>(m3);
            const grid::Eval1 flat = [&](int q) {
                const int i = q / (im2 * im3);
                const int j = (q / im3) % im2;
                const int k = q % im3;
                if (!(w1[static_cast<size_t>(i)] < w2[static_cast<size_t>(j)] &&
                      w2[static_cast<size_t>(j)] < w3[static_cast<size_t>(k)])) {
                    return -kInf;
                }
                return pre_det(b2sq, p1, i, p2, j, p3, k);
            };
            const int total = static_cast<int>(m1 * m2 * m3);
            const auto fb =
                opt.parallel ? grid::argmax1(total, flat) : grid::argmax1_serial(total, flat);
            if (fb.value > val) {
                val = fb.value;
                c = {w1[static_cast<size_t>(fb.i / (im2 * im3))],
                     w2[static_cast<size_t>((fb.i / im3) % im2)],
                     w3[static_cast<size_t>(fb.i % im3)]};
            }
            // re-centre only when the maximum sits on a window edge that is
            // not a stimulus bound
            bool edge = false;
            for (const auto& [wa, ci] : {std::pair(w1, c[0]), std::pair(w2, c[1]),
                                         std::pair(w3, c[2])}) {
                if ((ci == wa.front() && wa.front() > b.lower + 1e-12) ||
                    (ci == wa.back() && wa.back() < b.upper - 1e-12)) {
                    edge = true;
                }
            }
            if (!edge) break;
        }
    };
    windowed_pass(step0, opt.grid_step);
    double final_step = opt.grid_step;
    if (opt.refine) {
        final_step = opt.grid_step / 100.0;
        windowed_pass(opt.grid_step, final_step);
    }
    SolveReport rep;
    rep.design = Design{{c[0], c[1], c[2]}, opt.replicates, 0.0};
    rep.design.det = weighted_closed_det(v, p, rep.design);
    rep.method = SolveMethod::GridSearch3D;
    rep.grid_step = final_step;
    rep.x2_interval = {c[1] - final_step, c[1] + final_step};
    rep.theorem_backed = false;
    return rep;
}

SolveReport solve_core(const WeightView& v, const ModelParams& p, const Bounds& b,
                       const SolverOptions& opt) {
    p.validate();
    b.validate();
    if (b.width() < 10.0 * opt.grid_step) {
        throw InfeasibleError("stimulus window narrower than ten grid steps");
    }
    const auto scan = scan_conditions(v, p, b, std::max(opt.condition_grid, 3));
    if (scan.c1 && scan.c2 && scan.c3) {
        SolveReport rep;
        rep.cond_lower = scan.lower;
        rep.cond_upper = scan.upper;
        const double x1 = b.lower, x3 = b.upper;
        double x2 = 0.0;
        if (v.closed_form) {
            x2 = gaussian_x2_closed_form(p, b);
            rep.method = SolveMethod::ClosedForm;
            rep.x2_interval = {x2, x2};
        } else {
            const auto r = root_find(v, p, x1, x3);
            x2 = r.x2;
            rep.method = SolveMethod::RootFind;
            rep.x2_interval = r.bracket;
            rep.iterations = r.iterations;
        }
        rep.design = Design{{x1, x2, x3}, opt.replicates, 0.0};
        const bool boundary = v.boundary_ok && !v.admissible(mean(p, x1));
        rep.design.det = boundary ? kInf : weighted_closed_det(v, p, rep.design);
        return rep;
    }
    SolveReport rep;
    if (scan.c1 && scan.c2) {
        rep = plane_search(v, p, b, opt);
    } else {
        if (!opt.allow_grid_fallback) {
            throw UnsupportedError(
                "placement conditions fail on the window and the grid fallback is disabled");
        }
        rep = volume_search(v, p, b, opt);
    }
    rep.cond_lower = scan.lower;
    rep.cond_upper = scan.upper;
    return rep;
}

WeightView family_view(const Family& f, const ModelParams& p, const Bounds& b) {
    WeightView v;
    v.w = [f](double mu) { return f.link_derivatives(mu).g1; };
    v.dw = [f](double mu) { return f.link_derivatives(mu).g2; };
    v.admissible = [f](double mu) { return f.mean_domain().contains(mu); };
    v.closed_form = f.identity_link();
    const auto k = f.kind();
    v.boundary_ok = p.beta1 == 0.0 && b.lower == 0.0 &&
                    (k == FamilyKind::Poisson || k == FamilyKind::NegativeBinomial ||
                     k == FamilyKind::Binomial);
    return v;
}

}  // namespace

std::string to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::ClosedForm: return "closed_form";
        case SolveMethod::RootFind: return "root_find";
        case SolveMethod::GridSearch1D: return "grid_search_1d";
        case SolveMethod::GridSearch2D: return "grid_search_2d";
        case SolveMethod::GridSearch3D: return "grid_search_3d";
    }
    throw ConfigError("unknown solve method");
}

double x2_equation(const Family& f, const ModelParams& p, double x1, double x3, double x2) {
    return x2_equation_core(family_view(f, p, Bounds{x1, x3}), p, x1, x3, x2);
}

double x2_upper_bound(const ModelParams& p, double x1, double x3) {
    if (x1 == 0.0) return x3 * std::exp(-1.0 / p.beta3);
    const double z1 = std::pow(x1, p.beta3), z3 = std::pow(x3, p.beta3);
    const double rhs = (z3 * std::log(z3) - z1 * std::log(z1)) / (z3 - z1) - 1.0;
    return std::exp(rhs / p.beta3);
}

double gaussian_x2_closed_form(const ModelParams& p, const Bounds& b) {
    if (b.lower == 0.0) return b.upper * std::exp(-1.0 / p.beta3);
    const double zl = std::pow(b.lower, p.beta3), zu = std::pow(b.upper, p.beta3);
    const double t = (zu * std::log(b.upper) - zl * std::log(b.lower)) / (zu - zl);
    return std::exp(t - 1.0 / p.beta3);
}

Interval poisson_x2_bounds(const ModelParams& p, double upper) {
    return {upper * std::exp(-2.0 / p.beta3), upper * std::exp(-1.0 / p.beta3)};
}

SolveReport solve(const Family& f, const ModelParams& p, const Bounds& b,
                  const SolverOptions& opt) {
    p.validate();
    b.validate();
    const auto k = f.kind();
    if (b.lower == 0.0 && p.beta1 == 0.0 &&
        (k == FamilyKind::Gamma || k == FamilyKind::InverseGaussian)) {
        throw InfeasibleError(
            "gamma and inverse gaussian responses require beta1 > 0 when the window starts "
            "at zero");
    }
    if (k == FamilyKind::InverseGaussian && b.lower == 0.0) {
        return invgauss_solve(p, b, opt.grid_step, opt);
    }
    return solve_core(family_view(f, p, b), p, b, opt);
}

SolveReport invgauss_solve(const ModelParams& p, const Bounds& b, double grid_step,
                           const SolverOptions& opt) {
    p.validate();
    b.validate();
    if (b.lower != 0.0) {
        throw ConfigError("the specialised inverse gaussian path needs a lower bound of zero");
    }
    if (p.beta1 == 0.0) {
        throw InfeasibleError(
            "inverse gaussian responses require beta1 > 0 when the window starts at zero");
    }
    if (b.width() < 10.0 * grid_step) {
        throw InfeasibleError("stimulus window narrower than ten grid steps");
    }
    const auto f = Family::inverse_gaussian();
    const auto view = family_view(f, p, b);
    const auto scan = scan_conditions(view, p, b, std::max(opt.condition_grid, 3));

    // the concavity combination mu g'' + 2 g' = -1/mu^3 is negative for every
    // mean, so the interior equation only has a root below the mean cap
    // mu(x2) < 2 beta1, i.e. x2 < (2 beta1 / beta2)^(1/beta3)
    const double cap = std::pow(2.0 * p.beta1 / p.beta2, 1.0 / p.beta3);
    const auto det_at = [&](double x2, double x3) {
        if (!(0.0 < x2 && x2 < x3 && x2 < cap)) return -kInf;
        return weighted_closed_det(view, p, Design{{0.0, x2, x3}, {1, 1, 1}, 0.0});
    };
    const auto axis = uniform_axis(b.lower, b.upper, grid_step);
    const int n = static_cast<int>(axis.size());
    if (grid::cells2(n) > opt.cell_cap) {
        throw BudgetError("plane search exceeds the cell budget");
    }
    const double b2sq = p.beta2 * p.beta2;
    const auto base = precompute(view, p, {0.0});
    const auto pre = precompute(view, p, axis);
    const grid::Eval2 coarse = [&](int j, int k) {
        const double x2c = axis[static_cast<size_t>(j)];
        if (!(x2c > 0.0 && x2c < cap)) return -kInf;
        return pre_det(b2sq, base, 0, pre, j, pre, k);
    };
    const auto best =
        opt.parallel ? grid::argmax2(n, coarse) : grid::argmax2_serial(n, coarse);
    if (best.value == -kInf) {
        throw InfeasibleError("no admissible design in the stimulus window");
    }

    // stationarity of the log determinant in x2 at fixed outer stimuli:
    //   beta3 (beta2 x2^b3 - 2 beta1) log(x3/x2) + 2 mu(x2) = 0,
    // negative at x2 -> 0+ and positive at the cap, so bisection applies
    const auto stationarity = [&](double x2, double x3) {
        return p.beta3 * (p.beta2 * std::pow(x2, p.beta3) - 2.0 * p.beta1) *
                   std::log(x3 / x2) +
               2.0 * mean(p, x2);
    };
    const auto refine_x2 = [&](double x3) {
        double lo = 1e-12 * b.upper, hi = std::min(cap, x3) * (1.0 - 1e-12);
        int iters = 0;
        while (hi - lo > 1e-14 * std::max(1.0, hi) && iters < 200) {
            const double mid = 0.5 * (lo + hi);
            if (stationarity(mid, x3) < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
            ++iters;
        }
        return std::tuple(0.5 * (lo + hi), Interval{lo, hi}, iters);
    };

    double x2 = axis[static_cast<size_t>(best.j)], x3 = axis[static_cast<size_t>(best.k)];
    double val = best.value;
    Interval bracket{x2 - grid_step, x2 + grid_step};
    int iterations = 0;
    double step = grid_step;
    if (opt.refine) {
        step = grid_step / 100.0;
        for (const double x3c : window_axis(x3, grid_step, step, b)) {
            if (x3c <= 0.0) continue;
            const auto [x2c, br, it] = refine_x2(x3c);
            const double v2 = det_at(x2c, x3c);
            if (v2 > val) {
                val = v2;
                x2 = x2c;
                x3 = x3c;
                bracket = br;
                iterations = it;
            }
        }
    }
    SolveReport rep;
    rep.design = Design{{0.0, x2, x3}, opt.replicates, 0.0};
    rep.design.det = weighted_closed_det(view, p, rep.design);
    rep.method = SolveMethod::GridSearch2D;
    rep.cond_lower = scan.lower;
    rep.cond_upper = scan.upper;
    rep.x2_interval = bracket;
    rep.iterations = iterations;
    rep.grid_step = step;
    return rep;
}

SolveReport hetero_solve(const HeteroSpec& spec, const ModelParams& p, const Bounds& b,
                         const SolverOptions& opt) {
    spec.validate();
    WeightView v;
    v.w = [&spec](double mu) { return hetero_h(spec, mu); };
    v.dw = [&spec](double mu) { return hetero_h_prime(spec, mu); };
    v.admissible = [&spec](double mu) { return is_admissible_mean(spec, mu); };
    v.closed_form = spec.is_constant();
    return solve_core(v, p, b, opt);
}

TransformSpec TransformSpec::identity() {
    TransformSpec t;
    t.name = "identity";
    t.psi = [](double mu) { return mu; };
    t.dpsi = [](double) { return 1.0; };
    t.d2psi = [](double) { return 0.0; };
    return t;
}

TransformSpec TransformSpec::sqrt() {
    TransformSpec t;
    t.name = "sqrt";
    t.psi = [](double mu) { return std::sqrt(mu); };
    t.dpsi = [](double mu) { return 0.5 / std::sqrt(mu); };
    t.d2psi = [](double mu) { return -0.25 / (mu * std::sqrt(mu)); };
    return t;
}

TransformSpec TransformSpec::exp() {
    TransformSpec t;
    t.name = "exp";
    t.psi = [](double mu) { return std::exp(mu); };
    t.dpsi = [](double mu) { return std::exp(mu); };
    t.d2psi = [](double mu) { return std::exp(mu); };
    return t;
}

TransformSpec TransformSpec::from_name(const std::string& name) {
    if (name == "identity" || name == "id") return identity();
    if (name == "sqrt") return sqrt();
    if (name == "exp") return exp();
    throw ConfigError("unknown response transform: " + name);
}

TransformedWeight transformed_weight(const Family& f, const TransformSpec& t, double mu) {
    const double s = t.psi(mu);
    if (!std::isfinite(s) || !f.mean_domain().contains(s)) {
        throw DomainError("transformed mean leaves the family domain");
    }
    const double d1 = t.dpsi(mu);
    const auto d = f.link_derivatives(s);
    return {d.g1 * d1 * d1, d.g2 * d1 * d1 * d1 + 2.0 * d.g1 * t.d2psi(mu) * d1};
}

SolveReport transformed_solve(const Family& f, const TransformSpec& t, const ModelParams& p,
                              const Bounds& b, const SolverOptions& opt) {
    if (!t.psi || !t.dpsi || !t.d2psi) {
        throw ConfigError("transform must provide psi and its first two derivatives");
    }
    if (t.name == "identity") return solve(f, p, b, opt);
    WeightView v;
    v.w = [&f, &t](double mu) { return transformed_weight(f, t, mu).w; };
    v.dw = [&f, &t](double mu) { return transformed_weight(f, t, mu).dw; };
    v.admissible = [&f, &t](double mu) {
        const double s = t.psi(mu);
        return std::isfinite(s) && f.mean_domain().contains(s) && std::isfinite(t.dpsi(mu));
    };
    return solve_core(v, p, b, opt);
}

Design brute_force_oracle(const Criterion& criterion, const Bounds& b, double grid_step,
                          const FixedStimuli& fixed, std::uint64_t cell_cap, bool parallel) {
    b.validate();
    const auto axis = uniform_axis(b.lower, b.upper, grid_step);
    const int n = static_cast<int>(axis.size());
    const auto guarded = [&](double x1, double x2, double x3) {
        if (!(x1 < x2 && x2 < x3)) return -kInf;
        return criterion(x1, x2, x3);
    };
    Design d;
    if (fixed.x1 && fixed.x3) {
        if (grid::cells1(n) > cell_cap) throw BudgetError("oracle grid exceeds the cell budget");
        const grid::Eval1 e = [&](int i) { return guarded(*fixed.x1, axis[static_cast<size_t>(i)], *fixed.x3); };
        const auto r = parallel ? grid::argmax1(n, e) : grid::argmax1_serial(n, e);
        d.x = {*fixed.x1, axis[static_cast<size_t>(r.i)], *fixed.x3};
        d.det = r.value;
    } else if (fixed.x1) {
        if (grid::cells2(n) > cell_cap) throw BudgetError("oracle grid exceeds the cell budget");
        const grid::Eval2 e = [&](int j, int k) {
            return guarded(*fixed.x1, axis[static_cast<size_t>(j)], axis[static_cast<size_t>(k)]);
        };
        const auto r = parallel ? grid::argmax2(n, e) : grid::argmax2_serial(n, e);
        d.x = {*fixed.x1, axis[static_cast<size_t>(r.j)], axis[static_cast<size_t>(r.k)]};
        d.det = r.value;
    } else if (fixed.x3) {
        if (grid::cells2(n) > cell_cap) throw BudgetError("oracle grid exceeds the cell budget");
        const grid::Eval2 e = [&](int j, int k) {
            return guarded(axis[static_cast<size_t>(j)], axis[static_cast<size_t>(k)], *fixed.x3);
        };
        const auto r = parallel ? grid::argmax2(n, e) : grid::argmax2_serial(n, e);
        d.x = {axis[static_cast<size_t>(r.j)], axis[static_cast<size_t>(r.k)], *fixed.x3};
        d.det = r.value;
    } else {
        if (grid::cells3(n) > cell_cap) throw BudgetError("oracle grid exceeds the cell budget");
        const grid::Eval3 e = [&](int i, int j, int k) {
            return guarded(axis[static_cast<size_t>(i)], axis[static_cast<size_t>(j)],
                           axis[static_cast<size_t>(k)]);
        };
        const auto r = parallel ? grid::argmax3(n, e) : grid::argmax3_serial(n, e);
        d.x = {axis[static_cast<size_t>(r.i)], axis[static_cast<size_t>(r.j)],
               axis[static_cast<size_t>(r.k)]};
        d.det = r.value;
    }
    if (d.det == -kInf) {
        throw InfeasibleError("no admissible design in the stimulus window");
    }
    return d;
}

Efficiency efficiency(const Family& f, const ModelParams& p, const Design& candidate,
                      const Design& optimal) {
    Efficiency e;
    e.ratio = det_explicit(f, p, candidate) / det_explicit(f, p, optimal);
    e.d_efficiency = std::cbrt(e.ratio);
    return e;
}

Design dilution_design(const Bounds& b, double dilution) {
    b.validate();
    if (dilution <= 1.0) {
        throw RangeError("dilution factor must exceed one");
    }
    const double u = b.upper;
    return Design{{u / (dilution * dilution), u / dilution, u}, {1, 1, 1}, 0.0};
}

}  // namespace mitopt
