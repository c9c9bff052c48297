#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mitopt/family.hpp"
#include "mitopt/fisher.hpp"
#include "mitopt/model.hpp"

namespace mitopt {

// Monte Carlo configuration. Dispersion fields are used only by the
// families that need them; all must be positive where they apply.
struct SimConfig {
    std::uint64_t seed = 1;
    int replicates = 100;
    int n_per_point = 100;

    double sigma2 = 1.0;       // Gaussian variance
    double gamma_shape = 2.0;  // Gamma shape k, variance mu^2/k
    double negbin_size = 5.0;  // size r, variance mu + mu^2/r
    double ig_lambda = 1.0;    // variance mu^3/lambda

    void validate(const Family& f) const;

    // a(phi) implied by the dispersion above; the regression estimates do
    // not depend on it, their covariance does.
    double a_phi(const Family& f) const;
};

// Per replicate sufficient statistics: the response total at each design
// point and the number of draws behind it.
struct PointSums {
    std::array<double, 3> ysum{0.0, 0.0, 0.0};
    std::array<long, 3> count{0, 0, 0};
};

struct Dataset {
    std::vector<PointSums> replicates;
};

// Draws config.n_per_point * design.n[i] observations at each stimulus for
// every replicate. Draw streams are indexed by (seed, replicate, point),
// so the output is identical no matter how the loop is scheduled.
Dataset simulate(const Family& f, const ModelParams& p, const Design& d, const SimConfig& cfg);

struct FitResult {
    ModelParams beta_hat;
    bool converged = false;
    int iterations = 0;
    double loglik = 0.0;  // kernel sum_i [y_i. * theta_i - N_i b(theta_i)]
    Vec3 score;           // at the returned estimate, a(phi) = 1 scale
};

struct FitOptions {
    int max_iterations = 200;
    // converged when max_k |score_k| < score_tol * total draw count
    double score_tol = 1e-8;
    double singular_cond = 1e12;
    // a(phi) scales the log likelihood report; the likelihood equations
    // for beta cancel it, so the estimate is unaffected by construction
    double a_phi = 1.0;
};

// Fisher scoring on the likelihood equations
//   sum_i (y_i. - N_i mu_i) g'(mu_i) dmu_i/dbeta_k = 0,
// with step halving to keep iterates admissible. Throws
// NonConvergenceError past the iteration cap and
// SingularInformationError when the information matrix degenerates.
FitResult fit(const Family& f, const PointSums& data, const Design& d, const ModelParams& start,
              const FitOptions& opt = {});

// Simulate, fit every replicate (start value: truth scaled by 1.1) and
// compare the empirical covariance of the estimates against the inverse
// information scaled by a(phi). Replicates are fitted concurrently;
// estimates are stored per replicate and reduced in fixed order, so the
// report does not depend on the thread count.
struct CovarianceReport {
    Mat3 empirical;
    Mat3 expected;
    double max_diag_rel_dev = 0.0;
    double empirical_gen_var = 0.0;  // det of the empirical covariance
    double expected_gen_var = 0.0;
    int converged = 0;
    int replicates = 0;
    std::vector<std::array<double, 3>> estimates;  // converged fits only
};

CovarianceReport covariance_check(const Family& f, const ModelParams& p, const Design& d,
                                  const SimConfig& cfg, bool parallel = true);

// serial reference for the replicate loop, kept for testing
CovarianceReport covariance_check_serial(const Family& f, const ModelParams& p, const Design& d,
                                         const SimConfig& cfg);

}  // namespace mitopt
