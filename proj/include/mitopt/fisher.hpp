#pragma once

#include <functional>
#include <optional>

#include "mitopt/family.hpp"
#include "mitopt/linalg.hpp"
#include "mitopt/model.hpp"

namespace mitopt {

// Fisher information of the regression parameters at a three point design,
//
//   I[r][s] = sum_i n_i g'(mu_i) (dmu_i/dbeta_r)(dmu_i/dbeta_s),
//
// with the dispersion normalised to a(phi) = 1. The criterion value is
// |I|; scaling by the true dispersion rescales the determinant without
// moving its maximiser.
Mat3 info_matrix(const Family& f, const ModelParams& p, const Design& d);

// |I| in closed form:
//
//   det = beta2^2 * B^2 * prod_i n_i g'(mu_i),
//   B   = (x1 x2)^b3 log(x2/x1) - (x1 x3)^b3 log(x3/x1) + (x2 x3)^b3 log(x3/x2)
//
// With x1 = 0 the first two summands vanish and B = (x2 x3)^b3 log(x3/x2).
// Invariant under permutations of the (x_i, n_i) pairs.
double det_explicit(const Family& f, const ModelParams& p, const Design& d);

// |X' W X| with X the design matrix and W = diag(n_i g'(mu_i)). Same
// quantity as det_explicit by construction, kept as a cross check.
double weighted_lsq_det(const Family& f, const ModelParams& p, const Design& d);

// Heteroscedastic normal response y ~ N(mu, sigma2 * phi(mu)). The
// information weight replacing g'(mu) is
//
//   h(mu) = 0.5 [phi'(mu)/phi(mu)]^2 + 1 / (sigma2 * phi(mu)).
struct HeteroSpec {
    double sigma2 = 1.0;
    std::function<double(double)> phi;
    std::function<double(double)> dphi;
    std::optional<double> power_p;  // set when phi(mu) = mu^p

    // phi(mu) = mu^p, p >= 0; p = 0 degenerates to the constant case
    static HeteroSpec power(double p, double sigma2);
    // phi identically 1
    static HeteroSpec constant(double sigma2);

    void validate() const;
    bool is_power() const { return power_p.has_value(); }
    bool is_constant() const { return power_p.has_value() && *power_p == 0.0; }
};

double hetero_h(const HeteroSpec& spec, double mu);
// derivative h'(mu), needed by the interior stimulus equation
double hetero_h_prime(const HeteroSpec& spec, double mu);
// constant variance admits any mean, otherwise the mean must be positive
bool is_admissible_mean(const HeteroSpec& spec, double mu);

// Information for the regression parameters with weights h(mu_i).
Mat3 hetero_info_matrix(const HeteroSpec& spec, const ModelParams& p, const Design& d);

// Exact covariances of the score components in the heteroscedastic model.
// The dispersion block is free of the regression parameters:
//
//   var_phi       = sum_i n_i / (2 sigma2^2)
//   cov_beta_phi[k] = (1 / (2 sigma2)) sum_i n_i [phi'(mu_i)/phi(mu_i)] dmu_i/dbeta_k
//
// cov_beta_phi vanishes identically when phi is constant.
struct ScoreCovariances {
    Mat3 var_beta;
    double var_phi = 0.0;
    Vec3 cov_beta_phi;
};

ScoreCovariances hetero_score_covariances(const HeteroSpec& spec, const ModelParams& p,
                                          const Design& d);

}  // namespace mitopt
