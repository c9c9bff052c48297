#pragma once

#include <string>

#include "mitopt/errors.hpp"

namespace mitopt {

// Response distributions in natural exponential family form
//   f(y | theta, phi) = exp{ [y*theta - b(theta)] / a(phi) + c(y, phi) },
// each paired with its canonical link g so that theta = g(mu).
//
//   Gaussian          g(mu) = mu             mu in R
//   Poisson           g(mu) = log mu         mu in (0, inf)
//   NegativeBinomial  g(mu) = log mu         mu in (0, inf)
//   Gamma             g(mu) = -1/mu          mu in (0, inf)
//   Binomial(N)       g(mu) = log(mu/(N-mu)) mu in (0, N)
//   InverseGaussian   g(mu) = -1/(2 mu^2)    mu in (0, inf)
//
// NegativeBinomial shares the Poisson link; the two differ only in
// dispersion, which matters for estimation but not for design.
enum class FamilyKind {
    Gaussian,
    Poisson,
    NegativeBinomial,
    Gamma,
    Binomial,
    InverseGaussian,
};

// First two link derivatives at a mean value.
struct LinkDerivs {
    double g1;  // g'(mu)
    double g2;  // g''(mu)
};

// Placement conditions evaluated at one mean value:
//   c1:  g'(mu)  >= 0   (information weight is nonnegative)
//   c2:  g''(mu) <= 0   (weight is concave in the mean; pins x1 at the
//                        lower end of the stimulus window)
//   c3:  mu*g''(mu) + 2 g'(mu) >= 0   (pins x3 at the upper end)
struct ConditionReport {
    double mu = 0.0;
    bool c1 = false;
    bool c2 = false;
    bool c3 = false;

    bool all() const { return c1 && c2 && c3; }
};

// Open interval of admissible means.
struct MeanDomain {
    double lo;  // open
    double hi;  // open

    bool contains(double mu) const { return mu > lo && mu < hi; }
};

class Family {
  public:
    static Family gaussian();
    static Family poisson();
    static Family negative_binomial();
    static Family gamma();
    static Family binomial(int trials);
    static Family inverse_gaussian();

    static Family from_name(const std::string& name, int trials = 0);

    FamilyKind kind() const { return kind_; }
    int trials() const { return trials_; }
    std::string name() const;

    MeanDomain mean_domain() const;

    // Canonical link and its derivatives. Throws DomainError when mu is
    // outside the open mean domain (boundaries included).
    double link(double mu) const;
    LinkDerivs link_derivatives(double mu) const;

    ConditionReport theorem_conditions(double mu) const;

    // The identity link has g'' identically zero, which admits a closed
    // form for the interior stimulus.
    bool identity_link() const { return kind_ == FamilyKind::Gaussian; }

    // Whether the dispersion a(phi) is treated as known. The likelihood
    // equations for the regression parameters do not involve it either way.
    bool dispersion_known() const { return dispersion_known_; }

    // The variance of the dispersion score in the heteroscedastic normal
    // model is free of the regression parameters; exposed as a named
    // constant of the design criterion rather than recomputed.
    static constexpr bool var_phi_beta_independent = true;

  private:
    Family(FamilyKind kind, int trials) : kind_(kind), trials_(trials) {}

    FamilyKind kind_;
    int trials_ = 0;  // Binomial only
    bool dispersion_known_ = true;
};

}  // namespace mitopt
