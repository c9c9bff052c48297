#include "mitopt/family.hpp"

#include <cmath>
#include <limits>

namespace mitopt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Family Family::gaussian() { return Family(FamilyKind::Gaussian, 0); }
Family Family::poisson() { return Family(FamilyKind::Poisson, 0); }
Family Family::negative_binomial() { return Family(FamilyKind::NegativeBinomial, 0); }
Family Family::gamma() { return Family(FamilyKind::Gamma, 0); }
Family Family::inverse_gaussian() { return Family(FamilyKind::InverseGaussian, 0); }

Family Family::binomial(int trials) {
    if (trials <= 0) throw RangeError("binomial trial count must be positive");
    return Family(FamilyKind::Binomial, trials);
}

Family Family::from_name(const std::string& name, int trials) {
    if (name == "gaussian" || name == "normal") return gaussian();
    if (name == "poisson") return poisson();
    if (name == "negative-binomial" || name == "negative_binomial" || name == "negbin") return negative_binomial();
    if (name == "gamma") return gamma();
    if (name == "binomial") return binomial(trials);
    if (name == "inverse-gaussian" || name == "inverse_gaussian" || name == "invgauss") return inverse_gaussian();
    throw ConfigError("unknown family '" + name + "'");
}

std::string Family::name() const {
    switch (kind_) {
        case FamilyKind::Gaussian: return "gaussian";
        case FamilyKind::Poisson: return "poisson";
        case FamilyKind::NegativeBinomial: return "negative-binomial";
        case FamilyKind::Gamma: return "gamma";
        case FamilyKind::Binomial: return "binomial";
        case FamilyKind::InverseGaussian: return "inverse-gaussian";
    }
    return "?";
}

MeanDomain Family::mean_domain() const {
    switch (kind_) {
        case FamilyKind::Gaussian: return {-kInf, kInf};
        case FamilyKind::Binomial: return {0.0, static_cast<double>(trials_)};
        default: return {0.0, kInf};
    }
}

double Family::link(double mu) const {
    if (!mean_domain().contains(mu))
        throw DomainError("mean outside the open mean domain of " + name());
    switch (kind_) {
        case FamilyKind::Gaussian: return mu;
        case FamilyKind::Poisson:
        case FamilyKind::NegativeBinomial: return std::log(mu);
        case FamilyKind::Gamma: return -1.0 / mu;
        case FamilyKind::Binomial: return std::log(mu / (trials_ - mu));
        case FamilyKind::InverseGaussian: return -0.5 / (mu * mu);
    }
    return 0.0;
}

LinkDerivs Family::link_derivatives(double mu) const {
    if (!mean_domain().contains(mu))
        throw DomainError("mean outside the open mean domain of " + name());
    switch (kind_) {
        case FamilyKind::Gaussian:
            return {1.0, 0.0};
        case FamilyKind::Poisson:
        case FamilyKind::NegativeBinomial:
            return {1.0 / mu, -1.0 / (mu * mu)};
        case FamilyKind::Gamma:
            return {1.0 / (mu * mu), -2.0 / (mu * mu * mu)};
        case FamilyKind::Binomial: {
            const double rest = trials_ - mu;
            return {trials_ / (mu * rest), -1.0 / (mu * mu) + 1.0 / (rest * rest)};
        }
        case FamilyKind::InverseGaussian: {
            const double mu3 = mu * mu * mu;
            return {1.0 / mu3, -3.0 / (mu3 * mu)};
        }
    }
    return {0.0, 0.0};
}

ConditionReport Family::theorem_conditions(double mu) const {
    const auto d = link_derivatives(mu);
    ConditionReport r;
    r.mu = mu;
    r.c1 = d.g1 >= 0.0;
    r.c2 = d.g2 <= 0.0;
    // the combination mu g'' + 2 g' can sit exactly on zero (gamma does, for
    // every mu); absorb the few ulps of cancellation noise around that boundary
    const double scale = std::abs(mu * d.g2) + std::abs(2.0 * d.g1);
    r.c3 = mu * d.g2 + 2.0 * d.g1 >= -1e-12 * scale;
    return r;
}

}  // namespace mitopt
