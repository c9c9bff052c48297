#include "mitopt/fisher.hpp"

#include <cmath>

namespace mitopt {

namespace {

// z = x^b3 and w = log x with the zero-stimulus conventions applied
struct PowLog {
    double z, w;
};

PowLog powlog(double x, double b3) {
    if (x < 0.0) throw RangeError("stimulus must be nonnegative");
    if (x == 0.0) return {0.0, 0.0};
    return {std::pow(x, b3), std::log(x)};
}

double closed_det(const ModelParams& p, const Design& d, const std::array<double, 3>& weight) {
    const auto a = powlog(d.x[0], p.beta3);
    const auto b = powlog(d.x[1], p.beta3);
    const auto c = powlog(d.x[2], p.beta3);
    const double B = a.z * b.z * (b.w - a.w) - a.z * c.z * (c.w - a.w) + b.z * c.z * (c.w - b.w);
    return p.beta2 * p.beta2 * B * B * (d.n[0] * weight[0]) * (d.n[1] * weight[1]) *
           (d.n[2] * weight[2]);
}

void check_counts(const Design& d) {
    for (int ni : d.n)
        if (ni <= 0) throw RangeError("replicate counts must be positive");
}

}  // namespace

Mat3 info_matrix(const Family& f, const ModelParams& p, const Design& d) {
    check_counts(d);
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
        const double mu = mean(p, d.x[static_cast<size_t>(i)]);
        const double w = d.n[static_cast<size_t>(i)] * f.link_derivatives(mu).g1;
        const Vec3 g = mean_gradient(p, d.x[static_cast<size_t>(i)]);
        for (int r = 0; r < 3; ++r)
            for (int c = r; c < 3; ++c) m(r, c) += w * g[r] * g[c];
    }
    m(1, 0) = m(0, 1);
    m(2, 0) = m(0, 2);
    m(2, 1) = m(1, 2);
    return m;
}

double det_explicit(const Family& f, const ModelParams& p, const Design& d) {
    check_counts(d);
    std::array<double, 3> w{};
    for (int i = 0; i < 3; ++i)
        w[static_cast<size_t>(i)] = f.link_derivatives(mean(p, d.x[static_cast<size_t>(i)])).g1;
    return closed_det(p, d, w);
}

double weighted_lsq_det(const Family& f, const ModelParams& p, const Design& d) {
    check_counts(d);
    const Mat3 X = design_matrix(p, d.x);
    Mat3 WX = X;
    for (int i = 0; i < 3; ++i) {
        const double w =
            d.n[static_cast<size_t>(i)] * f.link_derivatives(mean(p, d.x[static_cast<size_t>(i)])).g1;
        for (int c = 0; c < 3; ++c) WX(i, c) *= w;
    }
    return X.transpose().mul(WX).det();
}

HeteroSpec HeteroSpec::power(double p, double sigma2) {
    if (!(p >= 0.0)) throw ConfigError("variance power must be nonnegative");
    HeteroSpec s;
    s.sigma2 = sigma2;
    s.power_p = p;
    s.phi = [p](double mu) { return p == 0.0 ? 1.0 : std::pow(mu, p); };
    s.dphi = [p](double mu) { return p == 0.0 ? 0.0 : p * std::pow(mu, p - 1.0); };
    return s;
}

HeteroSpec HeteroSpec::constant(double sigma2) { return power(0.0, sigma2); }

void HeteroSpec::validate() const {
    if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
    if (!phi || !dphi) throw ConfigError("variance function not set");
}

double hetero_h(const HeteroSpec& spec, double mu) {
    spec.validate();
    if (!is_admissible_mean(spec, mu))
        throw DomainError("mean must be positive under a nonconstant variance function");
    const double f = spec.phi(mu);
    const double fp = spec.dphi(mu);
    const double r = fp / f;
    return 0.5 * r * r + 1.0 / (spec.sigma2 * f);
}

double hetero_h_prime(const HeteroSpec& spec, double mu) {
    spec.validate();
    if (spec.is_power()) {
        const double p = *spec.power_p;
        if (p == 0.0) return 0.0;
        if (!(mu > 0.0)) throw DomainError("mean must be positive");
        return -p * (p / (mu * mu * mu) + 1.0 / (spec.sigma2 * std::pow(mu, p + 1.0)));
    }
    // central difference fallback for custom variance functions
    const double h = 1e-6 * std::max(1.0, std::fabs(mu));
    return (hetero_h(spec, mu + h) - hetero_h(spec, mu - h)) / (2.0 * h);
}

bool is_admissible_mean(const HeteroSpec& spec, double mu) {
    return spec.is_constant() || mu > 0.0;
}

Mat3 hetero_info_matrix(const HeteroSpec& spec, const ModelParams& p, const Design& d) {
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
        const double mu = mean(p, d.x[static_cast<size_t>(i)]);
        const double w = d.n[static_cast<size_t>(i)] * hetero_h(spec, mu);
        const Vec3 g = mean_gradient(p, d.x[static_cast<size_t>(i)]);
        for (int r = 0; r < 3; ++r)
            for (int c = r; c < 3; ++c) m(r, c) += w * g[r] * g[c];
    }
    m(1, 0) = m(0, 1);
    m(2, 0) = m(0, 2);
    m(2, 1) = m(1, 2);
    return m;
}

ScoreCovariances hetero_score_covariances(const HeteroSpec& spec, const ModelParams& p,
                                          const Design& d) {
    spec.validate();
    ScoreCovariances sc;
    sc.var_beta = hetero_info_matrix(spec, p, d);
    double ntot = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double mu = mean(p, d.x[static_cast<size_t>(i)]);
        if (!is_admissible_mean(spec, mu)) throw DomainError("mean must be positive");
        const double ratio = spec.is_constant() ? 0.0 : spec.dphi(mu) / spec.phi(mu);
        const Vec3 g = mean_gradient(p, d.x[static_cast<size_t>(i)]);
        for (int k = 0; k < 3; ++k)
            sc.cov_beta_phi[k] += d.n[static_cast<size_t>(i)] * ratio * g[k] / (2.0 * spec.sigma2);
        ntot += d.n[static_cast<size_t>(i)];
    }
    sc.var_phi = ntot / (2.0 * spec.sigma2 * spec.sigma2);
    return sc;
}

}  // namespace mitopt
