#include "mitopt/mle.hpp"

#include <cmath>
#include <limits>

#include "mitopt/rng.hpp"

namespace mitopt {

namespace {

bool params_admissible(const Family& f, const ModelParams& p, const Design& d) {
    if (!(p.beta1 >= 0.0) || !(p.beta2 > 0.0) || !(p.beta3 > 0.0)) return false;
    const auto dom = f.mean_domain();
    for (const double x : d.x) {
        if (!dom.contains(mean(p, x))) return false;
    }
    return true;
}

// canonical parameter and cumulant at a mean value
struct ThetaB {
    double theta;
    double b;
};

ThetaB theta_b(const Family& f, double mu) {
    switch (f.kind()) {
        case FamilyKind::Gaussian:
            return {mu, 0.5 * mu * mu};
        case FamilyKind::Poisson:
        case FamilyKind::NegativeBinomial:
            return {std::log(mu), mu};
        case FamilyKind::Gamma:
            return {-1.0 / mu, std::log(mu)};
        case FamilyKind::Binomial: {
            const double n = f.trials();
            return {std::log(mu / (n - mu)), n * std::log(n / (n - mu))};
        }
        case FamilyKind::InverseGaussian:
            return {-0.5 / (mu * mu), -1.0 / mu};
    }
    throw ConfigError("unknown family");
}

}  // namespace

void SimConfig::validate(const Family& f) const {
    if (replicates <= 0 || n_per_point <= 0) {
        throw ConfigError("replicates and draws per point must be positive");
    }
    switch (f.kind()) {
        case FamilyKind::Gaussian:
            if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be positive");
            break;
        case FamilyKind::Gamma:
            if (!(gamma_shape > 0.0)) throw ConfigError("gamma shape must be positive");
            break;
        case FamilyKind::NegativeBinomial:
            if (!(negbin_size > 0.0)) throw ConfigError("negative binomial size must be positive");
            break;
        case FamilyKind::InverseGaussian:
            if (!(ig_lambda > 0.0)) throw ConfigError("inverse gaussian shape must be positive");
            break;
        default:
            break;
    }
}

double SimConfig::a_phi(const Family& f) const {
    switch (f.kind()) {
        case FamilyKind::Gaussian:
            return sigma2;
        case FamilyKind::Gamma:
            return 1.0 / gamma_shape;
        case FamilyKind::InverseGaussian:
            return 1.0 / ig_lambda;
        default:
            return 1.0;
    }
}

Dataset simulate(const Family& f, const ModelParams& p, const Design& d, const SimConfig& cfg) {
    cfg.validate(f);
    p.validate();
    const auto dom = f.mean_domain();
    std::array<double, 3> mu{};
    for (int i = 0; i < 3; ++i) {
        mu[static_cast<size_t>(i)] = mean(p, d.x[static_cast<size_t>(i)]);
        if (!dom.contains(mu[static_cast<size_t>(i)])) {
            throw DomainError("design means leave the admissible domain");
        }
    }
    Dataset out;
    out.replicates.resize(static_cast<size_t>(cfg.replicates));
    for (int r = 0; r < cfg.replicates; ++r) {
        auto& ps = out.replicates[static_cast<size_t>(r)];
        for (int i = 0; i < 3; ++i) {
            rng::Stream s(cfg.seed, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(i));
            const long count =
                static_cast<long>(cfg.n_per_point) * d.n[static_cast<size_t>(i)];
            const double m = mu[static_cast<size_t>(i)];
            double sum = 0.0;
            for (long j = 0; j < count; ++j) {
                switch (f.kind()) {
                    case FamilyKind::Gaussian:
                        sum += s.normal(m, std::sqrt(cfg.sigma2));
                        break;
                    case FamilyKind::Poisson:
                        sum += static_cast<double>(s.poisson(m));
                        break;
                    case FamilyKind::NegativeBinomial:
                        sum += static_cast<double>(s.negative_binomial(m, cfg.negbin_size));
                        break;
                    case FamilyKind::Gamma:
                        sum += s.gamma(cfg.gamma_shape, m / cfg.gamma_shape);
                        break;
                    case FamilyKind::Binomial:
                        sum += static_cast<double>(s.binomial(f.trials(), m / f.trials()));
                        break;
                    case FamilyKind::InverseGaussian:
                        sum += s.inverse_gaussian(m, cfg.ig_lambda);
                        break;
                }
            }
            ps.ysum[static_cast<size_t>(i)] = sum;
            ps.count[static_cast<size_t>(i)] = count;
        }
    }
    return out;
}

FitResult fit(const Family& f, const PointSums& data, const Design& d, const ModelParams& start,
              const FitOptions& opt) {
    start.validate();
    if (!params_admissible(f, start, d)) {
        throw DomainError("start value drives a design mean outside the admissible domain");
    }
    double total = 0.0;
    for (const long c : data.count) total += static_cast<double>(c);

    ModelParams beta = start;
    FitResult res;
    for (int iter = 1; iter <= opt.max_iterations; ++iter) {
        Vec3 score;
        Mat3 info = Mat3::zero();
        for (int i = 0; i < 3; ++i) {
            const double x = d.x[static_cast<size_t>(i)];
            const double mu = mean(beta, x);
            const double w = f.link_derivatives(mu).g1;
            const auto grad = mean_gradient(beta, x);
            const double ni = static_cast<double>(data.count[static_cast<size_t>(i)]);
            const double resid = data.ysum[static_cast<size_t>(i)] - ni * mu;
            for (int k = 0; k < 3; ++k) score[k] += resid * w * grad[k];
            const auto gg = outer(grad, grad);
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) info(r, c) += ni * w * gg(r, c);
        }
        res.score = score;
        res.iterations = iter - 1;
        if (score.norm_inf() < opt.score_tol * total) {
            res.converged = true;
            break;
        }
        double cond = 0.0;
        try {
            cond = info.cond_inf();
        } catch (const SingularInformationError&) {
            throw SingularInformationError("information matrix is singular at the iterate");
        }
        if (!std::isfinite(cond) || cond > opt.singular_cond) {
            throw SingularInformationError("information matrix is numerically singular");
        }
        const Vec3 delta = info.inverse().mul(score);

        // step halving keeps the iterate admissible
        double t = 1.0;
        bool stepped = false;
        for (int h = 0; h < 40; ++h) {
            ModelParams cand{beta.beta1 + t * delta[0], beta.beta2 + t * delta[1],
                             beta.beta3 + t * delta[2]};
            if (params_admissible(f, cand, d)) {
                beta = cand;
                stepped = true;
                break;
            }
            t *= 0.5;
        }
        if (!stepped) {
            throw NonConvergenceError("no admissible step along the scoring direction");
        }
    }
    if (!res.converged) {
        throw NonConvergenceError("likelihood equations not solved within the iteration cap");
    }
    res.beta_hat = beta;
    double ll = 0.0;
    for (int i = 0; i < 3; ++i) {
        const auto tb = theta_b(f, mean(beta, d.x[static_cast<size_t>(i)]));
        ll += data.ysum[static_cast<size_t>(i)] * tb.theta -
              static_cast<double>(data.count[static_cast<size_t>(i)]) * tb.b;
    }
    res.loglik = ll / opt.a_phi;
    return res;
}

namespace {

CovarianceReport covariance_impl(const Family& f, const ModelParams& p, const Design& d,
                                 const SimConfig& cfg, bool parallel) {
    const auto data = simulate(f, p, d, cfg);
    const ModelParams start{1.1 * p.beta1, 1.1 * p.beta2, 1.1 * p.beta3};
    FitOptions fo;
    fo.a_phi = cfg.a_phi(f);

    const int R = cfg.replicates;
    std::vector<std::array<double, 3>> est(static_cast<size_t>(R));
    std::vector<char> ok(static_cast<size_t>(R), 0);

    const auto fit_one = [&](int r) {
        try {
            const auto res = fit(f, data.replicates[static_cast<size_t>(r)], d, start, fo);
            est[static_cast<size_t>(r)] = {res.beta_hat.beta1, res.beta_hat.beta2,
                                           res.beta_hat.beta3};
            ok[static_cast<size_t>(r)] = 1;
        } catch (const Error&) {
            ok[static_cast<size_t>(r)] = 0;
        }
    };
    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
        for (int r = 0; r < R; ++r) fit_one(r);
    } else {
        for (int r = 0; r < R; ++r) fit_one(r);
    }

    CovarianceReport rep;
    rep.replicates = R;
    for (int r = 0; r < R; ++r) {
        if (ok[static_cast<size_t>(r)]) {
            rep.estimates.push_back(est[static_cast<size_t>(r)]);
            ++rep.converged;
        }
    }
    const auto M = static_cast<double>(rep.converged);
    if (rep.converged < 3) {
        throw NonConvergenceError("too few converged replicates for a covariance estimate");
    }
    std::array<double, 3> mean_hat{0.0, 0.0, 0.0};
    for (const auto& e : rep.estimates) {
        for (int k = 0; k < 3; ++k) mean_hat[static_cast<size_t>(k)] += e[static_cast<size_t>(k)];
    }
    for (auto& m : mean_hat) m /= M;
    Mat3 emp = Mat3::zero();
    for (const auto& e : rep.estimates) {
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                emp(r, c) += (e[static_cast<size_t>(r)] - mean_hat[static_cast<size_t>(r)]) *
                             (e[static_cast<size_t>(c)] - mean_hat[static_cast<size_t>(c)]);
    }
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) emp(r, c) /= (M - 1.0);
    rep.empirical = emp;

    Design scaled = d;
    for (auto& n : scaled.n) n *= cfg.n_per_point;
    const Mat3 inv = info_matrix(f, p, scaled).inverse();
    const double a = cfg.a_phi(f);
    Mat3 expct = Mat3::zero();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) expct(r, c) = a * inv(r, c);
    rep.expected = expct;

    for (int k = 0; k < 3; ++k) {
        const double dev = std::abs(emp(k, k) - expct(k, k)) / expct(k, k);
        rep.max_diag_rel_dev = std::max(rep.max_diag_rel_dev, dev);
    }
    rep.empirical_gen_var = emp.det();
    rep.expected_gen_var = expct.det();
    return rep;
}

}  // namespace

CovarianceReport covariance_check(const Family& f, const ModelParams& p, const Design& d,
                                  const SimConfig& cfg, bool parallel) {
    return covariance_impl(f, p, d, cfg, parallel);
}

CovarianceReport covariance_check_serial(const Family& f, const ModelParams& p, const Design& d,
                                         const SimConfig& cfg) {
    return covariance_impl(f, p, d, cfg, false);
}

}  // namespace mitopt
