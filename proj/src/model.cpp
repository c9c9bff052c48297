#include "mitopt/model.hpp"

#include <cmath>

namespace mitopt {

void ModelParams::validate() const {
    if (!(beta1 >= 0.0)) throw DomainError("beta1 must be nonnegative");
    if (!(beta2 > 0.0)) throw DomainError("beta2 must be positive");
    if (!(beta3 > 0.0)) throw DomainError("beta3 must be positive");
}

void Bounds::validate() const {
    if (!(lower >= 0.0)) throw RangeError("stimulus window must start at or above 0");
    if (!(upper > lower)) throw RangeError("stimulus window must have positive width");
}

double mean(const ModelParams& p, double x) {
    if (x < 0.0) throw RangeError("stimulus must be nonnegative");
    if (x == 0.0) return p.beta1;
    return p.beta1 + p.beta2 * std::pow(x, p.beta3);
}

Vec3 mean_gradient(const ModelParams& p, double x) {
    if (x < 0.0) throw RangeError("stimulus must be nonnegative");
    Vec3 g;
    g[0] = 1.0;
    if (x == 0.0) return g;  // 0^b3 = 0 and 0^b3 log 0 = 0
    const double xb = std::pow(x, p.beta3);
    g[1] = xb;
    g[2] = p.beta2 * xb * std::log(x);
    return g;
}

Mat3 design_matrix(const ModelParams& p, const std::array<double, 3>& x) {
    if (!(x[0] < x[1] && x[1] < x[2]))
        throw OrderError("stimuli must be strictly increasing");
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
        auto g = mean_gradient(p, x[static_cast<size_t>(i)]);
        for (int c = 0; c < 3; ++c) m(i, c) = g[c];
    }
    return m;
}

NativeConversion to_native(const Parametrization& p, const std::array<double, 3>& z) {
    NativeConversion out;
    switch (p.kind) {
        case Parametrization::Kind::Native:
            out.params = ModelParams{p.b1, p.b2, p.b3};
            out.x = z;
            break;
        case Parametrization::Kind::SaturatingExp:
            // x = exp(z); the equivalent power curve carries negative scale
            // and shape, so only the stimulus map and the z2 helper below
            // speak for this variant
            out.params = ModelParams{p.b1, p.b2, p.b3};
            for (int i = 0; i < 3; ++i)
                out.x[static_cast<size_t>(i)] = std::exp(z[static_cast<size_t>(i)]);
            break;
        case Parametrization::Kind::ExpDecay:
            // x = exp(-z) reverses the stimulus order
            out.params = ModelParams{p.b1, p.b2, p.b3};
            for (int i = 0; i < 3; ++i)
                out.x[static_cast<size_t>(i)] = std::exp(-z[static_cast<size_t>(2 - i)]);
            out.order_reversed = true;
            break;
        case Parametrization::Kind::ExpGrowth:
            if (!(p.b3 > 0.0)) throw DomainError("ExpGrowth shape must be positive");
            out.params = ModelParams{p.b1, p.b2, 1.0 / p.b3};
            for (int i = 0; i < 3; ++i)
                out.x[static_cast<size_t>(i)] = std::exp(z[static_cast<size_t>(i)]);
            break;
    }
    return out;
}

double z2_optimal_exp_growth(double b3_tilde, double z1, double z3) {
    if (!(b3_tilde != 0.0)) throw DomainError("shape must be nonzero");
    if (!(z3 > z1)) throw PrecisionError("z window must have positive width");
    const double e1 = std::exp(z1 / b3_tilde);
    const double e3 = std::exp(z3 / b3_tilde);
    const double denom = e3 - e1;
    if (std::fabs(denom) <= 1e-14 * std::max(std::fabs(e1), std::fabs(e3)))
        throw PrecisionError("z window too narrow for the optimal stimulus formula");
    return (z3 * e3 - z1 * e1) / denom - b3_tilde;
}

double z2_optimal_saturating_exp(double b3, double z1, double z3) {
    if (!(b3 > 0.0)) throw DomainError("shape must be positive");
    // same formula with the shape -1/b3
    return z2_optimal_exp_growth(-1.0 / b3, z1, z3);
}

double z2_optimal_exp_decay(double b3, double z1, double z3) {
    if (!(b3 > 0.0)) throw DomainError("shape must be positive");
    return z2_optimal_exp_growth(-1.0 / b3, z1, z3);
}

}  // namespace mitopt
