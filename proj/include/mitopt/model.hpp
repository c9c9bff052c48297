#pragma once

#include <array>

#include "mitopt/errors.hpp"
#include "mitopt/linalg.hpp"

namespace mitopt {

// Mean response as a function of the stimulus x >= 0:
//
//   mu(x) = beta1 + beta2 * x^beta3
//
// beta1 >= 0 is the response at zero stimulus, beta2 > 0 the scale and
// beta3 > 0 the shape of the saturation-free growth curve.
struct ModelParams {
    double beta1 = 0.0;
    double beta2 = 1.0;
    double beta3 = 1.0;

    void validate() const;
};

// Stimulus window [lower, upper] with 0 <= lower < upper.
struct Bounds {
    double lower = 0.0;
    double upper = 1.0;

    void validate() const;
    double width() const { return upper - lower; }
};

// A three point design: stimuli x1 < x2 < x3 with replicate counts and
// the attained criterion value (determinant of the information matrix).
struct Design {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    std::array<int, 3> n{1, 1, 1};
    double det = 0.0;
};

double mean(const ModelParams& p, double x);

// Gradient of mu(x) with respect to (beta1, beta2, beta3). At x = 0 the
// conventions 0^beta3 = 0 and 0^beta3 * log 0 = 0 apply, giving (1, 0, 0).
Vec3 mean_gradient(const ModelParams& p, double x);

// Rows are the mean gradients at the three stimuli. Throws OrderError
// unless x1 < x2 < x3.
Mat3 design_matrix(const ModelParams& p, const std::array<double, 3>& x);

// Equivalent exponential-regression forms found in the literature. All
// act on a transformed stimulus z and map onto the power curve above.
//
//   SaturatingExp: E(y|z) = b1 - b2 exp(-b3 z),  x = exp(z)
//                  (equivalent power curve has negative scale and shape;
//                  that variant lives only behind this converter)
//   ExpDecay:      E(y|z) = b1 + b2 exp(-b3 z),  x = exp(-z), order flips
//   ExpGrowth:     E(y|z) = b1 + b2 exp(z/b3),   x = exp(z), beta3 = 1/b3
struct Parametrization {
    enum class Kind { Native, SaturatingExp, ExpDecay, ExpGrowth };

    Kind kind = Kind::Native;
    double b1 = 0.0;
    double b2 = 1.0;
    double b3 = 1.0;  // the ExpGrowth shape is the reciprocal of beta3
};

struct NativeConversion {
    ModelParams params;
    std::array<double, 3> x{};
    bool order_reversed = false;
};

// Maps three z stimuli and the variant parameters onto the native form.
NativeConversion to_native(const Parametrization& p, const std::array<double, 3>& z);

// Optimal interior z stimulus for the ExpGrowth form under a homoscedastic
// normal response, endpoints z1 < z3 fixed:
//
//   z2 = [z3 e^{z3/b3} - z1 e^{z1/b3}] / [e^{z3/b3} - e^{z1/b3}] - b3
//
// Throws PrecisionError when the denominator loses all precision.
double z2_optimal_exp_growth(double b3_tilde, double z1, double z3);

// Same quantity for the other two variants (shape parameter b3 > 0).
double z2_optimal_saturating_exp(double b3, double z1, double z3);
double z2_optimal_exp_decay(double b3, double z1, double z3);

}  // namespace mitopt
