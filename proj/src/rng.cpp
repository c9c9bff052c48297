#include "mitopt/rng.hpp"

#include <cmath>

namespace mitopt::rng {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replicate, std::uint64_t point) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (0xA0761D6478BD642FULL + replicate));
    h = splitmix64(h ^ (0xE7037ED1A0B428DBULL + point));
    return h;
}

double Stream::uniform() {
    // 53 mantissa bits; reject zero so log() stays finite
    while (true) {
        const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
        if (u > 0.0) return u;
    }
}

double Stream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    constexpr double two_pi = 6.283185307179586476925287;
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(two_pi * u2);
    have_spare_ = true;
    return r * std::cos(two_pi * u2);
}

double Stream::gamma(double shape, double scale) {
    if (shape < 1.0) {
        const double u = uniform();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

long Stream::poisson(double mu) {
    if (mu <= 0.0) return 0;
    // exp(-mu) stays far from the underflow range once means are split
    if (mu > 30.0) {
        const double half = 0.5 * mu;
        return poisson(half) + poisson(mu - half);
    }
    const double limit = std::exp(-mu);
    long k = 0;
    double prod = uniform();
    while (prod > limit) {
        ++k;
        prod *= uniform();
    }
    return k;
}

long Stream::binomial(int n, double p) {
    long k = 0;
    for (int i = 0; i < n; ++i) {
        if (uniform() < p) ++k;
    }
    return k;
}

double Stream::inverse_gaussian(double mu, double lambda) {
    const double z = normal();
    const double y = z * z;
    const double x = mu + mu * mu * y / (2.0 * lambda) -
                     mu / (2.0 * lambda) * std::sqrt(4.0 * mu * lambda * y + mu * mu * y * y);
    if (uniform() <= mu / (mu + x)) return x;
    return mu * mu / x;
}

long Stream::negative_binomial(double mu, double size) {
    return poisson(gamma(size, mu / size));
}

}  // namespace mitopt::rng
