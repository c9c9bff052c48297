#pragma once

#include <cstdint>
#include <random>

namespace mitopt::rng {

// Streams are indexed by (seed, replicate, point). Each index triple is
// mixed through splitmix64 into a private mt19937_64 state, so draws are
// reproducible across platforms and thread counts: the engine is fully
// specified by the standard and every sampler below is written out
// explicitly instead of relying on implementation defined distributions.

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replicate, std::uint64_t point);

class Stream {
  public:
    Stream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t point)
        : eng_(stream_seed(seed, replicate, point)) {}

    // uniform on (0, 1), both ends excluded
    double uniform();

    // standard normal, Box-Muller
    double normal();

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // shape k > 0, scale s > 0; Marsaglia-Tsang with the u^(1/k) boost
    // for k < 1
    double gamma(double shape, double scale);

    // sequential inversion; large means are split recursively so the
    // underflow guard never triggers
    long poisson(double mu);

    long binomial(int n, double p);

    // mean mu > 0, shape lambda > 0 (variance mu^3 / lambda)
    double inverse_gaussian(double mu, double lambda);

    // mean mu, size r: gamma-Poisson mixture (variance mu + mu^2/r)
    long negative_binomial(double mu, double size);

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace mitopt::rng
