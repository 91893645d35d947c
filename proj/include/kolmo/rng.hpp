#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace kolmo {

/// Identifies one reproducible random stream. Distinct stream ids give
/// statistically independent sequences; the same (seed, stream) pair replays
/// the same draws bitwise on every platform.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// Inverse of the standard normal CDF (Wichura's AS 241, double precision).
/// This is the frozen uniform-to-normal transform used everywhere in the
/// library; p must lie in (0,1).
double inverse_normal_cdf(double p);

/// SplitMix64 sequence keyed by (seed, stream). Each stream is derived by
/// hashing the pair, so parallel workers can own disjoint streams without
/// any jump-ahead bookkeeping.
class Rng {
  public:
    explicit Rng(RngSpec spec);

    std::uint64_t raw();

    /// Uniform draw strictly inside (0,1).
    double uniform();

    /// Standard normal via the frozen inverse-CDF transform.
    double normal();

    void fill_normal(std::span<double> out);

  private:
    std::uint64_t state_;
};

/// Sum in a fixed pairwise order, independent of chunking or scheduling.
double pairwise_sum(std::span<const double> values);

double pairwise_mean(std::span<const double> values);

}  // namespace kolmo
