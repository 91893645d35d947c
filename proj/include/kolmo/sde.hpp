#pragma once

#include <functional>
#include <optional>

#include "kolmo/potential.hpp"
#include "kolmo/rng.hpp"
#include "kolmo/spectral.hpp"

namespace kolmo {

enum class Scheme { ExplicitEM, SemiImplicitLinear };

/// Time-stepping configuration for the truncated gradient SDE
/// dX = (AX - DU(X)) dt + dW. alpha > 0 replaces DU by the Moreau gradient
/// DU_alpha (ReactionDiffusion only); alpha = 0 uses DU directly and
/// requires a C1 profile.
struct SdeConfig {
    double dt = 1e-3;
    double horizon = 1.0;
    Scheme scheme = Scheme::SemiImplicitLinear;
    double alpha = 0.0;
    RngSpec rng;
};

/// Throws on an invalid configuration; the explicit scheme additionally
/// requires dt < 4*lambda_N (linear stability).
void validate_config(const SdeConfig& cfg, const BasisSpec& spec);

/// Integrator with preallocated drift workspace; one instance per worker.
class SdeEngine {
  public:
    SdeEngine(const CompositePotential& pot, SdeConfig cfg);

    const SdeConfig& config() const { return cfg_; }
    const SpectralBasis& basis() const { return eval_.basis(); }

    /// One step from `state` with the given standard normals (length N).
    Vec step(const Vec& state, const Vec& noise);

    /// In-place step used by the hot loops.
    void step_inplace(Vec& state, const Vec& noise);

    /// Iterate ceil(horizon/dt) steps driven by the config's stream.
    /// `observer`, when given, sees (step index, time, state) after every
    /// step, including the initial state at index 0.
    Vec simulate(const Vec& x0,
                 const std::function<void(int, double, const Vec&)>& observer = nullptr);

    /// As simulate, but drawing noise from an external generator (used for
    /// coupled pairs and for nested-refinement studies).
    Vec simulate_with(const Vec& x0, Rng& rng,
                      const std::function<void(int, double, const Vec&)>& observer = nullptr);

    int steps() const { return steps_; }

  private:
    PotentialEval eval_;
    SdeConfig cfg_;
    int steps_;
    Vec drift_;
    Vec inv_factor_;   // 1/(1 + dt/(2 lambda_k)) for the semi-implicit scheme
    Vec decay_rate_;   // 1/(2 lambda_k)
};

/// ||X(T,x) - X(T,y)|| / ||x - y|| under synchronous coupling (same noise
/// stream for both trajectories). x == y is rejected.
double contractivity_ratio(const Vec& x, const Vec& y, const CompositePotential& pot,
                           const SdeConfig& cfg);

}  // namespace kolmo
