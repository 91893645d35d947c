#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "kolmo/spectral.hpp"

namespace kolmo {

/// Convex scalar profile with growth metadata. The growth exponents are
/// declarations checked by sampling on [-test_range, test_range], not
/// symbolic facts.
struct ScalarPotential {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> deriv;
    std::optional<std::function<double(double)>> deriv2;
    std::optional<std::function<double(double)>> deriv3;
    double growth_value_exp = 2.0;   // p1 >= 2
    double growth_deriv_exp = 1.0;   // p2 >= 1
    double growth_const = 1.0;       // C in |phi| <= C(1+|t|^p1)
    double lower_bound = 0.0;        // inf phi
    double test_range = 8.0;
    bool is_zero = false;
    // Kinked profiles (deriv defined a.e., monotone) set smooth = false:
    // they are admitted only through the envelope/prox path, never through
    // a direct gradient call.
    bool smooth = true;

    bool differentiable() const { return smooth && static_cast<bool>(deriv); }
};

/// Parse "zero", "quadratic(c)", "quartic", "double_well(a,b)", "exp_cosh(c)".
/// Runs the sampled convexity/growth validation and rejects nonconvex
/// profiles (for instance double_well with a > 0).
ScalarPotential make_potential(const std::string& descriptor);

/// Sampled validation used by make_potential; throws std::domain_error on a
/// detected convexity or growth violation.
void validate_potential(const ScalarPotential& phi);

struct ProxParams {
    double alpha = 1.0;
    double tolerance = 1e-12;
    int max_iterations = 200;
};

/// Unique solution y of y + alpha*phi'(y) = t (safeguarded Newton inside a
/// sign-changing bracket, bisection fallback). The residual satisfies
/// |y + alpha*phi'(y) - t| <= tolerance*(1+|t|).
double scalar_prox(double t, const ProxParams& p, const ScalarPotential& phi);

/// Scalar Moreau envelope phi_alpha(t) = phi(prox(t)) + (t - prox(t))^2/(2 alpha).
double scalar_moreau(double t, const ProxParams& p, const ScalarPotential& phi);

/// U(x) = integral of phi over the grid realization of x, with the basis
/// fixing the geometry.
struct CompositePotential {
    ScalarPotential profile;
    BasisSpec geometry;
};

/// Workspace that amortizes the spectral transforms behind U and DU.
/// Not thread-safe; give each worker its own instance.
class PotentialEval {
  public:
    PotentialEval(const CompositePotential& pot);

    const SpectralBasis& basis() const { return basis_; }
    const ScalarPotential& profile() const { return profile_; }

    /// Midpoint quadrature of phi over the realization; >= inf phi.
    double u_value(const Vec& state);

    /// Moreau envelope U_alpha(x) via the nodewise scalar envelope.
    /// ReactionDiffusion geometry only.
    double u_moreau(const Vec& state, double alpha);

    /// DU(x) = analyze(phi' o synthesize(x)); ReactionDiffusion only.
    Vec du(const Vec& state);

    /// DU_alpha(x) = analyze(phi'(prox_alpha(.))) nodewise; ReactionDiffusion only.
    Vec du_alpha(const Vec& state, double alpha);

    /// Cahn-Hilliard gradient: H-coefficient k of B(phi' o x), equal to
    /// (k pi) <phi' o x, e_k>_{L2}.
    Vec du_cahn_hilliard(const Vec& state);

    /// Same value through the Q^{-1/2} route of the identity
    /// Q^{1/2} DU = (phi' o x - mean)/sqrt(2); agreement with
    /// du_cahn_hilliard is a shipped consistency check.
    Vec du_cahn_hilliard_qroute(const Vec& state);

    /// Geometry-dispatching drift gradient used by the SDE engine.
    /// alpha > 0 selects the Moreau gradient (ReactionDiffusion only).
    void drift_gradient(const Vec& state, double alpha, Vec& out);

    /// (||DU_alpha - DU||^2, ||DU||^2 - ||DU_alpha||^2); the first component
    /// never exceeds the second beyond roundoff.
    std::pair<double, double> my_gap(const Vec& state, double alpha);

    ProxParams prox_params;

  private:
    void require_rd(const char* op) const;
    const Vec& realize(const Vec& state);

    ScalarPotential profile_;
    SpectralBasis basis_;
    Vec grid_buf_;
    Vec work_buf_;
};

/// One-shot helpers matching the operation contracts (they build a
/// PotentialEval internally; use the class directly in hot loops).
double u_eval(const Vec& state, const CompositePotential& pot);
double u_moreau(const Vec& state, double alpha, const CompositePotential& pot);
Vec du(const Vec& state, const CompositePotential& pot);
Vec du_alpha(const Vec& state, double alpha, const CompositePotential& pot);
Vec du_cahn_hilliard(const Vec& state, const CompositePotential& pot);
std::pair<double, double> my_gap(const Vec& state, double alpha, const CompositePotential& pot);

}  // namespace kolmo
