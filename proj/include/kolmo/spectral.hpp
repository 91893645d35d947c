#pragma once

#include <Eigen/Dense>

namespace kolmo {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// The two geometries shipped with the library.
///
/// ReactionDiffusion: H = L2(0,1), A the Dirichlet second derivative,
///   basis e_k(s) = sqrt(2) sin(k pi s), Q-eigenvalues 1/(2 k^2 pi^2).
/// CahnHilliard: H the dual of the mean-zero H1 space, basis
///   f_k = k pi e_k with e_k(s) = sqrt(2) cos(k pi s), Q-eigenvalues
///   1/(2 pi^4 k^4). Coefficients are always taken against the
///   H-orthonormal family (f_k in the Cahn-Hilliard case).
enum class Geometry { ReactionDiffusion, CahnHilliard };

struct BasisSpec {
    Geometry kind = Geometry::ReactionDiffusion;
    int modes = 1;        // truncation N
    int grid_points = 8;  // uniform midpoint grid resolution M
};

/// Validated constructor. Requires N >= 1 and M >= 2N (exact quadrature of
/// all retained-mode products); grid_points <= 0 selects the default M = 8N.
BasisSpec make_basis(Geometry kind, int modes, int grid_points = 0);

/// lambda_k of the geometry, 1-based k with 1 <= k <= modes.
double eigenvalue(const BasisSpec& spec, int k);

/// Midpoint node s_j = (j + 1/2)/M.
double grid_node(const BasisSpec& spec, int j);

/// Pointwise value of the H-basis realization at s: sqrt(2) sin(k pi s) for
/// ReactionDiffusion, k pi sqrt(2) cos(k pi s) for CahnHilliard.
double basis_value(const BasisSpec& spec, int k, double s);

/// Closed-form covariance kernel of Q = -A^{-1}/2 for the ReactionDiffusion
/// geometry: K(s,t) = min(s,t)(1 - max(s,t))/2. CahnHilliard is rejected.
double covariance_kernel(double s, double t, Geometry kind);

/// Cached synthesis/analysis machinery for one basis spec. Pure and
/// immutable after construction; safe to share across threads.
class SpectralBasis {
  public:
    explicit SpectralBasis(BasisSpec spec);

    const BasisSpec& spec() const { return spec_; }
    int modes() const { return spec_.modes; }
    int grid_points() const { return spec_.grid_points; }
    double eigenvalue(int k) const;
    const Vec& eigenvalues() const { return eigs_; }
    const Vec& nodes() const { return nodes_; }

    /// Grid realization of a coefficient vector (length M).
    Vec synthesize(const Vec& coeffs) const;

    /// First N coefficients of a grid function by midpoint quadrature.
    /// Cahn-Hilliard grid functions must have zero mean
    /// (|mean| <= 1e-12 * max|values|).
    Vec analyze(const Vec& grid) const;

    /// Coefficientwise lambda_k^theta, theta in {-1, -1/2, 1/2, 1}.
    Vec apply_q_power(const Vec& coeffs, double theta) const;

    /// sum lambda_k^theta c_k^2 (the squared Sobolev seminorm weights).
    double weighted_norm_sq(const Vec& coeffs, double theta) const;

    /// Squared H-norm of the state: sum c_k^2.
    static double norm_sq(const Vec& coeffs) { return coeffs.squaredNorm(); }

    /// L2(0,1) inner product of two grid functions under midpoint quadrature.
    double quad_inner(const Vec& a, const Vec& b) const;

    /// M x N matrix whose columns are the realized basis functions on the grid.
    const Mat& synthesis_matrix() const { return synth_; }

  private:
    BasisSpec spec_;
    Vec eigs_;
    Vec nodes_;
    Mat synth_;
    Vec analyze_scale_;  // per-mode factor applied to B^T g / M
};

}  // namespace kolmo
