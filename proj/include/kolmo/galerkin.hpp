#pragma once

#include <Eigen/Sparse>
#include <array>
#include <optional>

#include "kolmo/potential.hpp"
#include "kolmo/rng.hpp"
#include "kolmo/spectral.hpp"

namespace kolmo {

using SpMat = Eigen::SparseMatrix<double>;

/// Tensor grid for the n-dimensional truncated weak problem, n <= 3. Node
/// coordinates along axis k live on (-L, L) in units of sqrt(lambda_k),
/// cell-centered, symmetric about the origin.
struct GridSpec {
    int dim = 1;
    int nodes = 64;          // per axis
    double half_width = 6.0; // in per-axis standard deviations
};

enum class DriftScheme { Centered, Upwind };

class WeightedGrid {
  public:
    WeightedGrid(Geometry kind, const ScalarPotential& profile, GridSpec spec);

    const GridSpec& spec() const { return spec_; }
    int dim() const { return spec_.dim; }
    int total() const { return total_; }
    double h(int axis) const { return h_[axis]; }
    double sigma(int axis) const { return sigma_[axis]; }
    Geometry kind() const { return kind_; }
    const ScalarPotential& profile() const { return profile_; }

    double coord(int node, int axis) const { return coords_(node, axis); }
    int neighbor(int node, int axis, int dir) const;  // dir = +-1, -1 if outside

    /// Node weights of the discrete nu, normalized to sum 1.
    const Vec& weights() const { return w_; }
    double nu_integral(const Vec& nodal) const { return w_.dot(nodal); }
    double nu_inner(const Vec& a, const Vec& b) const { return (a.array() * b.array()).matrix().dot(w_); }

    const Vec& potential_values() const { return u_pot_; }
    const Mat& potential_gradient() const { return du_pot_; }
    bool has_hessian() const { return profile_.deriv2.has_value(); }
    /// D^2 U_n at one node (dim x dim); requires an analytic phi''.
    Mat potential_hessian(int node) const;

    /// Centered first difference of nodal values along an axis (one-sided at
    /// the box boundary).
    Vec gradient_axis(const Vec& nodal, int axis) const;

    /// Evaluate a nodal field of per-axis drift coefficients applied to the
    /// discrete gradient: sum_a B(.,a) D_a u, centered or upwind.
    Vec convect(const Mat& field, const Vec& nodal, DriftScheme scheme) const;

    /// Sparse convection operator matching convect(field, ., scheme).
    SpMat convection_matrix(const Mat& field, DriftScheme scheme) const;

    const SpectralBasis& eval_basis() const { return basis_; }

  private:
    GridSpec spec_;
    Geometry kind_;
    ScalarPotential profile_;
    SpectralBasis basis_;  // truncation dimension = spec_.dim
    int total_ = 0;
    std::array<double, 3> h_{};
    std::array<double, 3> sigma_{};
    std::array<int, 3> stride_{};
    Mat coords_;
    Vec w_;
    Vec u_pot_;
    Mat du_pot_;
};

/// a(u,v) = lambda <u,v>_w + (1/2) sum_edges w_e (Du)(Dv)/h^2 with geometric
/// mean edge weights; symmetric positive definite for lambda > 0.
SpMat assemble(const WeightedGrid& grid, double lambda);

/// Stiffness part alone: form(u,u) = u^T G_full u with
/// G_full = 2 * (the (1/2)-scaled block inside assemble).
SpMat stiffness(const WeightedGrid& grid);

struct EllipticSolution {
    Vec u;
    Mat du;          // total x dim, centered differences
    double lambda = 0.0;
    Vec f;
    double residual = 0.0;  // relative algebraic residual
};

/// Solve the discrete weak problem lambda u - K u = f (direct factorization
/// up to 1e5 unknowns, conjugate gradients beyond).
EllipticSolution solve(const WeightedGrid& grid, double lambda, const Vec& f);

/// Centered-difference realization of K u = (1/2) Lap u
/// - (1/2) sum_k xi_k/lambda_k D_k u - <DU_n, grad u>; one-sided at the
/// boundary ring.
Vec apply_K(const WeightedGrid& grid, const Vec& u);

struct PerturbedSolution {
    EllipticSolution sol;
    double contraction_factor = 0.0;  // last observed ratio
    int iterations = 0;
};

/// Fixed-point solve of lambda u - K u - <B, Du> = f via
/// v <- f + <B, D(solve(v))>. Throws (reporting the observed factor) when the
/// iteration fails to contract, i.e. lambda below the empirical threshold.
PerturbedSolution perturbed_solve(const WeightedGrid& grid, double lambda, const Vec& f,
                                  const Mat& field, DriftScheme scheme = DriftScheme::Centered);

struct PositivityReport {
    int trials = 0;
    int violations = 0;
    double worst_min = 0.0;
    double tolerance = 0.0;
};

/// Applies the perturbed resolvent to random nonnegative f and reports
/// violations of u >= -1e-10 ||f||_inf.
PositivityReport positivity_check(const WeightedGrid& grid, double lambda, const Mat& field,
                                  DriftScheme scheme, int trials, RngSpec rng);

struct InvariantDensity {
    Vec rho;
    double eigenvalue = 0.0;
    double min_rho = 0.0;
    double max_invariance_residual = 0.0;
    int iterations = 0;
    double contraction_factor = 0.0;
};

/// Power iteration on the nu-weighted adjoint of lambda R(lambda, K1);
/// normalized so the discrete nu-mass of rho is 1. Requires the dominant
/// eigenvalue to sit within 1e-6 of 1 and min rho >= -1e-8.
InvariantDensity invariant_density(const WeightedGrid& grid, double lambda, const Mat& field,
                                   DriftScheme scheme = DriftScheme::Upwind,
                                   int smooth_checks = 20, RngSpec check_rng = {421, 0});

/// Named node vector fields for configs and tests: "zero", "const(b1..)",
/// "tanh(s)" with B_a = s*tanh(coord_a/sigma_a) bounded, and
/// "neg_grad_tanh(v0)" = -grad of V = v0*tanh(coord_1/sigma_1).
Mat make_vector_field(const WeightedGrid& grid, const std::string& descriptor);

/// Nodal values of V for the Gibbs-oracle field "neg_grad_tanh(v0)".
Vec tanh_well_values(const WeightedGrid& grid, double v0);

/// Smooth random nodal test function (band-limited in the scaled
/// coordinates), used by the invariance checks.
Vec random_smooth_nodal(const WeightedGrid& grid, Rng& rng);

}  // namespace kolmo
