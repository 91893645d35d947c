#include "kolmo/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kolmo {

namespace {
constexpr double kPi = std::numbers::pi;
}

BasisSpec make_basis(Geometry kind, int modes, int grid_points) {
    if (modes < 1) throw std::invalid_argument("basis: modes must be >= 1");
    if (grid_points <= 0) grid_points = 8 * modes;
    if (grid_points < 2 * modes)
        throw std::invalid_argument("basis: grid_points must be >= 2*modes, got " +
                                    std::to_string(grid_points));
    return BasisSpec{kind, modes, grid_points};
}

double eigenvalue(const BasisSpec& spec, int k) {
    if (k < 1 || k > spec.modes)
        throw std::out_of_range("eigenvalue: mode index " + std::to_string(k) +
                                " outside [1," + std::to_string(spec.modes) + "]");
    const double kk = static_cast<double>(k);
    switch (spec.kind) {
        case Geometry::ReactionDiffusion:
            return 1.0 / (2.0 * kk * kk * kPi * kPi);
        case Geometry::CahnHilliard:
            return 1.0 / (2.0 * kPi * kPi * kPi * kPi * kk * kk * kk * kk);
    }
    throw std::logic_error("eigenvalue: unknown geometry");
}

double grid_node(const BasisSpec& spec, int j) {
    return (static_cast<double>(j) + 0.5) / static_cast<double>(spec.grid_points);
}

double basis_value(const BasisSpec& spec, int k, double s) {
    const double kk = static_cast<double>(k);
    if (spec.kind == Geometry::ReactionDiffusion) return std::sqrt(2.0) * std::sin(kk * kPi * s);
    return kk * kPi * std::sqrt(2.0) * std::cos(kk * kPi * s);
}

double covariance_kernel(double s, double t, Geometry kind) {
    if (kind != Geometry::ReactionDiffusion)
        throw std::invalid_argument("covariance_kernel: no closed form for this geometry");
    if (!(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0))
        throw std::domain_error("covariance_kernel: arguments must lie in (0,1)");
    return 0.5 * std::min(s, t) * (1.0 - std::max(s, t));
}

SpectralBasis::SpectralBasis(BasisSpec spec) : spec_(spec) {
    const int n = spec_.modes;
    const int m = spec_.grid_points;
    if (m < 2 * n) throw std::invalid_argument("basis: grid_points must be >= 2*modes");

    eigs_.resize(n);
    for (int k = 1; k <= n; ++k) eigs_[k - 1] = kolmo::eigenvalue(spec_, k);
    for (int k = 1; k < n; ++k)
        if (!(eigs_[k] < eigs_[k - 1])) throw std::logic_error("basis: eigenvalues not decreasing");

    nodes_.resize(m);
    for (int j = 0; j < m; ++j) nodes_[j] = grid_node(spec_, j);

    synth_.resize(m, n);
    for (int k = 1; k <= n; ++k)
        for (int j = 0; j < m; ++j) synth_(j, k - 1) = basis_value(spec_, k, nodes_[j]);

    analyze_scale_.resize(n);
    for (int k = 1; k <= n; ++k) {
        // Cahn-Hilliard columns carry the k*pi factor of f_k; projecting an
        // L2 realization back to H coefficients divides by (k*pi)^2.
        analyze_scale_[k - 1] =
            (spec_.kind == Geometry::CahnHilliard) ? 1.0 / (kPi * kPi * k * k) : 1.0;
    }
}

double SpectralBasis::eigenvalue(int k) const { return kolmo::eigenvalue(spec_, k); }

Vec SpectralBasis::synthesize(const Vec& coeffs) const {
    if (coeffs.size() != spec_.modes)
        throw std::invalid_argument("synthesize: coefficient count mismatch");
    return synth_ * coeffs;
}

Vec SpectralBasis::analyze(const Vec& grid) const {
    if (grid.size() != spec_.grid_points)
        throw std::invalid_argument("analyze: grid size mismatch");
    if (spec_.kind == Geometry::CahnHilliard) {
        const double mean = grid.mean();
        const double scale = grid.cwiseAbs().maxCoeff();
        if (std::abs(mean) > 1e-12 * std::max(scale, 1e-300) && scale > 0.0)
            throw std::invalid_argument("analyze: Cahn-Hilliard grid function must have zero mean");
    }
    Vec c = (synth_.transpose() * grid) / static_cast<double>(spec_.grid_points);
    return analyze_scale_.cwiseProduct(c);
}

Vec SpectralBasis::apply_q_power(const Vec& coeffs, double theta) const {
    if (coeffs.size() != spec_.modes)
        throw std::invalid_argument("apply_q_power: coefficient count mismatch");
    if (theta != 1.0 && theta != 0.5 && theta != -0.5 && theta != -1.0)
        throw std::invalid_argument("apply_q_power: theta must be one of {-1,-1/2,1/2,1}");
    Vec out(coeffs.size());
    for (int k = 0; k < coeffs.size(); ++k) out[k] = std::pow(eigs_[k], theta) * coeffs[k];
    return out;
}

double SpectralBasis::weighted_norm_sq(const Vec& coeffs, double theta) const {
    if (coeffs.size() != spec_.modes)
        throw std::invalid_argument("weighted_norm_sq: coefficient count mismatch");
    double acc = 0.0;
    for (int k = 0; k < coeffs.size(); ++k)
        acc += std::pow(eigs_[k], theta) * coeffs[k] * coeffs[k];
    return acc;
}

double SpectralBasis::quad_inner(const Vec& a, const Vec& b) const {
    if (a.size() != spec_.grid_points || b.size() != spec_.grid_points)
        throw std::invalid_argument("quad_inner: grid size mismatch");
    return a.dot(b) / static_cast<double>(spec_.grid_points);
}

}  // namespace kolmo
