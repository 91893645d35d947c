#include "kolmo/galerkin.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace kolmo {

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<double> field_args(const std::string& descriptor, std::string& head) {
    const auto open = descriptor.find('(');
    if (open == std::string::npos) {
        head = descriptor;
        return {};
    }
    head = descriptor.substr(0, open);
    std::vector<double> args;
    std::stringstream ss(descriptor.substr(open + 1, descriptor.size() - open - 2));
    std::string tok;
    while (std::getline(ss, tok, ',')) args.push_back(std::stod(tok));
    return args;
}
}  // namespace

WeightedGrid::WeightedGrid(Geometry kind, const ScalarPotential& profile, GridSpec spec)
    : spec_(spec),
      kind_(kind),
      profile_(profile),
      basis_(make_basis(kind, spec.dim, std::max(64, 8 * spec.dim))) {
    if (spec_.dim < 1 || spec_.dim > 3)
        throw std::invalid_argument("grid: dimension must be 1, 2 or 3");
    if (spec_.nodes < 4) throw std::invalid_argument("grid: need at least 4 nodes per axis");
    if (spec_.half_width <= 0.0) throw std::invalid_argument("grid: half_width must be positive");

    total_ = 1;
    for (int a = 0; a < spec_.dim; ++a) total_ *= spec_.nodes;
    stride_ = {1, spec_.nodes, spec_.nodes * spec_.nodes};
    for (int a = 0; a < spec_.dim; ++a) {
        sigma_[a] = std::sqrt(basis_.eigenvalue(a + 1));
        h_[a] = 2.0 * spec_.half_width * sigma_[a] / spec_.nodes;
    }

    coords_.resize(total_, spec_.dim);
    w_.resize(total_);
    u_pot_.resize(total_);
    du_pot_.resize(total_, spec_.dim);

    PotentialEval eval({profile_, basis_.spec()});
    Vec state(spec_.dim);
    for (int i = 0; i < total_; ++i) {
        int rem = i;
        double gauss_exp = 0.0;
        for (int a = 0; a < spec_.dim; ++a) {
            const int ia = rem % spec_.nodes;
            rem /= spec_.nodes;
            const double t = -spec_.half_width + (ia + 0.5) * 2.0 * spec_.half_width / spec_.nodes;
            coords_(i, a) = t * sigma_[a];
            gauss_exp += 0.5 * t * t;
            state[a] = coords_(i, a);
        }
        u_pot_[i] = profile_.is_zero ? 0.0 : eval.u_value(state);
        if (profile_.is_zero) {
            du_pot_.row(i).setZero();
        } else {
            Vec g = (kind_ == Geometry::CahnHilliard) ? eval.du_cahn_hilliard(state)
                                                      : eval.du(state);
            du_pot_.row(i) = g.transpose();
        }
        w_[i] = std::exp(-gauss_exp - 2.0 * (u_pot_[i] - profile_.lower_bound));
    }
    w_ /= w_.sum();
}

int WeightedGrid::neighbor(int node, int axis, int dir) const {
    const int ia = (node / stride_[axis]) % spec_.nodes;
    const int ja = ia + dir;
    if (ja < 0 || ja >= spec_.nodes) return -1;
    return node + dir * stride_[axis];
}

Mat WeightedGrid::potential_hessian(int node) const {
    if (!has_hessian())
        throw std::invalid_argument("grid: potential has no analytic second derivative");
    const auto& phi2 = *profile_.deriv2;
    const SpectralBasis& b = basis_;
    const int m = b.grid_points();
    Vec state = coords_.row(node).transpose();
    const Vec grid_x = b.synthesize(state);
    Mat hess(spec_.dim, spec_.dim);
    // Coefficient Hessian D_{hk} U_n = <phi''(x) b_h, b_k>_{L2 quadrature},
    // where b_k is the realized basis column (f_k carries its k*pi factor).
    for (int hh = 0; hh < spec_.dim; ++hh) {
        for (int kk = hh; kk < spec_.dim; ++kk) {
            double acc = 0.0;
            for (int j = 0; j < m; ++j)
                acc += phi2(grid_x[j]) * b.synthesis_matrix()(j, hh) * b.synthesis_matrix()(j, kk);
            acc /= static_cast<double>(m);
            hess(hh, kk) = acc;
            hess(kk, hh) = acc;
        }
    }
    return hess;
}

Vec WeightedGrid::gradient_axis(const Vec& nodal, int axis) const {
    Vec out(total_);
    const double inv2h = 1.0 / (2.0 * h_[axis]);
    const double invh = 1.0 / h_[axis];
    for (int i = 0; i < total_; ++i) {
        const int up = neighbor(i, axis, +1);
        const int dn = neighbor(i, axis, -1);
        if (up >= 0 && dn >= 0)
            out[i] = (nodal[up] - nodal[dn]) * inv2h;
        else if (up >= 0)
            out[i] = (nodal[up] - nodal[i]) * invh;
        else
            out[i] = (nodal[i] - nodal[dn]) * invh;
    }
    return out;
}

Vec WeightedGrid::convect(const Mat& field, const Vec& nodal, DriftScheme scheme) const {
    Vec out = Vec::Zero(total_);
    for (int a = 0; a < spec_.dim; ++a) {
        const double invh = 1.0 / h_[a];
        const double inv2h = 0.5 * invh;
        for (int i = 0; i < total_; ++i) {
            const int up = neighbor(i, a, +1);
            const int dn = neighbor(i, a, -1);
            const double b = field(i, a);
            double d;
            if (scheme == DriftScheme::Centered) {
                if (up >= 0 && dn >= 0)
                    d = (nodal[up] - nodal[dn]) * inv2h;
                else if (up >= 0)
                    d = (nodal[up] - nodal[i]) * invh;
                else
                    d = (nodal[i] - nodal[dn]) * invh;
            } else {
                // Upwind: difference against the node the flow comes from.
                if (b >= 0.0)
                    d = (up >= 0) ? (nodal[up] - nodal[i]) * invh
                                  : (nodal[i] - nodal[dn]) * invh;
                else
                    d = (dn >= 0) ? (nodal[i] - nodal[dn]) * invh
                                  : (nodal[up] - nodal[i]) * invh;
            }
            out[i] += b * d;
        }
    }
    return out;
}

SpMat WeightedGrid::convection_matrix(const Mat& field, DriftScheme scheme) const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(total_) * (2 * spec_.dim + 1));
    for (int a = 0; a < spec_.dim; ++a) {
        const double invh = 1.0 / h_[a];
        const double inv2h = 0.5 * invh;
        for (int i = 0; i < total_; ++i) {
            const int up = neighbor(i, a, +1);
            const int dn = neighbor(i, a, -1);
            const double b = field(i, a);
            if (scheme == DriftScheme::Centered) {
                if (up >= 0 && dn >= 0) {
                    trip.emplace_back(i, up, b * inv2h);
                    trip.emplace_back(i, dn, -b * inv2h);
                } else if (up >= 0) {
                    trip.emplace_back(i, up, b * invh);
                    trip.emplace_back(i, i, -b * invh);
                } else {
                    trip.emplace_back(i, i, b * invh);
                    trip.emplace_back(i, dn, -b * invh);
                }
            } else {
                if (b >= 0.0) {
                    if (up >= 0) {
                        trip.emplace_back(i, up, b * invh);
                        trip.emplace_back(i, i, -b * invh);
                    } else {
                        trip.emplace_back(i, i, b * invh);
                        trip.emplace_back(i, dn, -b * invh);
                    }
                } else {
                    if (dn >= 0) {
                        trip.emplace_back(i, i, b * invh);
                        trip.emplace_back(i, dn, -b * invh);
                    } else {
                        trip.emplace_back(i, up, b * invh);
                        trip.emplace_back(i, i, -b * invh);
                    }
                }
            }
        }
    }
    SpMat c(total_, total_);
    c.setFromTriplets(trip.begin(), trip.end());
    return c;
}

SpMat stiffness(const WeightedGrid& grid) {
    const int total = grid.total();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(total) * (2 * grid.dim() + 1));
    const Vec& w = grid.weights();
    for (int a = 0; a < grid.dim(); ++a) {
        const double invh2 = 1.0 / (grid.h(a) * grid.h(a));
        for (int i = 0; i < total; ++i) {
            const int j = grid.neighbor(i, a, +1);
            if (j < 0) continue;
            const double we = std::sqrt(w[i] * w[j]) * invh2;
            trip.emplace_back(i, i, we);
            trip.emplace_back(j, j, we);
            trip.emplace_back(i, j, -we);
            trip.emplace_back(j, i, -we);
        }
    }
    SpMat g(total, total);
    g.setFromTriplets(trip.begin(), trip.end());
    return g;
}

SpMat assemble(const WeightedGrid& grid, double lambda) {
    if (lambda <= 0.0) throw std::invalid_argument("assemble: lambda must be positive");
    SpMat a = stiffness(grid) * 0.5;
    const Vec& w = grid.weights();
    for (int i = 0; i < grid.total(); ++i) a.coeffRef(i, i) += lambda * w[i];
    return a;
}

EllipticSolution solve(const WeightedGrid& grid, double lambda, const Vec& f) {
    if (f.size() != grid.total()) throw std::invalid_argument("solve: f size mismatch");
    const SpMat a = assemble(grid, lambda);
    const Vec rhs = grid.weights().cwiseProduct(f);

    EllipticSolution out;
    out.lambda = lambda;
    out.f = f;
    if (grid.total() <= 100000) {
        Eigen::SimplicialLDLT<SpMat> chol(a);
        if (chol.info() != Eigen::Success)
            throw std::runtime_error("solve: factorization failed (lambda <= 0?)");
        out.u = chol.solve(rhs);
    } else {
        Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper> cg(a);
        cg.setTolerance(1e-12);
        out.u = cg.solve(rhs);
        if (cg.info() != Eigen::Success) throw std::runtime_error("solve: CG did not converge");
    }
    // Backward-error scaling: the raw residual norm is compared against
    // ||A||_inf ||u|| + ||b||, not ||b|| alone, so stiff fine grids are not
    // penalized for their 1/h^2 row scale.
    double a_inf = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        double row = 0.0;
        for (SpMat::InnerIterator itr(a, k); itr; ++itr) row += std::abs(itr.value());
        a_inf = std::max(a_inf, row);
    }
    const double scale = a_inf * out.u.cwiseAbs().maxCoeff() + rhs.norm();
    out.residual = (a * out.u - rhs).norm() / std::max(scale, 1e-300);
    if (out.residual > 1e-10)
        throw std::runtime_error("solve: residual " + std::to_string(out.residual) +
                                 " above tolerance");
    out.du.resize(grid.total(), grid.dim());
    for (int axis = 0; axis < grid.dim(); ++axis) out.du.col(axis) = grid.gradient_axis(out.u, axis);
    return out;
}

Vec apply_K(const WeightedGrid& grid, const Vec& u) {
    if (u.size() != grid.total()) throw std::invalid_argument("apply_K: size mismatch");
    Vec out = Vec::Zero(grid.total());
    const Mat& du_pot = grid.potential_gradient();
    for (int a = 0; a < grid.dim(); ++a) {
        const double h = grid.h(a);
        const double lambda_a = grid.sigma(a) * grid.sigma(a);
        for (int i = 0; i < grid.total(); ++i) {
            const int up = grid.neighbor(i, a, +1);
            const int dn = grid.neighbor(i, a, -1);
            double second, first;
            if (up >= 0 && dn >= 0) {
                second = (u[up] - 2.0 * u[i] + u[dn]) / (h * h);
                first = (u[up] - u[dn]) / (2.0 * h);
            } else if (up >= 0) {
                const int up2 = grid.neighbor(up, a, +1);
                second = (up2 >= 0) ? (u[up2] - 2.0 * u[up] + u[i]) / (h * h) : 0.0;
                first = (u[up] - u[i]) / h;
            } else {
                const int dn2 = grid.neighbor(dn, a, -1);
                second = (dn2 >= 0) ? (u[i] - 2.0 * u[dn] + u[dn2]) / (h * h) : 0.0;
                first = (u[i] - u[dn]) / h;
            }
            out[i] += 0.5 * second - (0.5 * grid.coord(i, a) / lambda_a) * first -
                      du_pot(i, a) * first;
        }
    }
    return out;
}

PerturbedSolution perturbed_solve(const WeightedGrid& grid, double lambda, const Vec& f,
                                  const Mat& field, DriftScheme scheme) {
    if (f.size() != grid.total()) throw std::invalid_argument("perturbed_solve: f size mismatch");
    if (field.rows() != grid.total() || field.cols() != grid.dim())
        throw std::invalid_argument("perturbed_solve: field shape mismatch");

    const SpMat a = assemble(grid, lambda);
    Eigen::SimplicialLDLT<SpMat> chol(a);
    if (chol.info() != Eigen::Success) throw std::runtime_error("perturbed_solve: factorization failed");

    const Vec& w = grid.weights();
    const auto wnorm = [&](const Vec& v) { return std::sqrt(grid.nu_inner(v, v)); };
    const double f_scale = std::max(wnorm(f), 1e-300);

    Vec v = f;
    Vec u;
    double prev_delta = -1.0;
    double log_factor_acc = 0.0;
    int factor_count = 0;
    int diverging = 0;
    PerturbedSolution out;
    for (int it = 1; it <= 500; ++it) {
        u = chol.solve(w.cwiseProduct(v));
        Vec v_next = f + grid.convect(field, u, scheme);
        const double delta = wnorm(v_next - v);
        out.iterations = it;
        if (prev_delta > 0.0) {
            const double factor = delta / prev_delta;
            // Geometric mean over ratios measured above the roundoff floor.
            if (prev_delta > 1e-7 * f_scale && factor > 0.0) {
                log_factor_acc += std::log(factor);
                out.contraction_factor = std::exp(log_factor_acc / ++factor_count);
            } else if (factor_count == 0) {
                out.contraction_factor = factor;
            }
            diverging = (factor >= 1.0) ? diverging + 1 : 0;
            if (diverging >= 5)
                throw std::runtime_error(
                    "perturbed_solve: iteration diverges (observed factor " +
                    std::to_string(factor) + "); lambda is at or below the contraction threshold");
        }
        v = v_next;
        if (delta <= 1e-10 * f_scale) break;
        prev_delta = std::max(delta, 1e-300);
        if (it == 500)
            throw std::runtime_error("perturbed_solve: no convergence in 500 iterations");
    }

    out.sol.u = chol.solve(w.cwiseProduct(v));
    out.sol.lambda = lambda;
    out.sol.f = f;
    const SpMat c = grid.convection_matrix(field, scheme);
    SpMat a1 = a;
    {
        SpMat wc = c;
        for (int k = 0; k < wc.outerSize(); ++k)
            for (SpMat::InnerIterator itr(wc, k); itr; ++itr)
                itr.valueRef() *= w[itr.row()];
        a1 = a - wc;
    }
    out.sol.residual =
        (a1 * out.sol.u - w.cwiseProduct(f)).norm() / std::max(w.cwiseProduct(f).norm(), 1e-300);
    out.sol.du.resize(grid.total(), grid.dim());
    for (int axis = 0; axis < grid.dim(); ++axis)
        out.sol.du.col(axis) = grid.gradient_axis(out.sol.u, axis);
    return out;
}

PositivityReport positivity_check(const WeightedGrid& grid, double lambda, const Mat& field,
                                  DriftScheme scheme, int trials, RngSpec rng_spec) {
    PositivityReport rep;
    rep.trials = trials;
    Rng rng(rng_spec);
    rep.worst_min = 0.0;
    for (int t = 0; t < trials; ++t) {
        Vec f = random_smooth_nodal(grid, rng).cwiseAbs();
        const double tol = 1e-10 * f.cwiseAbs().maxCoeff();
        const PerturbedSolution ps = perturbed_solve(grid, lambda, f, field, scheme);
        const double mn = ps.sol.u.minCoeff();
        if (mn < -tol) ++rep.violations;
        rep.worst_min = std::min(rep.worst_min, mn / std::max(f.cwiseAbs().maxCoeff(), 1e-300));
        rep.tolerance = 1e-10;
    }
    return rep;
}

InvariantDensity invariant_density(const WeightedGrid& grid, double lambda, const Mat& field,
                                   DriftScheme scheme, int smooth_checks, RngSpec check_rng) {
    const int total = grid.total();
    const Vec& w = grid.weights();
    const SpMat a = assemble(grid, lambda);
    const SpMat c = grid.convection_matrix(field, scheme);
    SpMat wc = c;
    for (int k = 0; k < wc.outerSize(); ++k)
        for (SpMat::InnerIterator itr(wc, k); itr; ++itr) itr.valueRef() *= w[itr.row()];
    SpMat a1t = SpMat((a - wc).transpose());
    a1t.makeCompressed();

    Eigen::SparseLU<SpMat> lu(a1t);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("invariant_density: adjoint factorization failed");

    InvariantDensity out;
    Vec rho = Vec::Ones(total);
    double mu = 0.0;
    double prev_delta = -1.0;
    for (int it = 1; it <= 20000; ++it) {
        Vec next = lambda * lu.solve(w.cwiseProduct(rho));
        // Rayleigh quotient in the nu inner product.
        mu = grid.nu_inner(next, rho) / grid.nu_inner(rho, rho);
        next /= grid.nu_integral(next);
        const double delta = (next - rho).cwiseAbs().maxCoeff();
        out.iterations = it;
        if (prev_delta > 0.0 && prev_delta > 1e-300) out.contraction_factor = delta / prev_delta;
        rho = next;
        if (delta < 1e-13) break;
        prev_delta = delta;
    }
    out.rho = rho;
    out.eigenvalue = mu;
    out.min_rho = rho.minCoeff();
    if (std::abs(mu - 1.0) > 1e-6)
        throw std::runtime_error("invariant_density: dominant eigenvalue " + std::to_string(mu) +
                                 " not within 1e-6 of 1 (discretization too coarse)");
    if (out.min_rho < -1e-8)
        throw std::runtime_error("invariant_density: negative density " +
                                 std::to_string(out.min_rho));

    // Invariance residual sum w rho K1 phi against random smooth phi.
    const SpMat g = stiffness(grid) * 0.5;
    Rng rng(check_rng);
    double worst = 0.0;
    for (int t = 0; t < smooth_checks; ++t) {
        const Vec phi = random_smooth_nodal(grid, rng);
        const Vec k1phi = -(g * phi).cwiseQuotient(w) + grid.convect(field, phi, scheme);
        const double res = std::abs(grid.nu_inner(rho, k1phi));
        const double scale = std::sqrt(grid.nu_inner(k1phi, k1phi)) *
                                 std::sqrt(grid.nu_inner(rho, rho)) +
                             1.0;
        worst = std::max(worst, res / scale);
    }
    out.max_invariance_residual = worst;
    return out;
}

Mat make_vector_field(const WeightedGrid& grid, const std::string& descriptor) {
    std::string head;
    const auto args = field_args(descriptor, head);
    Mat field = Mat::Zero(grid.total(), grid.dim());
    if (head == "zero") return field;
    if (head == "const") {
        for (int a = 0; a < grid.dim(); ++a) {
            const double b = (a < static_cast<int>(args.size())) ? args[a] : 0.0;
            field.col(a).setConstant(b);
        }
        return field;
    }
    if (head == "tanh") {
        const double s = args.empty() ? 0.1 : args[0];
        for (int i = 0; i < grid.total(); ++i)
            for (int a = 0; a < grid.dim(); ++a)
                field(i, a) = s * std::tanh(grid.coord(i, a) / grid.sigma(a));
        return field;
    }
    if (head == "neg_grad_tanh") {
        const double v0 = args.empty() ? 0.1 : args[0];
        for (int i = 0; i < grid.total(); ++i) {
            const double t = grid.coord(i, 0) / grid.sigma(0);
            const double sech = 1.0 / std::cosh(t);
            field(i, 0) = -v0 * sech * sech / grid.sigma(0);
        }
        return field;
    }
    throw std::invalid_argument("vector field: unknown descriptor '" + descriptor + "'");
}

Vec tanh_well_values(const WeightedGrid& grid, double v0) {
    Vec v(grid.total());
    for (int i = 0; i < grid.total(); ++i)
        v[i] = v0 * std::tanh(grid.coord(i, 0) / grid.sigma(0));
    return v;
}

Vec random_smooth_nodal(const WeightedGrid& grid, Rng& rng) {
    // Low-order trigonometric blend in the scaled coordinates: smooth,
    // bounded, and resolution independent.
    std::array<double, 3> amp{}, freq{}, phase{};
    for (int a = 0; a < grid.dim(); ++a) {
        amp[a] = 0.5 + rng.uniform();
        freq[a] = 0.25 + 0.5 * rng.uniform();
        phase[a] = 2.0 * kPi * rng.uniform();
    }
    const double base = 2.0 * rng.uniform() - 1.0;
    Vec out(grid.total());
    for (int i = 0; i < grid.total(); ++i) {
        double v = base;
        for (int a = 0; a < grid.dim(); ++a) {
            const double t = grid.coord(i, a) / grid.sigma(a);
            v += amp[a] * std::sin(freq[a] * t + phase[a]);
        }
        out[i] = v;
    }
    return out;
}

}  // namespace kolmo
