#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kolmo/galerkin.hpp"

using namespace kolmo;

namespace {
constexpr double kPi = std::numbers::pi;

WeightedGrid make_grid_1d(const std::string& profile, int nodes, double half_width = 6.0) {
    GridSpec gs;
    gs.dim = 1;
    gs.nodes = nodes;
    gs.half_width = half_width;
    return WeightedGrid(Geometry::ReactionDiffusion, make_potential(profile), gs);
}

Vec coordinate_rhs(const WeightedGrid& grid) {
    Vec f(grid.total());
    for (int i = 0; i < grid.total(); ++i) f[i] = grid.coord(i, 0);
    return f;
}

Vec bump_rhs(const WeightedGrid& grid) {
    Vec f(grid.total());
    for (int i = 0; i < grid.total(); ++i) {
        double s2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double t = grid.coord(i, a) / grid.sigma(a);
            s2 += t * t;
        }
        f[i] = std::exp(-0.5 * s2);
    }
    return f;
}

}  // namespace

TEST_SUITE_BEGIN("galerkin");

TEST_CASE("assembly matches a hand-built weighted laplacian") {
    const WeightedGrid grid = make_grid_1d("zero", 16);
    const double lambda = 1.3;
    const SpMat a = assemble(grid, lambda);

    const int m = grid.total();
    const double h = grid.h(0);
    const Vec& w = grid.weights();
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) dense(i, i) += lambda * w[i];
    for (int i = 0; i + 1 < m; ++i) {
        const double we = 0.5 * std::sqrt(w[i] * w[i + 1]) / (h * h);
        dense(i, i) += we;
        dense(i + 1, i + 1) += we;
        dense(i, i + 1) -= we;
        dense(i + 1, i) -= we;
    }
    const double scale = dense.cwiseAbs().maxCoeff();
    CHECK((Eigen::MatrixXd(a) - dense).cwiseAbs().maxCoeff() <= 1e-14 * scale);
}

TEST_CASE("form matrix is symmetric to the bit and linear in lambda") {
    GridSpec gs;
    gs.dim = 2;
    gs.nodes = 12;
    const WeightedGrid grid(Geometry::ReactionDiffusion, make_potential("quartic"), gs);
    const SpMat a = assemble(grid, 2.0);
    const Eigen::MatrixXd d(a);
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);

    // Doubling lambda changes exactly the mass diagonal (up to cancellation
    // noise in the large stiffness entries).
    const Eigen::MatrixXd d2(assemble(grid, 4.0));
    Eigen::MatrixXd diff = d2 - d;
    for (int i = 0; i < grid.total(); ++i) diff(i, i) -= 2.0 * grid.weights()[i];
    CHECK(diff.cwiseAbs().maxCoeff() <= 1e-13 * d.cwiseAbs().maxCoeff());

    CHECK_THROWS_AS(assemble(grid, 0.0), std::invalid_argument);
}

TEST_CASE("constants solve exactly") {
    const WeightedGrid grid = make_grid_1d("quartic", 48);
    const double lambda = 2.5;
    const EllipticSolution sol = solve(grid, lambda, Vec::Ones(grid.total()));
    CHECK((sol.u.array() - 1.0 / lambda).abs().maxCoeff() <= 1e-12);
    CHECK(sol.residual <= 1e-10);
}

TEST_CASE("ornstein-uhlenbeck coordinate solution") {
    // Pure Gaussian weight: f(x) = x has the closed solution x/(lambda + a).
    const double lambda = 1.0;
    const double a = kPi * kPi;
    const WeightedGrid grid = make_grid_1d("zero", 256);
    const EllipticSolution sol = solve(grid, lambda, coordinate_rhs(grid));
    const double sigma = grid.sigma(0);
    double worst = 0.0;
    for (int i = 0; i < grid.total(); ++i) {
        if (std::abs(grid.coord(i, 0)) > 2.0 * sigma) continue;
        worst = std::max(worst, std::abs(sol.u[i] - grid.coord(i, 0) / (lambda + a)));
    }
    CHECK(worst <= 1e-2 * sigma / (lambda + a));

    const WeightedGrid coarse = make_grid_1d("zero", 64);
    const WeightedGrid fine = make_grid_1d("zero", 128);
    const EllipticSolution uc = solve(coarse, lambda, coordinate_rhs(coarse));
    const EllipticSolution uf = solve(fine, lambda, coordinate_rhs(fine));
    const auto max_err = [&](const WeightedGrid& g, const EllipticSolution& s) {
        double e = 0.0;
        for (int i = 0; i < g.total(); ++i) {
            if (std::abs(g.coord(i, 0)) > 2.0 * g.sigma(0)) continue;
            e = std::max(e, std::abs(s.u[i] - g.coord(i, 0) / (lambda + a)));
        }
        return e;
    };
    const double ratio = max_err(coarse, uc) / max_err(fine, uf);
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.5);
}

TEST_CASE("quartic profile against a fine-grid reference") {
    const double lambda = 1.0;
    const WeightedGrid ref_grid = make_grid_1d("quartic", 4096);
    const EllipticSolution ref = solve(ref_grid, lambda, bump_rhs(ref_grid));

    const auto interp_ref = [&](double x) {
        const double h = ref_grid.h(0);
        const double left = ref_grid.coord(0, 0);
        const double pos = (x - left) / h;
        const int i = std::min<int>(ref_grid.total() - 2, std::max(0, static_cast<int>(pos)));
        const double frac = pos - i;
        return (1.0 - frac) * ref.u[i] + frac * ref.u[i + 1];
    };

    double prev_err = -1.0;
    for (const int m : {128, 256}) {
        const WeightedGrid grid = make_grid_1d("quartic", m);
        const EllipticSolution sol = solve(grid, lambda, bump_rhs(grid));
        double err = 0.0;
        for (int i = 0; i < grid.total(); ++i) {
            if (std::abs(grid.coord(i, 0)) > 2.0 * grid.sigma(0)) continue;
            err = std::max(err, std::abs(sol.u[i] - interp_ref(grid.coord(i, 0))));
        }
        if (prev_err > 0.0) {
            CHECK(prev_err / err >= 3.0);
            CHECK(prev_err / err <= 6.0);
        }
        prev_err = err;
        CHECK(err <= 1e-3);
    }
}

TEST_CASE("apply_K on constants and coordinates") {
    const WeightedGrid grid = make_grid_1d("zero", 64);
    CHECK(apply_K(grid, Vec::Ones(grid.total())).cwiseAbs().maxCoeff() == 0.0);

    const Vec ku = apply_K(grid, coordinate_rhs(grid));
    const double lam1 = grid.sigma(0) * grid.sigma(0);
    for (int i = 8; i < grid.total() - 8; ++i)
        CHECK(ku[i] == doctest::Approx(-grid.coord(i, 0) / (2.0 * lam1)).epsilon(1e-8));
}

TEST_CASE("apply_K is the operator of the form") {
    // <K u, phi>_w = -(1/2) form(u, phi) up to O(h^2) for interior-supported
    // test functions; verified under h-halving.
    const auto residual = [](int m) {
        const WeightedGrid grid = make_grid_1d("quartic", m, 5.0);
        Vec u(grid.total()), phi(grid.total());
        for (int i = 0; i < grid.total(); ++i) {
            const double t = grid.coord(i, 0) / grid.sigma(0);
            // no parity: odd and even parts in both factors
            u[i] = (std::sin(1.3 * t) + 0.5 * std::cos(0.7 * t)) * std::exp(-0.18 * t * t);
            phi[i] = (1.0 + 0.3 * t) * std::exp(-0.8 * t * t);
        }
        const Vec ku = apply_K(grid, u);
        double lhs = 0.0;
        for (int i = 0; i < grid.total(); ++i) lhs += grid.weights()[i] * ku[i] * phi[i];
        const SpMat g = stiffness(grid);
        const double rhs = -0.5 * u.dot(g * phi);
        return std::abs(lhs - rhs);
    };
    const double r1 = residual(64);
    const double r2 = residual(128);
    CHECK(r1 / r2 >= 3.0);
    CHECK(r1 / r2 <= 6.0);
}

TEST_CASE("perturbed solve with zero field reproduces the plain solve") {
    const WeightedGrid grid = make_grid_1d("quartic", 96);
    const Vec f = bump_rhs(grid);
    const EllipticSolution plain = solve(grid, 2.0, f);
    const Mat zero_field = Mat::Zero(grid.total(), 1);
    const PerturbedSolution ps = perturbed_solve(grid, 2.0, f, zero_field);
    CHECK((ps.sol.u - plain.u).cwiseAbs().maxCoeff() <= 1e-10 * plain.u.cwiseAbs().maxCoeff());
    CHECK(ps.sol.residual <= 1e-9);
}

TEST_CASE("perturbed solve agrees with the direct nonsymmetric assembly") {
    const WeightedGrid grid = make_grid_1d("zero", 128);
    const double lambda = 4.0;
    const Vec f = bump_rhs(grid);
    const Mat field = make_vector_field(grid, "const(0.8)");

    const PerturbedSolution ps = perturbed_solve(grid, lambda, f, field);

    const int m = grid.total();
    Eigen::MatrixXd a1 = Eigen::MatrixXd(assemble(grid, lambda));
    const Eigen::MatrixXd c =
        Eigen::MatrixXd(grid.convection_matrix(field, DriftScheme::Centered));
    for (int i = 0; i < m; ++i) a1.row(i) -= grid.weights()[i] * c.row(i);
    const Vec direct = a1.lu().solve(grid.weights().cwiseProduct(f));
    CHECK((ps.sol.u - direct).cwiseAbs().maxCoeff() <= 1e-8 * direct.cwiseAbs().maxCoeff());
    CHECK(ps.contraction_factor < 1.0);
}

TEST_CASE("contraction factor drops as lambda grows; divergence aborts") {
    const WeightedGrid grid = make_grid_1d("quartic", 96);
    const Vec f = bump_rhs(grid);
    const Mat field = make_vector_field(grid, "tanh(1.5)");
    double prev = 2.0;
    for (const double lambda : {2.0, 4.0, 8.0, 16.0}) {
        const PerturbedSolution ps = perturbed_solve(grid, lambda, f, field);
        CHECK(ps.contraction_factor < prev);
        prev = ps.contraction_factor;
    }
    const Mat big = make_vector_field(grid, "tanh(80.0)");
    CHECK_THROWS_AS(perturbed_solve(grid, 0.05, f, big), std::runtime_error);
}

TEST_CASE("upwind convection keeps the M-matrix sign structure, centered need not") {
    GridSpec gs;
    gs.dim = 1;
    gs.nodes = 24;
    const WeightedGrid grid(Geometry::ReactionDiffusion, make_potential("zero"), gs);
    const Mat field = make_vector_field(grid, "const(16.0)");
    const double lambda = 8.0;

    const auto offdiag_max = [&](DriftScheme scheme) {
        Eigen::MatrixXd a1 = Eigen::MatrixXd(assemble(grid, lambda));
        const Eigen::MatrixXd c = Eigen::MatrixXd(grid.convection_matrix(field, scheme));
        for (int i = 0; i < grid.total(); ++i) a1.row(i) -= grid.weights()[i] * c.row(i);
        double worst = -1e300;
        for (int i = 0; i < grid.total(); ++i)
            for (int j = 0; j < grid.total(); ++j)
                if (i != j) worst = std::max(worst, a1(i, j));
        return worst;
    };
    CHECK(offdiag_max(DriftScheme::Upwind) <= 0.0);
    CHECK(offdiag_max(DriftScheme::Centered) > 0.0);
}

TEST_CASE("upwind resolvent preserves positivity") {
    const WeightedGrid grid = make_grid_1d("quartic", 64);
    const Mat field = make_vector_field(grid, "tanh(1.0)");
    const PositivityReport rep =
        positivity_check(grid, 8.0, field, DriftScheme::Upwind, 25, {71, 0});
    CHECK(rep.trials == 25);
    CHECK(rep.violations == 0);
    CHECK(rep.worst_min >= -1e-10);
}

TEST_CASE("invariant density without perturbation is flat") {
    const WeightedGrid grid = make_grid_1d("quartic", 64);
    const Mat zero_field = Mat::Zero(grid.total(), 1);
    const InvariantDensity inv = invariant_density(grid, 8.0, zero_field);
    CHECK(std::abs(inv.eigenvalue - 1.0) <= 1e-9);
    CHECK((inv.rho.array() - 1.0).abs().maxCoeff() <= 1e-9);
    CHECK(inv.max_invariance_residual <= 1e-8);
}

TEST_CASE("gradient perturbations tilt the density by the Gibbs factor") {
    // B = -grad V with V = v0 tanh(x/sigma): the stationary density of the
    // perturbed dynamics is proportional to e^{-2V}, up to O(h^2).
    const double v0 = 0.4;
    double prev_err = -1.0;
    for (const int m : {48, 96}) {
        const WeightedGrid grid = make_grid_1d("quartic", m);
        const Mat field = make_vector_field(grid, "neg_grad_tanh(0.4)");
        const InvariantDensity inv = invariant_density(grid, 8.0, field, DriftScheme::Centered);
        const Vec v = tanh_well_values(grid, v0);
        Vec gibbs = (-2.0 * v.array()).exp();
        gibbs /= grid.nu_integral(gibbs);
        const double err = (inv.rho - gibbs).cwiseAbs().maxCoeff();
        if (prev_err > 0.0) CHECK(prev_err / err >= 3.0);
        prev_err = err;
        CHECK(std::abs(inv.eigenvalue - 1.0) <= 1e-6);
        CHECK(inv.min_rho >= -1e-8);
    }
}

TEST_CASE("rho-weighted mean of the resolvent is exact for nonnegative data") {
    // Pairing the resolvent equation with the invariant density kills the
    // generator term: lambda <rho, u>_nu = <rho, f>_nu, so the rho-weighted
    // L1 bound holds with equality for f >= 0.
    const WeightedGrid grid = make_grid_1d("quartic", 64);
    const double lambda = 8.0;
    const Mat field = make_vector_field(grid, "tanh(0.5)");
    const InvariantDensity inv = invariant_density(grid, lambda, field, DriftScheme::Upwind);

    Rng rng({73, 0});
    for (int t = 0; t < 10; ++t) {
        const Vec f = random_smooth_nodal(grid, rng).cwiseAbs();
        const PerturbedSolution ps = perturbed_solve(grid, lambda, f, field, DriftScheme::Upwind);
        CHECK(ps.sol.u.minCoeff() >= -1e-10 * f.maxCoeff());
        const double lhs = grid.nu_inner(inv.rho, ps.sol.u.cwiseAbs());
        const double rhs = grid.nu_inner(inv.rho, f) / lambda;
        CHECK(lhs <= rhs * (1.0 + 1e-8) + 1e-14);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7));
    }
}

TEST_CASE("a nu-divergence-free rotation leaves the density flat") {
    GridSpec gs;
    gs.dim = 2;
    gs.nodes = 24;
    const WeightedGrid grid(Geometry::ReactionDiffusion, make_potential("quadratic(1.0)"), gs);
    const int m = gs.nodes;
    const Vec& w = grid.weights();

    // Stream function vanishing near the boundary; the centered-difference
    // curl of the w-scaled field then has discrete nu-divergence zero.
    Vec psi(grid.total());
    for (int i = 0; i < grid.total(); ++i) {
        const double t0 = grid.coord(i, 0) / grid.sigma(0);
        const double t1 = grid.coord(i, 1) / grid.sigma(1);
        const double r2 = t0 * t0 + t1 * t1;
        psi[i] = (r2 < 9.0) ? std::exp(-r2) * (9.0 - r2) * (9.0 - r2) : 0.0;
    }
    Mat field = Mat::Zero(grid.total(), 2);
    for (int i = 0; i < grid.total(); ++i) {
        const int i0 = i % m, i1 = i / m;
        if (i0 == 0 || i0 == m - 1 || i1 == 0 || i1 == m - 1) continue;
        const double d1psi = (psi[i + m] - psi[i - m]) / (2.0 * grid.h(1));
        const double d0psi = (psi[i + 1] - psi[i - 1]) / (2.0 * grid.h(0));
        field(i, 0) = d1psi / w[i];
        field(i, 1) = -d0psi / w[i];
    }
    const InvariantDensity inv = invariant_density(grid, 8.0, field, DriftScheme::Centered);
    CHECK(std::abs(inv.eigenvalue - 1.0) <= 1e-9);
    CHECK((inv.rho.array() - 1.0).abs().maxCoeff() <= 1e-7);
}

TEST_CASE("three-dimensional solve through the iterative branch") {
    // 48^3 nodes sit above the direct-factorization threshold and exercise
    // the conjugate-gradient solve.
    GridSpec gs;
    gs.dim = 3;
    gs.nodes = 48;
    gs.half_width = 5.0;
    const WeightedGrid grid(Geometry::ReactionDiffusion, make_potential("quartic"), gs);
    REQUIRE(grid.total() > 100000);
    const double lambda = 2.0;
    Vec f(grid.total());
    for (int i = 0; i < grid.total(); ++i) {
        double s2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            const double t = grid.coord(i, a) / grid.sigma(a);
            s2 += t * t;
        }
        f[i] = std::exp(-0.5 * s2);
    }
    const EllipticSolution sol = solve(grid, lambda, f);
    CHECK(sol.residual <= 1e-10);
    CHECK(sol.u.cwiseAbs().maxCoeff() <= f.cwiseAbs().maxCoeff() / lambda + 1e-10);
    CHECK(sol.u.minCoeff() >= -1e-10);
}

TEST_CASE("hessian of the composite potential on the grid") {
    GridSpec gs;
    gs.dim = 2;
    gs.nodes = 8;
    const WeightedGrid grid(Geometry::ReactionDiffusion, make_potential("quadratic(1.5)"), gs);
    REQUIRE(grid.has_hessian());
    const Mat h = grid.potential_hessian(10);
    CHECK(h(0, 0) == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(h(1, 1) == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(std::abs(h(0, 1)) <= 1e-10);

    ScalarPotential custom;
    custom.name = "custom";
    custom.value = [](double t) { return t * t; };
    custom.deriv = [](double t) { return 2.0 * t; };
    const WeightedGrid nohess(Geometry::ReactionDiffusion, custom, gs);
    CHECK(!nohess.has_hessian());
    CHECK_THROWS_AS(nohess.potential_hessian(0), std::invalid_argument);
}

TEST_SUITE_END();
