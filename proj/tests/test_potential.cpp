#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kolmo/potential.hpp"
#include "kolmo/rng.hpp"

using namespace kolmo;

namespace {

Vec random_state(const SpectralBasis& basis, Rng& rng) {
    Vec c(basis.modes());
    for (int k = 0; k < c.size(); ++k)
        c[k] = std::sqrt(basis.eigenvalue(k + 1)) * rng.normal();
    return c;
}

// Independent root finder for y + alpha y^3 = t (pure bisection).
double quartic_prox_oracle(double t, double alpha) {
    double lo = std::min(0.0, t), hi = std::max(0.0, t);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid + alpha * mid * mid * mid < t)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE_BEGIN("potential");

TEST_CASE("registry parsing and convexity screening") {
    CHECK(make_potential("zero").is_zero);
    CHECK(make_potential("quadratic(2.5)").deriv(2.0) == doctest::Approx(5.0));
    CHECK(make_potential("quartic").value(2.0) == doctest::Approx(4.0));
    CHECK_NOTHROW(make_potential("double_well(-1,2)"));
    CHECK_THROWS_AS(make_potential("double_well(1,1)"), std::domain_error);  // nonconvex
    CHECK_NOTHROW(make_potential("exp_cosh(0.5)"));
    CHECK_THROWS_AS(make_potential("nope"), std::invalid_argument);
    CHECK_THROWS_AS(make_potential("quadratic(-1)"), std::domain_error);
}

TEST_CASE("scalar prox closed forms") {
    const ScalarPotential zero = make_potential("zero");
    CHECK(scalar_prox(1.7, {0.5}, zero) == doctest::Approx(1.7).epsilon(1e-14));

    const ScalarPotential quad = make_potential("quadratic(3.0)");
    for (const double t : {-2.0, 0.3, 5.0})
        for (const double a : {0.1, 1.0, 7.0})
            CHECK(scalar_prox(t, {a}, quad) == doctest::Approx(t / (1.0 + 3.0 * a)).epsilon(1e-12));
}

TEST_CASE("quartic prox against the bisection oracle") {
    const ScalarPotential quartic = make_potential("quartic");
    const double y = scalar_prox(1.0, {1.0}, quartic);
    CHECK(y == doctest::Approx(quartic_prox_oracle(1.0, 1.0)).epsilon(1e-10));
    CHECK(y == doctest::Approx(0.6823278038280193).epsilon(1e-9));

    Rng rng({31, 0});
    for (int i = 0; i < 200; ++i) {
        const double t = 20.0 * (rng.uniform() - 0.5);
        const double a = 0.01 + 4.0 * rng.uniform();
        const double p = scalar_prox(t, {a}, quartic);
        CHECK(std::abs(p + a * p * p * p - t) <= 1e-12 * (1.0 + std::abs(t)));
    }
}

TEST_CASE("prox rejects a decreasing derivative") {
    ScalarPotential bogus;
    bogus.name = "bogus";
    bogus.value = [](double t) { return -t * t; };
    bogus.deriv = [](double t) { return -2.0 * t; };
    // validate_potential would refuse this profile; calling the root finder
    // directly must fail on the bracket instead of looping.
    CHECK_THROWS_AS(scalar_prox(1.0, {2.0}, bogus), std::domain_error);
}

TEST_CASE("prox is firmly nonexpansive") {
    const ScalarPotential quartic = make_potential("quartic");
    Rng rng({32, 0});
    for (int i = 0; i < 300; ++i) {
        const double t1 = 10.0 * (rng.uniform() - 0.5);
        const double t2 = 10.0 * (rng.uniform() - 0.5);
        const double a = 0.05 + 2.0 * rng.uniform();
        CHECK(std::abs(scalar_prox(t1, {a}, quartic) - scalar_prox(t2, {a}, quartic)) <=
              std::abs(t1 - t2) + 1e-11);
    }
}

TEST_CASE("composite value quadrature") {
    const BasisSpec rd = make_basis(Geometry::ReactionDiffusion, 4, 64);
    Vec c = Vec::Zero(4);
    c[0] = 1.0;

    CHECK(u_eval(c, {make_potential("exp_cosh(1)"), rd}) >= 1.0);  // bounded below by inf phi

    // A constant profile integrates to itself.
    ScalarPotential flat;
    flat.name = "flat";
    flat.value = [](double) { return 2.5; };
    flat.deriv = [](double) { return 0.0; };
    flat.lower_bound = 2.5;
    CHECK(u_eval(c, {flat, rd}) == doctest::Approx(2.5).epsilon(1e-15));

    // phi(s) = s^2 on the first mode: integral of 2 sin^2(pi s) = 1.
    CHECK(u_eval(c, {make_potential("quadratic(2.0)"), rd}) == doctest::Approx(1.0).epsilon(1e-12));
    // phi(s) = s^4/4: integral of (sqrt2 sin)^4/4 = 3/8.
    CHECK(u_eval(c, {make_potential("quartic"), rd}) == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(u_eval(c, {make_potential("zero"), rd}) == 0.0);
}

TEST_CASE("moreau envelope closed form and monotonicity") {
    const BasisSpec rd = make_basis(Geometry::ReactionDiffusion, 4, 64);
    const CompositePotential quad{make_potential("quadratic(1.0)"), rd};
    Rng rng({33, 0});
    SpectralBasis basis(rd);
    const Vec x = random_state(basis, rng);
    const double u = u_eval(x, quad);
    for (const double a : {0.25, 1.0, 4.0})
        CHECK(u_moreau(x, a, quad) == doctest::Approx(u / (1.0 + a)).epsilon(1e-10));

    const CompositePotential quartic{make_potential("quartic"), rd};
    const double u_exact = u_eval(x, quartic);
    double prev = -1e300;
    for (const double a : {4.0, 1.0, 0.1, 1e-3, 1e-6}) {
        const double ua = u_moreau(x, a, quartic);
        CHECK(ua <= u_exact + 1e-12);
        CHECK(ua >= prev - 1e-12);  // nondecreasing as alpha drops
        prev = ua;
    }
    CHECK(u_moreau(x, 1e-8, quartic) == doctest::Approx(u_exact).epsilon(1e-6));
    CHECK(u_moreau(x, 1.0, {make_potential("zero"), rd}) == 0.0);
}

TEST_CASE("du linear case and trigonometric oracle") {
    const BasisSpec rd = make_basis(Geometry::ReactionDiffusion, 4, 64);
    const CompositePotential quad{make_potential("quadratic(2.5)"), rd};
    Rng rng({34, 0});
    SpectralBasis basis(rd);
    const Vec x = random_state(basis, rng);
    CHECK((du(x, quad) - 2.5 * x).norm() <= 1e-11 * x.norm());

    // phi' = s^3 on the first mode: <(sqrt2 sin)^3, sqrt2 sin> = 4 int sin^4 = 3/2.
    Vec e1 = Vec::Zero(4);
    e1[0] = 1.0;
    const CompositePotential quartic{make_potential("quartic"), rd};
    const Vec g = du(e1, quartic);
    CHECK(g[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(std::abs(g[1]) <= 1e-12);  // odd symmetry kills the second mode

    // du at the origin reduces to phi'(0) times the coefficients of 1; the
    // asymmetric profile makes phi'(0) nonzero.
    ScalarPotential expo;
    expo.name = "exp";
    expo.value = [](double t) { return std::exp(t); };
    expo.deriv = [](double t) { return std::exp(t); };
    expo.deriv2 = [](double t) { return std::exp(t); };
    expo.lower_bound = 0.0;
    expo.test_range = 4.0;
    expo.growth_value_exp = 6.0;
    expo.growth_deriv_exp = 5.0;
    expo.growth_const = std::exp(4.0);
    validate_potential(expo);
    const Vec g0 = du(Vec::Zero(4), {expo, rd});
    const Vec ones_coeff = basis.analyze(Vec::Ones(64));
    CHECK((g0 - 1.0 * ones_coeff).norm() <= 1e-12);
    CHECK(ones_coeff[0] > 0.5);  // the comparison is not vacuous
}

TEST_CASE("du_alpha closed form and limit") {
    const BasisSpec rd = make_basis(Geometry::ReactionDiffusion, 4, 64);
    const CompositePotential quad{make_potential("quadratic(2.0)"), rd};
    Rng rng({35, 0});
    SpectralBasis basis(rd);
    const Vec x = random_state(basis, rng);
    for (const double a : {0.2, 1.0})
        CHECK((du_alpha(x, a, quad) - (2.0 / (1.0 + 2.0 * a)) * x).norm() <= 1e-10 * x.norm());

    const CompositePotential quartic{make_potential("quartic"), rd};
    CHECK((du_alpha(x, 1e-9, quartic) - du(x, quartic)).norm() <= 1e-6);
    CHECK(du_alpha(x, 1.0, {make_potential("zero"), rd}).cwiseAbs().maxCoeff() == 0.0);

    // The smoothed gradient norm grows monotonically as alpha drops and is
    // capped by the exact gradient norm.
    const double exact_norm = du(x, quartic).norm();
    double prev_norm = -1.0;
    for (const double a : {4.0, 1.0, 0.25, 0.05, 1e-3}) {
        const double n = du_alpha(x, a, quartic).norm();
        CHECK(n >= prev_norm - 1e-12);
        CHECK(n <= exact_norm + 1e-12);
        prev_norm = n;
    }
}

TEST_CASE("cahn-hilliard gradient via both routes") {
    const BasisSpec ch = make_basis(Geometry::CahnHilliard, 6, 96);
    SpectralBasis basis(ch);
    Rng rng({36, 0});

    CHECK(du_cahn_hilliard(Vec::Ones(6), {make_potential("zero"), ch}).cwiseAbs().maxCoeff() ==
          0.0);

    PotentialEval quad({make_potential("quadratic(1.5)"), ch});
    Vec e1 = Vec::Zero(6);
    e1[0] = 1.0;
    const Vec r1 = quad.du_cahn_hilliard(e1);
    const Vec r2 = quad.du_cahn_hilliard_qroute(e1);
    CHECK((r1 - r2).norm() <= 1e-9 * (1.0 + r1.norm()));

    PotentialEval quartic({make_potential("quartic"), ch});
    const Vec x = random_state(basis, rng);
    const Vec a = quartic.du_cahn_hilliard(x);
    const Vec b = quartic.du_cahn_hilliard_qroute(x);
    CHECK((a - b).norm() <= 1e-9 * (1.0 + a.norm()));

    // Linear profile: the gradient acts mode-by-mode as c (k pi)^2 c_k.
    for (int k = 0; k < 6; ++k) {
        Vec ek = Vec::Zero(6);
        ek[k] = 1.0;
        const double kpi = (k + 1) * std::numbers::pi;
        CHECK(quad.du_cahn_hilliard(ek)[k] == doctest::Approx(1.5 * kpi * kpi).epsilon(1e-10));
    }
}

TEST_CASE("moreau gradient gap inequality") {
    const BasisSpec rd = make_basis(Geometry::ReactionDiffusion, 4, 64);
    const CompositePotential quad{make_potential("quadratic(1.0)"), rd};
    Rng rng({37, 0});
    SpectralBasis basis(rd);
    Vec x = random_state(basis, rng);
    const auto [diff, drop] = my_gap(x, 1.0, quad);
    const double n2 = x.squaredNorm();
    CHECK(diff == doctest::Approx(0.25 * n2).epsilon(1e-9));
    CHECK(drop == doctest::Approx(0.75 * n2).epsilon(1e-9));

    const CompositePotential quartic{make_potential("quartic"), rd};
    for (const double a : {1.0, 0.1, 0.01}) {
        const auto [d, s] = my_gap(random_state(basis, rng), a, quartic);
        CHECK(d <= s + 1e-8);
    }

    // Both components vanish in the alpha -> 0 limit.
    const auto [d0, s0] = my_gap(x, 1e-9, quartic);
    CHECK(d0 <= 1e-12);
    CHECK(std::abs(s0) <= 1e-6);
}

TEST_CASE("du_alpha matches the finite-difference envelope gradient") {
    const BasisSpec rd = make_basis(Geometry::ReactionDiffusion, 3, 48);
    const CompositePotential quartic{make_potential("quartic"), rd};
    PotentialEval eval(quartic);
    Rng rng({38, 0});
    SpectralBasis basis(rd);
    const Vec x = random_state(basis, rng);
    const double alpha = 0.3;
    const Vec g = eval.du_alpha(x, alpha);
    const double step = 1e-5 * (1.0 + x.norm());
    for (int k = 0; k < 3; ++k) {
        Vec xp = x, xm = x;
        xp[k] += step;
        xm[k] -= step;
        const double fd = (eval.u_moreau(xp, alpha) - eval.u_moreau(xm, alpha)) / (2.0 * step);
        CHECK(g[k] == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("kinked profiles pass only through the envelope path") {
    // phi(s) = |s| with the a.e. derivative sign(s): the prox is the soft
    // threshold and the envelope is the Huber function.
    ScalarPotential abs_pot;
    abs_pot.name = "abs";
    abs_pot.value = [](double t) { return std::abs(t); };
    abs_pot.deriv = [](double t) { return (t > 0.0) - (t < 0.0); };
    abs_pot.smooth = false;
    abs_pot.growth_value_exp = 2.0;
    abs_pot.growth_deriv_exp = 1.0;
    validate_potential(abs_pot);

    const auto soft = [](double t, double a) {
        return (std::abs(t) <= a) ? 0.0 : t - ((t > 0.0) ? a : -a);
    };
    for (const double t : {-3.0, -0.4, 0.0, 0.7, 2.5}) {
        for (const double a : {0.5, 1.0, 2.0}) {
            CHECK(scalar_prox(t, {a}, abs_pot) == doctest::Approx(soft(t, a)).epsilon(1e-9));
            const double huber =
                (std::abs(t) <= a) ? t * t / (2.0 * a) : std::abs(t) - 0.5 * a;
            CHECK(scalar_moreau(t, {a}, abs_pot) == doctest::Approx(huber).epsilon(1e-9));
        }
    }

    const BasisSpec rd = make_basis(Geometry::ReactionDiffusion, 3, 48);
    const CompositePotential pot{abs_pot, rd};
    Vec x(3);
    x << 0.4, -0.2, 0.1;
    CHECK_THROWS_AS(du(x, pot), std::invalid_argument);
    CHECK_THROWS_AS(my_gap(x, 0.5, pot), std::invalid_argument);
    CHECK_NOTHROW(u_moreau(x, 0.5, pot));

    // Envelope gradient against central differences of the envelope.
    PotentialEval eval(pot);
    const double alpha = 0.5;
    const Vec g = eval.du_alpha(x, alpha);
    const double step = 1e-6;
    for (int k = 0; k < 3; ++k) {
        Vec xp = x, xm = x;
        xp[k] += step;
        xm[k] -= step;
        const double fd = (eval.u_moreau(xp, alpha) - eval.u_moreau(xm, alpha)) / (2.0 * step);
        CHECK(g[k] == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("geometry guards") {
    const BasisSpec ch = make_basis(Geometry::CahnHilliard, 4, 64);
    const CompositePotential pot{make_potential("quartic"), ch};
    Vec x = Vec::Zero(4);
    CHECK_THROWS_AS(du(x, pot), std::invalid_argument);
    CHECK_THROWS_AS(u_moreau(x, 0.5, pot), std::invalid_argument);
    const BasisSpec rd = make_basis(Geometry::ReactionDiffusion, 4, 64);
    CHECK_THROWS_AS(du_cahn_hilliard(x, {make_potential("quartic"), rd}), std::invalid_argument);
}

TEST_SUITE_END();
