#include "kolmo/potential.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace kolmo {

namespace {

std::vector<double> parse_args(const std::string& descriptor, std::string& head) {
    const auto open = descriptor.find('(');
    if (open == std::string::npos) {
        head = descriptor;
        return {};
    }
    if (descriptor.back() != ')')
        throw std::invalid_argument("potential: malformed descriptor '" + descriptor + "'");
    head = descriptor.substr(0, open);
    std::vector<double> args;
    std::string body = descriptor.substr(open + 1, descriptor.size() - open - 2);
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        args.push_back(std::stod(tok));
    }
    return args;
}

}  // namespace

ScalarPotential make_potential(const std::string& descriptor) {
    std::string head;
    const std::vector<double> args = parse_args(descriptor, head);
    ScalarPotential phi;
    phi.name = descriptor;

    if (head == "zero") {
        phi.value = [](double) { return 0.0; };
        phi.deriv = [](double) { return 0.0; };
        phi.deriv2 = [](double) { return 0.0; };
        phi.deriv3 = [](double) { return 0.0; };
        phi.growth_value_exp = 2.0;
        phi.growth_deriv_exp = 1.0;
        phi.lower_bound = 0.0;
        phi.is_zero = true;
    } else if (head == "quadratic") {
        const double c = args.empty() ? 1.0 : args[0];
        if (c < 0.0) throw std::domain_error("potential: quadratic(c) needs c >= 0");
        phi.value = [c](double t) { return 0.5 * c * t * t; };
        phi.deriv = [c](double t) { return c * t; };
        phi.deriv2 = [c](double) { return c; };
        phi.deriv3 = [](double) { return 0.0; };
        phi.growth_value_exp = 2.0;
        phi.growth_deriv_exp = 1.0;
        phi.growth_const = std::max(1.0, c);
        phi.lower_bound = 0.0;
        phi.is_zero = (c == 0.0);
    } else if (head == "quartic") {
        phi.value = [](double t) { return 0.25 * t * t * t * t; };
        phi.deriv = [](double t) { return t * t * t; };
        phi.deriv2 = [](double t) { return 3.0 * t * t; };
        phi.deriv3 = [](double t) { return 6.0 * t; };
        phi.growth_value_exp = 4.0;
        phi.growth_deriv_exp = 3.0;
        phi.lower_bound = 0.0;
    } else if (head == "double_well") {
        if (args.size() != 2) throw std::invalid_argument("potential: double_well needs (a,b)");
        const double a = args[0], b = args[1];
        if (b <= 0.0) throw std::domain_error("potential: double_well(a,b) needs b > 0");
        phi.value = [a, b](double t) {
            const double q = t * t - a;
            return q * q / b;
        };
        phi.deriv = [a, b](double t) { return 4.0 * t * (t * t - a) / b; };
        phi.deriv2 = [a, b](double t) { return (12.0 * t * t - 4.0 * a) / b; };
        phi.deriv3 = [b](double t) { return 24.0 * t / b; };
        phi.growth_value_exp = 4.0;
        phi.growth_deriv_exp = 3.0;
        phi.growth_const = std::max(1.0, (4.0 + 4.0 * std::abs(a) + a * a) / b);
        phi.lower_bound = (a > 0.0) ? 0.0 : a * a / b;
    } else if (head == "exp_cosh") {
        const double c = args.empty() ? 1.0 : args[0];
        if (c <= 0.0) throw std::domain_error("potential: exp_cosh(c) needs c > 0");
        phi.value = [c](double t) { return std::cosh(c * t); };
        phi.deriv = [c](double t) { return c * std::sinh(c * t); };
        phi.deriv2 = [c](double t) { return c * c * std::cosh(c * t); };
        phi.deriv3 = [c](double t) { return c * c * c * std::sinh(c * t); };
        // Polynomial envelope only on the declared test range.
        phi.test_range = 4.0;
        phi.growth_value_exp = 6.0;
        phi.growth_deriv_exp = 5.0;
        phi.growth_const = std::cosh(c * phi.test_range) * std::max(1.0, c);
        phi.lower_bound = 1.0;
    } else {
        throw std::invalid_argument("potential: unknown profile '" + descriptor + "'");
    }

    validate_potential(phi);
    return phi;
}

void validate_potential(const ScalarPotential& phi) {
    if (!phi.value || !phi.deriv)
        throw std::domain_error("potential: value and derivative are required");
    if (phi.growth_value_exp < 2.0 || phi.growth_deriv_exp < 1.0)
        throw std::domain_error("potential: growth exponents must satisfy p1 >= 2, p2 >= 1");

    const int samples = 512;
    const double r = phi.test_range;
    double prev_t = -r, prev_d = phi.deriv(-r);
    for (int i = 0; i <= samples; ++i) {
        const double t = -r + 2.0 * r * i / samples;
        const double d = phi.deriv(t);
        if (i > 0 && d < prev_d - 1e-12 * (1.0 + std::abs(prev_d)))
            throw std::domain_error("potential: derivative decreases near t=" +
                                    std::to_string(prev_t) + "; profile not convex");
        const double v = phi.value(t);
        if (v < phi.lower_bound - 1e-12 * (1.0 + std::abs(v)))
            throw std::domain_error("potential: value below declared lower bound");
        const double env_v = phi.growth_const * (1.0 + std::pow(std::abs(t), phi.growth_value_exp));
        const double env_d = phi.growth_const * (1.0 + std::pow(std::abs(t), phi.growth_deriv_exp));
        if (std::abs(v) > env_v || std::abs(d) > env_d)
            throw std::domain_error("potential: growth declaration violated at t=" +
                                    std::to_string(t));
        prev_t = t;
        prev_d = d;
    }
}

double scalar_prox(double t, const ProxParams& p, const ScalarPotential& phi) {
    if (p.alpha <= 0.0) throw std::invalid_argument("prox: alpha must be positive");
    const auto g = [&](double y) { return y + p.alpha * phi.deriv(y) - t; };
    const double tol = p.tolerance * (1.0 + std::abs(t));

    double lo = std::min(t, t - p.alpha * phi.deriv(t));
    double hi = std::max(t, t - p.alpha * phi.deriv(t));
    if (lo == hi) {
        lo -= tol + 1e-16;
        hi += tol + 1e-16;
    }
    double glo = g(lo), ghi = g(hi);
    int widen = 0;
    while (glo > 0.0 || ghi < 0.0) {
        const double width = hi - lo;
        if (glo > 0.0) lo -= width;
        if (ghi < 0.0) hi += width;
        glo = g(lo);
        ghi = g(hi);
        if (++widen > 200 || !std::isfinite(glo) || !std::isfinite(ghi))
            throw std::domain_error("prox: bracket expansion failed (profile not convex?)");
    }

    // Newton clipped to the bracket; fall back to bisection whenever the
    // step leaves it or fails to shrink it fast enough (guards against the
    // slow crawl of Newton on exponential-growth derivatives).
    double y = 0.5 * (lo + hi);
    double gy = g(y);
    double step_old = hi - lo;
    for (int it = 0; it < p.max_iterations; ++it) {
        if (std::abs(gy) <= tol) return y;
        if (gy > 0.0)
            hi = y;
        else
            lo = y;
        double next = 0.0;
        bool use_bisect = true;
        if (phi.deriv2) {
            const double slope = 1.0 + p.alpha * (*phi.deriv2)(y);
            if (slope > 0.0 && std::isfinite(slope)) {
                next = y - gy / slope;
                const bool in_bracket = next > lo && next < hi;
                const bool fast_enough = std::abs(2.0 * gy) <= std::abs(step_old * slope);
                use_bisect = !(in_bracket && fast_enough);
            }
        }
        if (use_bisect) next = 0.5 * (lo + hi);
        step_old = std::abs(next - y);
        y = next;
        gy = g(y);
        // A collapsed bracket with |g| still large marks a jump of the
        // (a.e.-defined) derivative; the resolvent is the jump location.
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(t)))
            return 0.5 * (lo + hi);
    }
    if (std::abs(gy) <= tol) return y;
    throw std::runtime_error("prox: no convergence after " + std::to_string(p.max_iterations) +
                             " iterations, residual " + std::to_string(gy));
}

double scalar_moreau(double t, const ProxParams& p, const ScalarPotential& phi) {
    const double y = scalar_prox(t, p, phi);
    const double d = t - y;
    return phi.value(y) + d * d / (2.0 * p.alpha);
}

PotentialEval::PotentialEval(const CompositePotential& pot)
    : profile_(pot.profile), basis_(pot.geometry) {
    grid_buf_.resize(basis_.grid_points());
    work_buf_.resize(basis_.grid_points());
}

void PotentialEval::require_rd(const char* op) const {
    if (basis_.spec().kind != Geometry::ReactionDiffusion)
        throw std::invalid_argument(std::string(op) +
                                    ": only defined for the ReactionDiffusion geometry");
}

const Vec& PotentialEval::realize(const Vec& state) {
    grid_buf_.noalias() = basis_.synthesis_matrix() * state;
    return grid_buf_;
}

double PotentialEval::u_value(const Vec& state) {
    const Vec& g = realize(state);
    double acc = 0.0;
    for (int j = 0; j < g.size(); ++j) acc += profile_.value(g[j]);
    return acc / static_cast<double>(g.size());
}

double PotentialEval::u_moreau(const Vec& state, double alpha) {
    require_rd("u_moreau");
    if (alpha <= 0.0) throw std::invalid_argument("u_moreau: alpha must be positive");
    ProxParams p = prox_params;
    p.alpha = alpha;
    const Vec& g = realize(state);
    double acc = 0.0;
    for (int j = 0; j < g.size(); ++j) acc += scalar_moreau(g[j], p, profile_);
    return acc / static_cast<double>(g.size());
}

Vec PotentialEval::du(const Vec& state) {
    require_rd("du");
    if (!profile_.differentiable())
        throw std::invalid_argument("du: profile has no derivative; use the Moreau path");
    const Vec& g = realize(state);
    for (int j = 0; j < g.size(); ++j) work_buf_[j] = profile_.deriv(g[j]);
    return basis_.analyze(work_buf_);
}

Vec PotentialEval::du_alpha(const Vec& state, double alpha) {
    require_rd("du_alpha");
    if (alpha <= 0.0) throw std::invalid_argument("du_alpha: alpha must be positive");
    ProxParams p = prox_params;
    p.alpha = alpha;
    const Vec& g = realize(state);
    for (int j = 0; j < g.size(); ++j) {
        const double y = scalar_prox(g[j], p, profile_);
        // phi'(y) for smooth profiles; the envelope gradient (t - y)/alpha is
        // the valid reading when the derivative jumps.
        work_buf_[j] = profile_.smooth ? profile_.deriv(y) : (g[j] - y) / alpha;
    }
    return basis_.analyze(work_buf_);
}

Vec PotentialEval::du_cahn_hilliard(const Vec& state) {
    if (basis_.spec().kind != Geometry::CahnHilliard)
        throw std::invalid_argument("du_cahn_hilliard: basis is not Cahn-Hilliard");
    const Vec& g = realize(state);
    for (int j = 0; j < g.size(); ++j) work_buf_[j] = profile_.deriv(g[j]);
    // <phi' o x, f_k>_{L2} = (k pi) <phi' o x, e_k>_{L2}: reuse the synthesis
    // columns (which carry the k pi factor) and undo the analyze 1/(k pi)^2
    // rescale by one factor of (k pi)^2 ... i.e. plain column projection.
    Vec c = (basis_.synthesis_matrix().transpose() * work_buf_) /
            static_cast<double>(basis_.grid_points());
    return c;
}

Vec PotentialEval::du_cahn_hilliard_qroute(const Vec& state) {
    if (basis_.spec().kind != Geometry::CahnHilliard)
        throw std::invalid_argument("du_cahn_hilliard: basis is not Cahn-Hilliard");
    const Vec& g = realize(state);
    for (int j = 0; j < g.size(); ++j) work_buf_[j] = profile_.deriv(g[j]);
    const double mean = work_buf_.mean();
    for (int j = 0; j < work_buf_.size(); ++j) work_buf_[j] = (work_buf_[j] - mean) / std::sqrt(2.0);
    return basis_.apply_q_power(basis_.analyze(work_buf_), -0.5);
}

void PotentialEval::drift_gradient(const Vec& state, double alpha, Vec& out) {
    if (profile_.is_zero) {
        out.setZero(state.size());
        return;
    }
    if (basis_.spec().kind == Geometry::CahnHilliard) {
        if (alpha > 0.0)
            throw std::invalid_argument(
                "drift_gradient: Moreau smoothing is not defined for Cahn-Hilliard");
        out = du_cahn_hilliard(state);
        return;
    }
    out = (alpha > 0.0) ? du_alpha(state, alpha) : du(state);
}

std::pair<double, double> PotentialEval::my_gap(const Vec& state, double alpha) {
    require_rd("my_gap");
    if (!profile_.differentiable())
        throw std::invalid_argument("my_gap: needs a differentiable profile");
    const Vec exact = du(state);
    const Vec smoothed = du_alpha(state, alpha);
    const double diff = (smoothed - exact).squaredNorm();
    const double drop = exact.squaredNorm() - smoothed.squaredNorm();
    return {diff, drop};
}

double u_eval(const Vec& state, const CompositePotential& pot) {
    return PotentialEval(pot).u_value(state);
}

double u_moreau(const Vec& state, double alpha, const CompositePotential& pot) {
    return PotentialEval(pot).u_moreau(state, alpha);
}

Vec du(const Vec& state, const CompositePotential& pot) { return PotentialEval(pot).du(state); }

Vec du_alpha(const Vec& state, double alpha, const CompositePotential& pot) {
    return PotentialEval(pot).du_alpha(state, alpha);
}

Vec du_cahn_hilliard(const Vec& state, const CompositePotential& pot) {
    return PotentialEval(pot).du_cahn_hilliard(state);
}

std::pair<double, double> my_gap(const Vec& state, double alpha, const CompositePotential& pot) {
    return PotentialEval(pot).my_gap(state, alpha);
}

}  // namespace kolmo
