#include "kolmo/feynman_kac.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kolmo {

namespace {

double default_horizon(double lambda, const SpectralBasis& basis) {
    return std::max(5.0 / lambda, 20.0 * basis.eigenvalue(1));
}

/// Trapezoidal time integral of e^{-lambda t} f(X_t) along one path.
double path_integral(SdeEngine& engine, const ResolventQuery& q, const Vec& x0, Rng& rng) {
    const double dt = engine.config().dt;
    const int steps = engine.steps();
    Vec state = x0;
    Vec noise(x0.size());
    double acc = 0.5 * q.f.eval(state);  // t = 0 endpoint
    for (int s = 1; s <= steps; ++s) {
        for (int k = 0; k < noise.size(); ++k) noise[k] = rng.normal();
        engine.step_inplace(state, noise);
        const double g = std::exp(-q.lambda * s * dt) * q.f.eval(state);
        acc += (s == steps) ? 0.5 * g : g;
    }
    return acc * dt;
}

/// Fine/coarse pair driven by one fine noise sequence (coarse increments are
/// the aggregated fine ones); returns the two time integrals.
std::pair<double, double> nested_pair_integral(const ResolventQuery& q,
                                               const CompositePotential& pot, const Vec& x0,
                                               Rng& rng) {
    SdeConfig fine_cfg = q.sde;
    fine_cfg.dt = q.sde.dt * 0.5;
    fine_cfg.horizon = q.horizon;
    SdeConfig coarse_cfg = q.sde;
    coarse_cfg.horizon = q.horizon;
    SdeEngine fine(pot, fine_cfg), coarse(pot, coarse_cfg);

    Vec xf = x0, xc = x0;
    Vec z1(x0.size()), z2(x0.size()), zc(x0.size());
    const int csteps = coarse.steps();
    double accf = 0.5 * q.f.eval(xf), accc = 0.5 * q.f.eval(xc);
    for (int s = 1; s <= csteps; ++s) {
        for (int k = 0; k < z1.size(); ++k) z1[k] = rng.normal();
        for (int k = 0; k < z2.size(); ++k) z2[k] = rng.normal();
        fine.step_inplace(xf, z1);
        const double tmid = (s - 0.5) * coarse_cfg.dt;
        accf += std::exp(-q.lambda * tmid) * q.f.eval(xf);
        fine.step_inplace(xf, z2);
        zc = (z1 + z2) / std::sqrt(2.0);
        coarse.step_inplace(xc, zc);
        const double t = s * coarse_cfg.dt;
        const double gf = std::exp(-q.lambda * t) * q.f.eval(xf);
        const double gc = std::exp(-q.lambda * t) * q.f.eval(xc);
        accf += (s == csteps) ? 0.5 * gf : gf;
        accc += (s == csteps) ? 0.5 * gc : gc;
    }
    return {accf * fine_cfg.dt, accc * coarse_cfg.dt};
}

}  // namespace

ResolventEstimate resolvent_mc(const ResolventQuery& q_in, const CompositePotential& pot) {
    if (q_in.lambda <= 0.0) throw std::invalid_argument("resolvent_mc: lambda must be positive");
    if (q_in.paths < 1) throw std::invalid_argument("resolvent_mc: need at least one path");

    ResolventQuery q = q_in;
    SpectralBasis basis(pot.geometry);
    if (q.horizon <= 0.0) q.horizon = default_horizon(q.lambda, basis);
    if (q.f.bounded) {
        const double tail = std::exp(-q.lambda * q.horizon) * q.f.sup_norm / q.lambda;
        const double budget = 0.05 * q.f.sup_norm / q.lambda + 1e-12;
        if (tail > budget)
            throw std::invalid_argument("resolvent_mc: horizon too small for the tail budget");
    }

    SdeConfig cfg = q.sde;
    cfg.horizon = q.horizon;
    SdeEngine engine(pot, cfg);

    std::vector<double> integrals(q.paths);
    for (int i = 0; i < q.paths; ++i) {
        Rng rng({q.sde.rng.seed, q.sde.rng.stream + static_cast<std::uint64_t>(i)});
        integrals[i] = path_integral(engine, q, q.x0, rng);
    }

    ResolventEstimate est;
    est.paths = q.paths;
    est.horizon = q.horizon;
    est.value = pairwise_mean(integrals);
    std::vector<double> dev(q.paths);
    for (int i = 0; i < q.paths; ++i)
        dev[i] = (integrals[i] - est.value) * (integrals[i] - est.value);
    est.se = (q.paths > 1)
                 ? std::sqrt(pairwise_sum(dev) / (static_cast<double>(q.paths) * (q.paths - 1.0)))
                 : 0.0;

    // Deterministic tail bound; for unbounded f fall back to the empirical
    // scale and mark the run as outside the proven bounded-f scope.
    double sup = q.f.sup_norm;
    if (!q.f.bounded || !std::isfinite(sup)) {
        est.outside_proven_scope = true;
        double emp = 0.0;
        for (double v : integrals) emp = std::max(emp, std::abs(v));
        sup = q.lambda * emp + std::abs(q.f.eval(q.x0));
    }
    est.tail_bias = std::exp(-q.lambda * q.horizon) * sup / q.lambda;

    // dt-halving pilot with common (nested) noise.
    const int pilot = std::min(q.paths, 512);
    std::vector<double> diffs(pilot);
    for (int i = 0; i < pilot; ++i) {
        Rng rng({q.sde.rng.seed ^ 0x9e3779b97f4a7c15ULL,
                 q.sde.rng.stream + static_cast<std::uint64_t>(q.paths + i)});
        const auto [fine, coarse] = nested_pair_integral(q, pot, q.x0, rng);
        diffs[i] = fine - coarse;
    }
    const double mean_diff = pairwise_mean(diffs);
    std::vector<double> ddev(pilot);
    for (int i = 0; i < pilot; ++i) ddev[i] = (diffs[i] - mean_diff) * (diffs[i] - mean_diff);
    const double se_diff =
        (pilot > 1)
            ? std::sqrt(pairwise_sum(ddev) / (static_cast<double>(pilot) * (pilot - 1.0)))
            : 0.0;
    // First-order scheme: the remaining bias is about the fine/coarse gap.
    est.quad_bias = 2.0 * std::abs(mean_diff) + 3.0 * se_diff;

    if (q.f.bounded)
        est.sup_bound_ok = std::abs(est.value) <= q.f.sup_norm / q.lambda + est.bias() + 3.0 * est.se;
    return est;
}

LipschitzReport lipschitz_bound_check(const ResolventQuery& q_in, const CompositePotential& pot,
                                      int pairs, RngSpec pair_rng) {
    if (!std::isfinite(q_in.f.lipschitz))
        throw std::invalid_argument("lipschitz_bound_check: functional has no Lipschitz constant");
    ResolventQuery q = q_in;
    SpectralBasis basis(pot.geometry);
    if (q.horizon <= 0.0) q.horizon = default_horizon(q.lambda, basis);
    SdeConfig cfg = q.sde;
    cfg.horizon = q.horizon;

    Rng gen(pair_rng);
    LipschitzReport rep;
    rep.pairs = pairs;
    rep.bound = q.f.lipschitz / q.lambda;
    const int n = pot.geometry.modes;
    const int inner_paths = std::max(1, q.paths / 10);
    SdeEngine engine(pot, cfg);

    for (int p = 0; p < pairs; ++p) {
        Vec x(n), y(n);
        for (int k = 0; k < n; ++k) {
            const double s = std::sqrt(basis.eigenvalue(k + 1));
            x[k] = s * gen.normal();
            y[k] = s * gen.normal();
        }
        const double dist = (x - y).norm();
        if (dist == 0.0) continue;
        std::vector<double> diffs(inner_paths);
        for (int i = 0; i < inner_paths; ++i) {
            Rng r1({pair_rng.seed, pair_rng.stream + 1000003ULL * p + i});
            Rng r2({pair_rng.seed, pair_rng.stream + 1000003ULL * p + i});
            const double ux = path_integral(engine, q, x, r1);
            const double uy = path_integral(engine, q, y, r2);
            diffs[i] = ux - uy;
        }
        const double mean_diff = pairwise_mean(diffs);
        std::vector<double> dev(inner_paths);
        for (int i = 0; i < inner_paths; ++i)
            dev[i] = (diffs[i] - mean_diff) * (diffs[i] - mean_diff);
        const double se =
            (inner_paths > 1) ? std::sqrt(pairwise_sum(dev) /
                                          (static_cast<double>(inner_paths) * (inner_paths - 1.0)))
                              : 0.0;
        const double ratio = (std::abs(mean_diff) - 3.0 * se) / dist;
        rep.worst_ratio = std::max(rep.worst_ratio, std::abs(mean_diff) / dist);
        rep.tolerance = std::max(rep.tolerance, (3.0 * se) / dist + 10.0 * cfg.dt * rep.bound);
        if (ratio > rep.bound + 10.0 * cfg.dt * rep.bound) rep.pass = false;
    }
    return rep;
}

CrossValidation cross_validate(const ResolventQuery& q_in, const CompositePotential& pot,
                               const WeightedGrid& grid, const EllipticSolution& sol,
                               const std::vector<int>& nodes, double grid_budget) {
    if (grid.dim() > 2)
        throw std::invalid_argument("cross_validate: elliptic reference limited to n <= 2");
    if (grid.dim() != pot.geometry.modes)
        throw std::invalid_argument("cross_validate: truncation dimension mismatch");
    if (std::abs(sol.lambda - q_in.lambda) > 0.0)
        throw std::invalid_argument("cross_validate: lambda mismatch");

    CrossValidation cv;
    cv.points = static_cast<int>(nodes.size());
    for (int node : nodes) {
        ResolventQuery q = q_in;
        q.x0 = Vec(grid.dim());
        for (int a = 0; a < grid.dim(); ++a) q.x0[a] = grid.coord(node, a);
        const ResolventEstimate est = resolvent_mc(q, pot);
        const double disc = std::abs(est.value - sol.u[node]);
        const double budget = 3.0 * est.se + est.bias() + grid_budget;
        cv.max_discrepancy = std::max(cv.max_discrepancy, disc);
        cv.budget = std::max(cv.budget, budget);
        if (disc > budget) cv.pass = false;
    }
    return cv;
}

}  // namespace kolmo
