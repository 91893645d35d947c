#include "kolmo/harness.hpp"

#include <cmath>
#include <stdexcept>

namespace kolmo {

namespace {

double d1_of(const CylinderFunction& f, const Vec& x, int k) {
    return (k < f.dims) ? f.d1(x, k) : 0.0;
}

double d2_of(const CylinderFunction& f, const Vec& x, int k) {
    return (k < f.dims) ? f.d2(x, k) : 0.0;
}

}  // namespace

EstimateReport make_report(std::string name, double lhs, double rhs, double se, double budget,
                           bool identity, std::string provenance) {
    EstimateReport r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.se = se;
    r.budget = budget;
    r.identity = identity;
    r.provenance = std::move(provenance);
    r.pass = report_verdict(r);
    return r;
}

bool report_verdict(const EstimateReport& r) {
    const double allowance = 3.0 * r.se + r.budget;
    return r.identity ? std::abs(r.lhs - r.rhs) <= allowance : r.lhs <= r.rhs + allowance;
}

EstimateReport check_ibp(int h, const CylinderFunction& phi, const CylinderFunction& psi,
                         const WeightedEnsemble& ens, const CompositePotential& pot,
                         std::string provenance) {
    if (h < 1 || h > pot.geometry.modes)
        throw std::out_of_range("check_ibp: direction index out of range");
    PotentialEval eval(pot);
    const double lambda_h = eigenvalue(pot.geometry, h);
    const int k = h - 1;
    Vec dU(pot.geometry.modes);
    const auto integrand = [&](const Vec& x) {
        const double p = phi.value(x), q = psi.value(x);
        double dhu = 0.0;
        if (!pot.profile.is_zero) {
            eval.drift_gradient(x, 0.0, dU);
            dhu = dU[k];
        }
        return d1_of(phi, x, k) * q + d1_of(psi, x, k) * p - 2.0 * dhu * p * q -
               x[k] * p * q / lambda_h;
    };
    const NuEstimate e = nu_expect(ens, integrand);
    return make_report("integration_by_parts[" + phi.name + "," + psi.name + ",h=" +
                           std::to_string(h) + "]",
                       e.value, 0.0, e.se, 0.0, true, std::move(provenance));
}

EstimateReport check_symmetry(const CylinderFunction& u, const CylinderFunction& v,
                              const WeightedEnsemble& ens, const CompositePotential& pot,
                              std::string provenance) {
    PotentialEval eval(pot);
    const int dmax = std::max(u.dims, v.dims);
    if (dmax > pot.geometry.modes)
        throw std::invalid_argument("check_symmetry: cylinder dimension exceeds truncation");
    Vec lambdas(dmax);
    for (int k = 0; k < dmax; ++k) lambdas[k] = eigenvalue(pot.geometry, k + 1);
    Vec dU(pot.geometry.modes);
    const auto integrand = [&](const Vec& x) {
        if (!pot.profile.is_zero) eval.drift_gradient(x, 0.0, dU);
        double ku = 0.0, grad_inner = 0.0;
        for (int k = 0; k < dmax; ++k) {
            const double du_k = d1_of(u, x, k);
            ku += 0.5 * d2_of(u, x, k) - 0.5 * x[k] / lambdas[k] * du_k;
            if (!pot.profile.is_zero) ku -= dU[k] * du_k;
            grad_inner += du_k * d1_of(v, x, k);
        }
        return ku * v.value(x) + 0.5 * grad_inner;
    };
    const NuEstimate e = nu_expect(ens, integrand);
    return make_report("dirichlet_symmetry[" + u.name + "," + v.name + "]", e.value, 0.0, e.se,
                       0.0, true, std::move(provenance));
}

EstimateReport check_poincare(const CylinderFunction& phi, const WeightedEnsemble& ens,
                              std::string provenance) {
    const double lambda1 = eigenvalue(ens.batch.spec, 1);
    const NuEstimate m1 = nu_expect(ens, [&](const Vec& x) { return phi.value(x); });
    // slack influence: (1/(2 omega)) ||D phi||^2 - (phi - m1)^2 with
    // omega = 1/(2 lambda_1), so the constant is exactly lambda_1.
    const auto slack_fn = [&](const Vec& x) {
        double grad2 = 0.0;
        for (int k = 0; k < phi.dims; ++k) {
            const double d = phi.d1(x, k);
            grad2 += d * d;
        }
        const double dev = phi.value(x) - m1.value;
        return lambda1 * grad2 - dev * dev;
    };
    const NuEstimate s = nu_expect(ens, slack_fn);
    // lhs = variance, rhs = weighted Dirichlet energy; report through the
    // slack estimate so the standard error covers both sides.
    const NuEstimate var =
        nu_expect(ens, [&](const Vec& x) {
            const double dev = phi.value(x) - m1.value;
            return dev * dev;
        });
    return make_report("poincare[" + phi.name + "]", var.value, var.value + s.value, s.se, 0.0,
                       false, std::move(provenance));
}

EstimateReport check_logsob(const CylinderFunction& phi, const WeightedEnsemble& ens,
                            std::string provenance) {
    const double lambda1 = eigenvalue(ens.batch.spec, 1);
    const double inv_omega = 2.0 * lambda1;
    const NuEstimate m2 = nu_expect(ens, [&](const Vec& x) {
        const double p = phi.value(x);
        return p * p;
    });
    if (m2.value <= 0.0)
        return make_report("log_sobolev[" + phi.name + "]", 0.0, 0.0, 0.0, 0.0, false,
                           std::move(provenance));
    const double log_m2 = std::log(m2.value);
    const auto slack_fn = [&](const Vec& x) {
        const double p = phi.value(x);
        const double p2 = p * p;
        double grad2 = 0.0;
        for (int k = 0; k < phi.dims; ++k) {
            const double d = phi.d1(x, k);
            grad2 += d * d;
        }
        const double entropy_term = (p2 > 0.0) ? p2 * std::log(p2) : 0.0;
        // First-order delta method: d/dm2 [m2 log m2] = log m2 + 1.
        return inv_omega * grad2 + (log_m2 + 1.0) * p2 - m2.value - entropy_term;
    };
    const NuEstimate s = nu_expect(ens, slack_fn);
    const NuEstimate entropy = nu_expect(ens, [&](const Vec& x) {
        const double p2 = phi.value(x) * phi.value(x);
        return (p2 > 0.0) ? p2 * std::log(p2) : 0.0;
    });
    return make_report("log_sobolev[" + phi.name + "]", entropy.value, entropy.value + s.value,
                       s.se, 0.0, false, std::move(provenance));
}

RegularityQuantities regularity_quantities(const WeightedGrid& grid, const EllipticSolution& sol) {
    RegularityQuantities q;
    const int total = grid.total();
    const int dim = grid.dim();
    const Vec& w = grid.weights();
    const double lambda = sol.lambda;

    q.int_u2 = grid.nu_inner(sol.u, sol.u);
    q.int_f2 = grid.nu_inner(sol.f, sol.f);
    q.inner_fu = grid.nu_inner(sol.f, sol.u);
    q.max_u = sol.u.cwiseAbs().maxCoeff();
    q.max_f = sol.f.cwiseAbs().maxCoeff();
    // <Du, Df> route, rewritten through the symmetrizing identity:
    // integral <Du,Df> dnu = -2 integral (K u) f dnu = 2 integral (f - lambda u) f dnu.
    q.rhs_identity = 0.0;
    for (int i = 0; i < total; ++i)
        q.rhs_identity += 2.0 * w[i] * (sol.f[i] - lambda * sol.u[i]) * sol.f[i];

    // Edge-based Dirichlet energy: form(u,u) = u^T (2 G_half) u.
    const SpMat g = stiffness(grid);
    q.int_du2 = sol.u.dot(g * sol.u);

    q.has_hessian_term = grid.has_hessian();
    for (int i = 0; i < total; ++i) {
        double qdu = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double lam_a = grid.sigma(a) * grid.sigma(a);
            qdu += sol.du(i, a) * sol.du(i, a) / lam_a;
        }
        q.int_qdu2 += w[i] * qdu;

        double tr = 0.0;
        for (int a = 0; a < dim; ++a) {
            const int up = grid.neighbor(i, a, +1);
            const int dn = grid.neighbor(i, a, -1);
            double daa = 0.0;
            if (up >= 0 && dn >= 0)
                daa = (sol.u[up] - 2.0 * sol.u[i] + sol.u[dn]) / (grid.h(a) * grid.h(a));
            tr += daa * daa;
            for (int b = a + 1; b < dim; ++b) {
                const int pp = (up >= 0) ? grid.neighbor(up, b, +1) : -1;
                const int pm = (up >= 0) ? grid.neighbor(up, b, -1) : -1;
                const int mp = (dn >= 0) ? grid.neighbor(dn, b, +1) : -1;
                const int mm = (dn >= 0) ? grid.neighbor(dn, b, -1) : -1;
                double dab = 0.0;
                if (pp >= 0 && pm >= 0 && mp >= 0 && mm >= 0)
                    dab = (sol.u[pp] - sol.u[pm] - sol.u[mp] + sol.u[mm]) /
                          (4.0 * grid.h(a) * grid.h(b));
                tr += 2.0 * dab * dab;
            }
        }
        q.int_tr_d2u2 += w[i] * tr;

        if (q.has_hessian_term) {
            const Mat hess = grid.potential_hessian(i);
            double acc = 0.0;
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) acc += hess(a, b) * sol.du(i, a) * sol.du(i, b);
            q.int_d2u_dudu += w[i] * acc;
        }
    }
    return q;
}

std::vector<EstimateReport> check_regularity_suite(const WeightedGrid& grid,
                                                   const EllipticSolution& sol,
                                                   const WeightedGrid& fine_grid,
                                                   const EllipticSolution& fine_sol,
                                                   std::string provenance) {
    const RegularityQuantities c = regularity_quantities(grid, sol);
    const RegularityQuantities f = regularity_quantities(fine_grid, fine_sol);
    const double lambda = sol.lambda;
    const auto hb = [](double coarse, double fine) {
        return 1.5 * std::abs(coarse - fine) + 1e-12 * std::abs(coarse);
    };

    std::vector<EstimateReport> reports;
    // Exact Galerkin identity: lambda ||u||^2 + (1/2) form(u,u) = <f,u>.
    reports.push_back(make_report("energy_identity", lambda * c.int_u2 + 0.5 * c.int_du2,
                                  c.inner_fu, 0.0, 1e-10 * std::abs(c.inner_fu) + 1e-14, true,
                                  provenance));
    reports.push_back(make_report("resolvent_l2_bound", c.int_u2, c.int_f2 / (lambda * lambda),
                                  0.0, 1e-12 * std::abs(c.int_f2), false, provenance));
    reports.push_back(make_report("gradient_l2_bound", c.int_du2, 2.0 * c.int_f2 / lambda, 0.0,
                                  1e-12 * std::abs(c.int_f2), false, provenance));

    const double lhs_identity = lambda * c.int_du2 + 0.5 * c.int_tr_d2u2 + 0.5 * c.int_qdu2 +
                                c.int_d2u_dudu;
    const double lhs_identity_fine = lambda * f.int_du2 + 0.5 * f.int_tr_d2u2 +
                                     0.5 * f.int_qdu2 + f.int_d2u_dudu;
    const double r_coarse = lhs_identity - c.rhs_identity;
    const double r_fine = lhs_identity_fine - f.rhs_identity;
    reports.push_back(make_report("second_order_identity", lhs_identity, c.rhs_identity, 0.0,
                                  1.5 * std::abs(r_coarse - r_fine) +
                                      1e-10 * std::abs(c.rhs_identity),
                                  true, provenance));

    reports.push_back(make_report("maximal_regularity_bound",
                                  lambda * c.int_du2 + 0.5 * c.int_tr_d2u2 + 0.5 * c.int_qdu2 +
                                      c.int_d2u_dudu,
                                  4.0 * c.int_f2, 0.0, hb(lhs_identity, lhs_identity_fine), false,
                                  provenance));
    reports.push_back(make_report("hessian_sobolev_bound", 0.5 * c.int_tr_d2u2 + c.int_qdu2,
                                  4.0 * c.int_f2, 0.0,
                                  hb(0.5 * c.int_tr_d2u2 + c.int_qdu2,
                                     0.5 * f.int_tr_d2u2 + f.int_qdu2),
                                  false, provenance));
    if (c.has_hessian_term)
        reports.push_back(make_report("convexity_gradient_bound", c.int_d2u_dudu, 4.0 * c.int_f2,
                                      0.0, hb(c.int_d2u_dudu, f.int_d2u_dudu), false, provenance));
    reports.push_back(make_report("sup_norm_bound", c.max_u, c.max_f / lambda, 0.0,
                                  1e-12 * std::abs(c.max_f), false, provenance));
    return reports;
}

EstimateReport check_my_gap_suite(const CompositePotential& pot, int draws, RngSpec rng_spec,
                                  std::string provenance) {
    PotentialEval eval(pot);
    SpectralBasis basis(pot.geometry);
    Rng rng(rng_spec);
    double worst = 0.0;
    for (int t = 0; t < draws; ++t) {
        Vec x(pot.geometry.modes);
        for (int k = 0; k < x.size(); ++k)
            x[k] = std::sqrt(basis.eigenvalue(k + 1)) * rng.normal();
        const double alpha = std::pow(10.0, -3.0 * rng.uniform());  // (1e-3, 1]
        const auto [diff, drop] = eval.my_gap(x, alpha);
        worst = std::max(worst, diff - drop);
    }
    return make_report("moreau_gradient_gap", worst, 0.0, 0.0, 1e-8, false,
                       std::move(provenance));
}

std::vector<EstimateReport> check_gaussian_moments(const BasisSpec& spec, int n, RngSpec rng,
                                                   std::string provenance) {
    std::vector<EstimateReport> out;
    const LpMomentReport m2 = check_lp_moment(spec, 2, 2, n, rng);
    if (spec.kind == Geometry::ReactionDiffusion) {
        out.push_back(make_report("second_moment_kernel", m2.estimate, m2.reference, m2.se,
                                  m2.truncation_budget, true, provenance));
        RngSpec rng4 = rng;
        rng4.stream += 1;
        const LpMomentReport m4 = check_lp_moment(spec, 2, 4, n, rng4);
        out.push_back(make_report("fourth_moment_wick", m4.estimate, m4.reference, m4.se,
                                  m4.truncation_budget, true, provenance));
    } else {
        out.push_back(make_report("lp_moment_envelope", m2.estimate, m2.reference, m2.se, 0.0,
                                  false, provenance));
    }
    return out;
}

EstimateReport check_fk_vs_galerkin(const ResolventQuery& q, const CompositePotential& pot,
                                    const WeightedGrid& grid, const EllipticSolution& sol,
                                    const std::vector<int>& nodes, double grid_budget,
                                    std::string provenance) {
    const CrossValidation cv = cross_validate(q, pot, grid, sol, nodes, grid_budget);
    return make_report("resolvent_cross_check", cv.max_discrepancy, 0.0, 0.0, cv.budget, false,
                       std::move(provenance));
}

}  // namespace kolmo
