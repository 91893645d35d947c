#pragma once

#include <string>
#include <vector>

#include "kolmo/feynman_kac.hpp"
#include "kolmo/functionals.hpp"
#include "kolmo/galerkin.hpp"
#include "kolmo/measure.hpp"

namespace kolmo {

/// Structured pass/fail record for one inequality or identity. The verdict
/// is a pure function of the stored numbers: identities pass when
/// |lhs - rhs| <= 3 se + budget, inequalities when lhs <= rhs + 3 se + budget.
struct EstimateReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double se = 0.0;      // 0 for deterministic checks
    double budget = 0.0;  // discretization / truncation allowance
    bool identity = false;
    bool pass = false;
    std::string provenance;

    double slack() const { return rhs - lhs; }
};

EstimateReport make_report(std::string name, double lhs, double rhs, double se, double budget,
                           bool identity, std::string provenance);

/// Recompute the verdict from the stored fields (no hidden state).
bool report_verdict(const EstimateReport& r);

/// Monte Carlo residual of the nu integration-by-parts identity in
/// direction h (1-based): E[D_h phi psi + D_h psi phi - 2 D_h U phi psi
/// - x_h phi psi / lambda_h] = 0.
EstimateReport check_ibp(int h, const CylinderFunction& phi, const CylinderFunction& psi,
                         const WeightedEnsemble& ens, const CompositePotential& pot,
                         std::string provenance = {});

/// Monte Carlo residual of the symmetrizing identity
/// E[K u v + (1/2) <Du, Dv>] = 0 for cylindrical u, v.
EstimateReport check_symmetry(const CylinderFunction& u, const CylinderFunction& v,
                              const WeightedEnsemble& ens, const CompositePotential& pot,
                              std::string provenance = {});

/// Var_nu(phi) <= (1/(2 omega)) E||D phi||^2 with omega = 1/(2 lambda_1),
/// the first spectral gap of the linear part.
EstimateReport check_poincare(const CylinderFunction& phi, const WeightedEnsemble& ens,
                              std::string provenance = {});

/// E[phi^2 log phi^2] <= (1/omega) E||D phi||^2 + E[phi^2] log E[phi^2].
EstimateReport check_logsob(const CylinderFunction& phi, const WeightedEnsemble& ens,
                            std::string provenance = {});

/// Discrete nu-integrals of the solution functionals entering the maximal
/// regularity statements.
struct RegularityQuantities {
    double int_u2 = 0.0;
    double int_du2 = 0.0;      // form(u,u), edge-based
    double int_qdu2 = 0.0;     // sum lambda_k^{-1} (D_k u)^2
    double int_tr_d2u2 = 0.0;  // Tr[(D^2 u)^2]
    double int_d2u_dudu = 0.0; // <D^2 U Du, Du>, 0 when phi'' unavailable
    double int_f2 = 0.0;
    double rhs_identity = 0.0;  // 2 integral (lambda u - f) f
    double inner_fu = 0.0;
    double max_u = 0.0;
    double max_f = 0.0;
    bool has_hessian_term = false;
};

RegularityQuantities regularity_quantities(const WeightedGrid& grid, const EllipticSolution& sol);

/// The full bound suite for one solve; `fine` at doubled resolution supplies
/// the h-halving budgets (budget = 1.5 |coarse - fine| per quantity).
std::vector<EstimateReport> check_regularity_suite(const WeightedGrid& grid,
                                                   const EllipticSolution& sol,
                                                   const WeightedGrid& fine_grid,
                                                   const EllipticSolution& fine_sol,
                                                   std::string provenance = {});

/// Moreau gradient gap ||DU_a - DU||^2 <= ||DU||^2 - ||DU_a||^2 on random
/// mu-draws and alpha in (0, 1]; reports the worst violation.
EstimateReport check_my_gap_suite(const CompositePotential& pot, int draws, RngSpec rng,
                                  std::string provenance = {});

/// Second and fourth moment of the squared L2 norm under mu against the
/// covariance-kernel values (exact truncation tails as budget).
std::vector<EstimateReport> check_gaussian_moments(const BasisSpec& spec, int n, RngSpec rng,
                                                   std::string provenance = {});

/// Resolvent cross-check: Monte Carlo vs Galerkin at selected nodes.
EstimateReport check_fk_vs_galerkin(const ResolventQuery& q, const CompositePotential& pot,
                                    const WeightedGrid& grid, const EllipticSolution& sol,
                                    const std::vector<int>& nodes, double grid_budget,
                                    std::string provenance = {});

}  // namespace kolmo
