#pragma once

#include <functional>
#include <string>

#include "kolmo/potential.hpp"
#include "kolmo/rng.hpp"
#include "kolmo/spectral.hpp"

namespace kolmo {

/// Monte Carlo draws from the Gaussian measure mu = N(0, Q), stored one
/// sample per row in the coefficient basis.
struct SampleBatch {
    BasisSpec spec;
    Mat coeffs;  // n_samples x modes
    RngSpec rng;

    int size() const { return static_cast<int>(coeffs.rows()); }
    Vec state(int i) const { return coeffs.row(i).transpose(); }
};

/// Importance-weighted ensemble targeting nu = Z^{-1} e^{-2U} mu. Weights are
/// stored shifted by exp(2*inf(phi)) so they live in (0, 1]; z_hat and the
/// reported weights undo the shift.
struct WeightedEnsemble {
    SampleBatch batch;
    Vec shifted_weights;  // exp(-2(U - inf phi)) in (0,1]
    double inf_phi = 0.0;
    double z_hat = 1.0;  // mean of exp(-2U)
    double ess = 0.0;    // (sum w)^2 / sum w^2

    double weight(int i) const { return shifted_weights[i] * std::exp(-2.0 * inf_phi); }
    int size() const { return batch.size(); }
};

struct NuEstimate {
    double value = 0.0;
    double se = 0.0;
    double ess = 0.0;
    bool low_ess_warning = false;
};

/// Draw n independent states with c_k = sqrt(lambda_k) * zeta_k. The draw
/// order (sample-major, ascending mode) is part of the reproducibility
/// contract.
SampleBatch sample_mu(const BasisSpec& spec, int n, RngSpec rng);

/// Attach e^{-2U} importance weights; overflow-safe through the inf-phi shift.
WeightedEnsemble weight(const SampleBatch& batch, const CompositePotential& pot);

/// Self-normalized importance estimate of E_nu[g] with a delta-method
/// standard error. ESS below 2 is an error; below 30 sets the warning flag.
NuEstimate nu_expect(const WeightedEnsemble& ens, const std::function<double(const Vec&)>& g);

struct LpMomentReport {
    int p = 2, q = 2;
    double estimate = 0.0;
    double se = 0.0;
    double reference = 0.0;  // closed-form or bound; NaN when none applies
    double truncation_budget = 0.0;
    bool reference_is_bound = false;
    bool pass = true;
};

/// Monte Carlo E ||x||_{L^p}^q under mu with p,q in {2,4,6,8}. For p=q=2 the
/// ReactionDiffusion estimate is compared against the kernel integral 1/12
/// (with the exact truncation tail as budget); the Cahn-Hilliard case is
/// checked against the series envelope bound.
LpMomentReport check_lp_moment(const BasisSpec& spec, int p, int q, int n, RngSpec rng);

/// Exact truncated trace: sum of the first N eigenvalues times the squared
/// L2 norms of the realized basis functions (= E integral x^2 under mu).
double truncated_second_moment(const BasisSpec& spec);

/// Columnar CSV (c_1..c_N, weight) plus a JSON manifest string with spec,
/// seed, counts, z_hat and ESS.
void export_ensemble_csv(const WeightedEnsemble& ens, const std::string& path);
std::string ensemble_manifest_json(const WeightedEnsemble& ens);

}  // namespace kolmo
