#include "kolmo/measure.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace kolmo {

namespace {
constexpr double kPi = std::numbers::pi;
}  // namespace

SampleBatch sample_mu(const BasisSpec& spec, int n, RngSpec rng_spec) {
    if (n < 1) throw std::invalid_argument("sample_mu: need at least one sample");
    SpectralBasis basis(spec);
    Rng rng(rng_spec);
    SampleBatch batch{spec, Mat(n, spec.modes), rng_spec};
    Vec scale(spec.modes);
    for (int k = 0; k < spec.modes; ++k) scale[k] = std::sqrt(basis.eigenvalue(k + 1));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < spec.modes; ++k) batch.coeffs(i, k) = scale[k] * rng.normal();
    return batch;
}

WeightedEnsemble weight(const SampleBatch& batch, const CompositePotential& pot) {
    if (batch.spec.kind != pot.geometry.kind || batch.spec.modes != pot.geometry.modes)
        throw std::invalid_argument("weight: batch and potential geometry mismatch");
    PotentialEval eval(pot);
    const int n = batch.size();
    WeightedEnsemble ens;
    ens.batch = batch;
    ens.inf_phi = pot.profile.lower_bound;
    ens.shifted_weights.resize(n);

    Vec state(batch.spec.modes);
    for (int i = 0; i < n; ++i) {
        state = batch.coeffs.row(i).transpose();
        const double u = eval.u_value(state);
        ens.shifted_weights[i] = std::exp(-2.0 * (u - ens.inf_phi));
    }

    std::vector<double> w(ens.shifted_weights.data(), ens.shifted_weights.data() + n);
    const double mean_shifted = pairwise_mean(w);
    ens.z_hat = mean_shifted * std::exp(-2.0 * ens.inf_phi);
    std::vector<double> w2(n);
    for (int i = 0; i < n; ++i) w2[i] = w[i] * w[i];
    const double sum_w = mean_shifted * n;
    const double sum_w2 = pairwise_sum(w2);
    ens.ess = sum_w * sum_w / sum_w2;
    return ens;
}

NuEstimate nu_expect(const WeightedEnsemble& ens, const std::function<double(const Vec&)>& g) {
    const int n = ens.size();
    if (ens.ess < 2.0) throw std::runtime_error("nu_expect: degenerate ensemble (ESS < 2)");
    std::vector<double> wg(n), w(n);
    Vec state(ens.batch.spec.modes);
    for (int i = 0; i < n; ++i) {
        state = ens.batch.coeffs.row(i).transpose();
        w[i] = ens.shifted_weights[i];
        wg[i] = w[i] * g(state);
    }
    const double sum_w = pairwise_sum(w);
    const double sum_wg = pairwise_sum(wg);
    NuEstimate out;
    out.value = sum_wg / sum_w;
    std::vector<double> dev(n);
    for (int i = 0; i < n; ++i) {
        const double d = wg[i] / w[i] - out.value;
        dev[i] = w[i] * w[i] * d * d;
    }
    out.se = std::sqrt(pairwise_sum(dev)) / sum_w;
    out.ess = ens.ess;
    out.low_ess_warning = ens.ess < 30.0;
    return out;
}

double truncated_second_moment(const BasisSpec& spec) {
    double acc = 0.0;
    for (int k = 1; k <= spec.modes; ++k) {
        const double lk = eigenvalue(spec, k);
        const double realized_norm_sq =
            (spec.kind == Geometry::CahnHilliard) ? (kPi * k) * (kPi * k) : 1.0;
        acc += lk * realized_norm_sq;
    }
    return acc;
}

LpMomentReport check_lp_moment(const BasisSpec& spec, int p, int q, int n, RngSpec rng) {
    if ((p != 2 && p != 4 && p != 6 && p != 8) || (q != 2 && q != 4 && q != 6 && q != 8))
        throw std::invalid_argument("check_lp_moment: p, q must lie in {2,4,6,8}");

    SpectralBasis basis(spec);
    const SampleBatch batch = sample_mu(spec, n, rng);
    std::vector<double> vals(n);
    if (p == 2) {
        for (int i = 0; i < n; ++i) {
            double s2 = 0.0;
            for (int k = 0; k < spec.modes; ++k) {
                const double c = batch.coeffs(i, k);
                const double scale =
                    (spec.kind == Geometry::CahnHilliard) ? (kPi * (k + 1)) : 1.0;
                s2 += scale * scale * c * c;
            }
            vals[i] = std::pow(s2, q / 2.0);
        }
    } else {
        Vec state(spec.modes);
        for (int i = 0; i < n; ++i) {
            state = batch.coeffs.row(i).transpose();
            const Vec g = basis.synthesize(state);
            double acc = 0.0;
            for (int j = 0; j < g.size(); ++j) acc += std::pow(std::abs(g[j]), p);
            acc /= static_cast<double>(g.size());
            vals[i] = std::pow(acc, static_cast<double>(q) / p);
        }
    }

    LpMomentReport rep;
    rep.p = p;
    rep.q = q;
    rep.estimate = pairwise_mean(vals);
    std::vector<double> dev(n);
    for (int i = 0; i < n; ++i) dev[i] = (vals[i] - rep.estimate) * (vals[i] - rep.estimate);
    rep.se = std::sqrt(pairwise_sum(dev) / (static_cast<double>(n) * (n - 1.0)));

    const double trunc2 = truncated_second_moment(spec);
    if (p == 2 && q == 2 && spec.kind == Geometry::ReactionDiffusion) {
        rep.reference = 1.0 / 12.0;  // integral of the kernel diagonal
        rep.truncation_budget = rep.reference - trunc2;
        rep.pass = std::abs(rep.estimate - rep.reference) <= 3.0 * rep.se + rep.truncation_budget;
    } else if (p == 2 && q == 4 && spec.kind == Geometry::ReactionDiffusion) {
        // Wick: E (int x^2)^2 = (tr Q)^2 + 2 tr Q^2; full-series value 1/80.
        double tr2 = 0.0;
        for (int k = 1; k <= spec.modes; ++k) tr2 += eigenvalue(spec, k) * eigenvalue(spec, k);
        const double truncated_ref = trunc2 * trunc2 + 2.0 * tr2;
        rep.reference = 1.0 / 80.0;
        rep.truncation_budget = rep.reference - truncated_ref;
        rep.pass = std::abs(rep.estimate - rep.reference) <= 3.0 * rep.se + rep.truncation_budget;
    } else if (p == 2 && q == 2 && spec.kind == Geometry::CahnHilliard) {
        rep.reference = 1.0 / 6.0;  // series envelope sum 1/(pi^2 k^2)
        rep.reference_is_bound = true;
        rep.pass = rep.estimate <= rep.reference + 3.0 * rep.se;
    } else {
        rep.reference = std::numeric_limits<double>::quiet_NaN();
        rep.pass = std::isfinite(rep.estimate);
    }
    return rep;
}

void export_ensemble_csv(const WeightedEnsemble& ens, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_ensemble_csv: cannot open " + path);
    out.precision(17);
    for (int k = 1; k <= ens.batch.spec.modes; ++k) out << "c_" << k << ",";
    out << "weight\n";
    for (int i = 0; i < ens.size(); ++i) {
        for (int k = 0; k < ens.batch.spec.modes; ++k) out << ens.batch.coeffs(i, k) << ",";
        out << ens.weight(i) << "\n";
    }
}

std::string ensemble_manifest_json(const WeightedEnsemble& ens) {
    std::ostringstream out;
    out.precision(17);
    out << "{\"kind\":\""
        << (ens.batch.spec.kind == Geometry::ReactionDiffusion ? "reaction_diffusion"
                                                               : "cahn_hilliard")
        << "\",\"modes\":" << ens.batch.spec.modes << ",\"grid\":" << ens.batch.spec.grid_points
        << ",\"seed\":" << ens.batch.rng.seed << ",\"stream\":" << ens.batch.rng.stream
        << ",\"samples\":" << ens.size() << ",\"z_hat\":" << ens.z_hat << ",\"ess\":" << ens.ess
        << "}";
    return out.str();
}

}  // namespace kolmo
