#include "kolmo/sde.hpp"

#include <cmath>
#include <stdexcept>

namespace kolmo {

void validate_config(const SdeConfig& cfg, const BasisSpec& spec) {
    if (cfg.dt <= 0.0) throw std::invalid_argument("sde: dt must be positive");
    if (cfg.horizon < 0.0) throw std::invalid_argument("sde: horizon must be nonnegative");
    if (cfg.dt > cfg.horizon && cfg.horizon > 0.0)
        throw std::invalid_argument("sde: dt must not exceed the horizon");
    if (cfg.alpha < 0.0) throw std::invalid_argument("sde: alpha must be nonnegative");
    if (cfg.scheme == Scheme::ExplicitEM) {
        const double lambda_min = eigenvalue(spec, spec.modes);
        if (cfg.dt >= 4.0 * lambda_min)
            throw std::invalid_argument("sde: explicit scheme unstable, need dt < 4*lambda_N = " +
                                        std::to_string(4.0 * lambda_min));
    }
}

SdeEngine::SdeEngine(const CompositePotential& pot, SdeConfig cfg) : eval_(pot), cfg_(cfg) {
    validate_config(cfg_, pot.geometry);
    steps_ = (cfg_.horizon == 0.0) ? 0 : static_cast<int>(std::ceil(cfg_.horizon / cfg_.dt - 1e-12));
    const int n = pot.geometry.modes;
    drift_.resize(n);
    inv_factor_.resize(n);
    decay_rate_.resize(n);
    for (int k = 0; k < n; ++k) {
        decay_rate_[k] = 1.0 / (2.0 * eval_.basis().eigenvalue(k + 1));
        inv_factor_[k] = 1.0 / (1.0 + cfg_.dt * decay_rate_[k]);
    }
}

void SdeEngine::step_inplace(Vec& state, const Vec& noise) {
    const double dt = cfg_.dt;
    const double sq = std::sqrt(dt);
    eval_.drift_gradient(state, cfg_.alpha, drift_);
    if (cfg_.scheme == Scheme::SemiImplicitLinear) {
        for (int k = 0; k < state.size(); ++k)
            state[k] = (state[k] - dt * drift_[k] + sq * noise[k]) * inv_factor_[k];
    } else {
        for (int k = 0; k < state.size(); ++k)
            state[k] += dt * (-decay_rate_[k] * state[k] - drift_[k]) + sq * noise[k];
    }
}

Vec SdeEngine::step(const Vec& state, const Vec& noise) {
    if (noise.size() != state.size()) throw std::invalid_argument("step: noise length mismatch");
    Vec out = state;
    step_inplace(out, noise);
    return out;
}

Vec SdeEngine::simulate(const Vec& x0, const std::function<void(int, double, const Vec&)>& observer) {
    Rng rng(cfg_.rng);
    return simulate_with(x0, rng, observer);
}

Vec SdeEngine::simulate_with(const Vec& x0, Rng& rng,
                             const std::function<void(int, double, const Vec&)>& observer) {
    Vec state = x0;
    Vec noise(x0.size());
    if (observer) observer(0, 0.0, state);
    for (int s = 1; s <= steps_; ++s) {
        for (int k = 0; k < noise.size(); ++k) noise[k] = rng.normal();
        step_inplace(state, noise);
        if (observer) observer(s, s * cfg_.dt, state);
    }
    return state;
}

double contractivity_ratio(const Vec& x, const Vec& y, const CompositePotential& pot,
                           const SdeConfig& cfg) {
    const double dist0 = (x - y).norm();
    if (dist0 == 0.0) throw std::invalid_argument("contractivity_ratio: x and y coincide");
    SdeEngine ex(pot, cfg), ey(pot, cfg);
    Rng rng(cfg.rng);
    Vec a = x, b = y;
    Vec noise(x.size());
    for (int s = 0; s < ex.steps(); ++s) {
        for (int k = 0; k < noise.size(); ++k) noise[k] = rng.normal();
        ex.step_inplace(a, noise);
        ey.step_inplace(b, noise);
    }
    return (a - b).norm() / dist0;
}

}  // namespace kolmo
