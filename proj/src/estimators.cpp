#include "thermo/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "thermo/optimize.hpp"

namespace thermo {

double estimate_relative(const Posterior& post) {
    const double num = post.expect([](double t) { return 1.0 / t; });
    const double den = post.expect([](double t) { return 1.0 / (t * t); });
    return num / den;
}

double estimate_mean(const Posterior& post) {
    return post.expect([](double t) { return t; });
}

double estimate_log(const Posterior& post) {
    return std::exp(post.expect([](double t) { return std::log(t); }));
}

double estimate_ml(const Trajectory& traj, const BathModel& model, double omega) {
    const SufficientStats s = sufficient_stats(traj);
    if (model.kind == BathKind::bosonic) {
        if (s.k == 0) return 0.0; // frozen probe: coldest compatible temperature
        const double kappa_t = model.coupling * omega * traj.horizon;
        const double jumps = static_cast<double>(s.k + s.l);
        const double c = jumps - kappa_t;
        const double n = (c + std::sqrt(c * c + 4.0 * static_cast<double>(s.k) * kappa_t)) / (2.0 * kappa_t);
        return omega / std::log((1.0 + n) / n);
    }
    // Fermionic: no closed form; maximize the fixed-init log-likelihood over ln T.
    if (s.k == 0) return 0.0;
    const auto neg_ll = [&](double log_t) {
        const TransitionRates r = rates(model, omega, std::exp(log_t));
        return -log_likelihood_stats(s, traj.horizon, r, 0.0);
    };
    const MinimizeResult res =
        brent_minimize(neg_ll, std::log(1e-6 * omega), std::log(1e6 * omega), 1e-10);
    return std::exp(res.x);
}

double estimate_mp(const Trajectory& traj, const BathModel& model, double omega,
                   const TemperatureGrid& grid) {
    return std::clamp(estimate_ml(traj, model, omega), grid.t_min(), grid.t_max());
}

double posterior_relative_cost(const Posterior& post, double t_est) {
    return post.expect([t_est](double t) {
        const double d = (t_est - t) / t;
        return d * d;
    });
}

double posterior_absolute_cost(const Posterior& post, double t_est) {
    return post.expect([t_est](double t) {
        const double d = t_est - t;
        return d * d;
    });
}

double posterior_log_cost(const Posterior& post, double t_est) {
    const double l = std::log(t_est);
    return post.expect([l](double t) {
        const double d = l - std::log(t);
        return d * d;
    });
}

} // namespace thermo
