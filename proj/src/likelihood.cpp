#include "thermo/likelihood.hpp"

#include <cmath>
#include <limits>

namespace thermo {

double log_initial_prob(int n0, const TransitionRates& r, InitMode init) {
    if (init != InitMode::thermal) return 0.0;
    const double p1 = r.thermal_excited();
    return std::log(n0 == 1 ? p1 : 1.0 - p1);
}

double log_likelihood_stats(const SufficientStats& stats, double duration,
                            const TransitionRates& r, double log_p_init) {
    return log_p_init + static_cast<double>(stats.k) * std::log(r.gamma_in) +
           static_cast<double>(stats.l) * std::log(r.gamma_out) -
           r.gamma_in * (duration - stats.tau1) - r.gamma_out * stats.tau1;
}

double log_likelihood(const Trajectory& traj, const BathModel& model, double omega,
                      double temperature, InitMode init) {
    if (!(temperature > 0.0) || !std::isfinite(temperature))
        return -std::numeric_limits<double>::infinity();
    const TransitionRates r = rates(model, omega, temperature);
    const SufficientStats stats = sufficient_stats(traj);
    return log_likelihood_stats(stats, traj.horizon, r, log_initial_prob(traj.n0, r, init));
}

} // namespace thermo
