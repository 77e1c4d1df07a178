#pragma once

#include "thermo/posterior.hpp"

namespace thermo {

// Minimizer of the presumed relative error: (integral rho/T) / (integral rho/T^2).
double estimate_relative(const Posterior& post);

// Posterior mean (minimizes the absolute quadratic cost).
double estimate_mean(const Posterior& post);

// exp(integral rho ln T) (minimizes the quadratic logarithmic cost).
double estimate_log(const Posterior& post);

// Maximum-likelihood temperature. Bosonic: closed form from (k, l, tau1); returns 0
// when no up-jump was observed (the coldest compatible temperature; callers clamp
// via estimate_mp). Fermionic: bounded numeric maximization of the log-likelihood.
double estimate_ml(const Trajectory& traj, const BathModel& model, double omega);

// ML clamped into the prior box [t_min, t_max].
double estimate_mp(const Trajectory& traj, const BathModel& model, double omega,
                   const TemperatureGrid& grid);

// Presumed costs of announcing t_est under the posterior.
double posterior_relative_cost(const Posterior& post, double t_est); // E[((t_est - T)/T)^2]
double posterior_absolute_cost(const Posterior& post, double t_est); // E[(t_est - T)^2]
double posterior_log_cost(const Posterior& post, double t_est);      // E[(ln t_est - ln T)^2]

} // namespace thermo
