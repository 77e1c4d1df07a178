#pragma once

#include "thermo/bath.hpp"
#include "thermo/trajectory.hpp"

namespace thermo {

// log p(n0 | T) for the chosen initial-state model: 0 for a fixed (known) state,
// log of the steady-state occupation for the thermal model.
double log_initial_prob(int n0, const TransitionRates& r, InitMode init);

// Exact trajectory log-density at candidate temperature T (Markov jump process
// with constant gap): log p_{n0} + k ln gamma_in + l ln gamma_out
//                     - gamma_in (tau - tau1) - gamma_out tau1.
// Returns -inf when T is outside (0, inf).
double log_likelihood(const Trajectory& traj, const BathModel& model, double omega,
                      double temperature, InitMode init);

// Same density evaluated from precomputed sufficient statistics; entry-state
// handling is the caller's: pass log_p_init = 0 for a known entry state.
double log_likelihood_stats(const SufficientStats& stats, double duration,
                            const TransitionRates& r, double log_p_init);

} // namespace thermo
