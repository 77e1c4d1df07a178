#pragma once

#include "thermo/bath.hpp"

namespace thermo {

enum class FisherInit { fixed, thermal_steady_state };

// Fisher information of the trajectory distribution split into its three parts:
// initial-state term, transient (bounded-in-tau) term, and the tau-linear term.
struct FisherBreakdown {
    double initial_term = 0.0;
    double transient_term = 0.0;
    double linear_term = 0.0;
    double total() const { return initial_term + transient_term + linear_term; }
};

// Finite-time Fisher information of the jump-trajectory distribution.
// p1_0 is the initial excited-state probability (ignored for thermal init,
// where the steady-state occupation at (omega, T) is used).
FisherBreakdown fisher_finite_time(const BathModel& model, double omega, double temperature,
                                   double tau, double p1_0, FisherInit init);

// The tau-linear coefficient times tau (asymptotic Fisher information).
double fisher_long_time(const BathModel& model, double omega, double temperature, double tau);

// Fisher information of the steady-state initial occupation alone.
double fisher_initial_state(const BathModel& model, double omega, double temperature);

// Closed-form Fisher information of the time-discretized trajectory distribution
// (N steps of length dt, exact two-state transition probabilities per step).
// Serves as the independent oracle for fisher_finite_time as dt -> 0.
double fisher_discrete(const BathModel& model, double omega, double temperature,
                       double dt, long n_steps, double p1_0, FisherInit init);

// Dimensionless asymptotic information rate g(x), x = omega/T, defined by
//   bosonic:   T^2 F = coupling * tau * T * g(x)
//   fermionic: T^2 F = coupling * tau * g(x)
double fisher_rate_bosonic(double x);
double fisher_rate_fermionic(double x);

} // namespace thermo
