#include "thermo/fisher.hpp"

#include <cmath>

namespace thermo {

namespace {

double initial_state_fisher(const TransitionRates& r) {
    const double s = r.total();
    const double num = r.dgamma_out_dT * r.gamma_in - r.gamma_out * r.dgamma_in_dT;
    return num * num / (r.gamma_out * r.gamma_in * s * s);
}

} // namespace

FisherBreakdown fisher_finite_time(const BathModel& model, double omega, double temperature,
                                   double tau, double p1_0, FisherInit init) {
    if (!(tau >= 0.0)) throw validation_error("tau", "tau must be >= 0");
    const TransitionRates r = rates(model, omega, temperature);
    const double s = r.total();

    double p1 = p1_0;
    FisherBreakdown out;
    if (init == FisherInit::thermal_steady_state) {
        p1 = r.thermal_excited();
        out.initial_term = initial_state_fisher(r);
    }
    const double p0 = 1.0 - p1;

    const double a = r.dgamma_in_dT * r.dgamma_in_dT / r.gamma_in;
    const double b = r.dgamma_out_dT * r.dgamma_out_dT / r.gamma_out;

    out.linear_term = (r.gamma_in * r.gamma_out * tau / s) *
                      ((r.dgamma_in_dT / r.gamma_in) * (r.dgamma_in_dT / r.gamma_in) +
                       (r.dgamma_out_dT / r.gamma_out) * (r.dgamma_out_dT / r.gamma_out));
    out.transient_term = -std::expm1(-s * tau) * (r.gamma_in * p0 - r.gamma_out * p1) / (s * s) * (a - b);
    return out;
}

double fisher_long_time(const BathModel& model, double omega, double temperature, double tau) {
    const TransitionRates r = rates(model, omega, temperature);
    const double s = r.total();
    return (r.gamma_in * r.gamma_out * tau / s) *
           ((r.dgamma_in_dT / r.gamma_in) * (r.dgamma_in_dT / r.gamma_in) +
            (r.dgamma_out_dT / r.gamma_out) * (r.dgamma_out_dT / r.gamma_out));
}

double fisher_initial_state(const BathModel& model, double omega, double temperature) {
    return initial_state_fisher(rates(model, omega, temperature));
}

double fisher_discrete(const BathModel& model, double omega, double temperature,
                       double dt, long n_steps, double p1_0, FisherInit init) {
    if (!(dt > 0.0)) throw validation_error("dt", "dt must be > 0");
    if (n_steps < 0) throw validation_error("n", "step count must be >= 0");
    const TransitionRates r = rates(model, omega, temperature);
    const double s = r.total();
    const double ds = r.dgamma_in_dT + r.dgamma_out_dT;

    double p1 = p1_0;
    double f_init = 0.0;
    if (init == FisherInit::thermal_steady_state) {
        p1 = r.thermal_excited();
        f_init = initial_state_fisher(r);
    }
    if (n_steps == 0) return f_init;
    const double p0 = 1.0 - p1;

    // Exact one-step transition probabilities and their analytic T-derivatives:
    //   a = P(1|0) = (gamma_in/S)(1 - e^{-S dt}),  b = P(0|1) = (gamma_out/S)(1 - e^{-S dt})
    const double decay = std::exp(-s * dt);
    const double one_minus = -std::expm1(-s * dt);
    const double d_one_minus = dt * ds * decay;
    const double a = (r.gamma_in / s) * one_minus;
    const double b = (r.gamma_out / s) * one_minus;
    const double da = ((r.dgamma_in_dT * s - r.gamma_in * ds) / (s * s)) * one_minus +
                      (r.gamma_in / s) * d_one_minus;
    const double db = ((r.dgamma_out_dT * s - r.gamma_out * ds) / (s * s)) * one_minus +
                      (r.gamma_out / s) * d_one_minus;

    // Per-step Fisher terms given the pre-step state.
    const double j0 = da * da / (a * (1.0 - a));
    const double j1 = db * db / (b * (1.0 - b));

    // Sum over steps of the pre-step occupation probabilities.
    const double n = static_cast<double>(n_steps);
    const double geom = (decay == 1.0) ? n : (1.0 - std::pow(decay, n)) / (1.0 - decay);
    const double dev = (r.gamma_in * p0 - r.gamma_out * p1) / s; // p0 - gamma_out/S
    const double sum_p0 = n * r.gamma_out / s + dev * geom;
    const double sum_p1 = n * r.gamma_in / s - dev * geom;

    return j0 * sum_p0 + j1 * sum_p1 + f_init;
}

double fisher_rate_bosonic(double x) {
    const double sh = std::sinh(0.5 * x);
    return x * x * x * std::cosh(x) / (8.0 * sh * sh * sh * std::cosh(0.5 * x));
}

double fisher_rate_fermionic(double x) {
    const double ch = std::cosh(0.5 * x);
    return x * x * std::cosh(x) / (8.0 * ch * ch * ch * ch);
}

} // namespace thermo
