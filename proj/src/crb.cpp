#include "thermo/crb.hpp"

namespace thermo {

double crb_integral(const BathModel& model, double omega, double tau,
                    const TemperatureGrid& grid, CrbFisher which) {
    // Interval priors are flat; a single-node grid is a point measure of mass 1.
    const double prior = grid.size() == 1 ? 1.0 : 1.0 / (grid.t_max() - grid.t_min());
    return grid.integrate([&](double t) {
        const double f = (which == CrbFisher::long_time)
                             ? fisher_long_time(model, omega, t, tau)
                             : fisher_finite_time(model, omega, t, tau, 0.0,
                                                  FisherInit::thermal_steady_state)
                                   .total();
        return prior / (t * t * f);
    });
}

double crb_adaptive_integral(const BathModel& model, double tau, const TemperatureGrid& grid,
                             double c_star) {
    const double prior = grid.size() == 1 ? 1.0 : 1.0 / (grid.t_max() - grid.t_min());
    const double rate_tau = model.coupling * tau;
    return grid.integrate([&](double t) {
        const double t2f = (model.kind == BathKind::bosonic) ? c_star * rate_tau * t
                                                             : c_star * rate_tau;
        return prior / t2f;
    });
}

} // namespace thermo
