#pragma once

#include "thermo/fisher.hpp"
#include "thermo/grid.hpp"

namespace thermo {

enum class CrbFisher { long_time, finite_time_thermal };

// Bayesian Cramer-Rao bound for the flat prior on the grid support:
//   integral dT rho(T) / (T^2 F(T; omega, tau)).
double crb_integral(const BathModel& model, double omega, double tau,
                    const TemperatureGrid& grid, CrbFisher which = CrbFisher::long_time);

// Same bound with the gap tuned per temperature to maximize T^2 F:
//   integral dT rho(T) / (c* rate tau T-scaling).
double crb_adaptive_integral(const BathModel& model, double tau, const TemperatureGrid& grid,
                             double c_star);

} // namespace thermo
