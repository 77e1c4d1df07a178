#include "thermo/bath.hpp"

#include <cmath>

namespace thermo {

TransitionRates rates(const BathModel& model, double omega, double temperature) {
    if (!(omega > 0.0)) throw validation_error("gap", "gap must be > 0");
    if (!(temperature > 0.0)) throw validation_error("temperature", "temperature must be > 0");

    const double x = omega / temperature;
    TransitionRates r;
    if (model.kind == BathKind::bosonic) {
        // n_B = 1/(e^x - 1), dn_B/dT = e^x * (omega/T^2) / (e^x - 1)^2
        const double em1 = std::expm1(x);
        const double n = 1.0 / em1;
        const double dn = std::exp(x) * omega / (temperature * temperature) / (em1 * em1);
        const double kappa = model.coupling * omega;
        r.gamma_in = kappa * n;
        r.gamma_out = kappa * (n + 1.0);
        r.dgamma_in_dT = kappa * dn;
        r.dgamma_out_dT = kappa * dn;
    } else {
        // n_F = 1/(e^x + 1), dn_F/dT = e^x * (omega/T^2) / (e^x + 1)^2
        const double ex = std::exp(x);
        const double n = 1.0 / (ex + 1.0);
        const double dn = ex * omega / (temperature * temperature) / ((ex + 1.0) * (ex + 1.0));
        r.gamma_in = model.coupling * n;
        r.gamma_out = model.coupling * (1.0 - n);
        r.dgamma_in_dT = model.coupling * dn;
        r.dgamma_out_dT = -model.coupling * dn;
    }
    return r;
}

double occupation(double p1_0, const TransitionRates& r, double t) {
    const double s = r.total();
    const double pinf = r.gamma_in / s;
    return pinf + (p1_0 - pinf) * std::exp(-s * t);
}

} // namespace thermo
