#pragma once

#include <stdexcept>
#include <string>

namespace thermo {

// Validation failure carrying the offending field name (CLI maps these to exit code 2).
class validation_error : public std::invalid_argument {
public:
    validation_error(std::string field, const std::string& message)
        : std::invalid_argument(message), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class BathKind { bosonic, fermionic };

// Bath parameterization. Units: epsilon = k_B = hbar = 1.
//   bosonic:   Ohmic coupling, rate scale kappa(omega) = coupling * omega
//   fermionic: flat spectral density, rate scale Gamma = coupling
struct BathModel {
    BathKind kind = BathKind::bosonic;
    double coupling = 1.0;

    BathModel() = default;
    BathModel(BathKind k, double c) : kind(k), coupling(c) {
        if (!(coupling > 0.0)) throw validation_error("coupling", "bath coupling must be > 0");
    }
};

// Transition rates of the two-level probe and their analytic temperature derivatives.
// gamma_in excites (0 -> 1), gamma_out decays (1 -> 0); detailed balance
// gamma_in/gamma_out = exp(-omega/T) holds for both bath kinds.
struct TransitionRates {
    double gamma_in = 0.0;
    double gamma_out = 0.0;
    double dgamma_in_dT = 0.0;
    double dgamma_out_dT = 0.0;

    double total() const { return gamma_in + gamma_out; }
    // Steady-state excited-state occupation gamma_in / (gamma_in + gamma_out).
    double thermal_excited() const { return gamma_in / total(); }
};

TransitionRates rates(const BathModel& model, double omega, double temperature);

// Occupation p1(t) starting from p1_0, relaxing toward the steady state.
double occupation(double p1_0, const TransitionRates& r, double t);

} // namespace thermo
