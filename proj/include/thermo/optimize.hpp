#pragma once

#include <functional>

namespace thermo {

struct MinimizeResult {
    double x = 0.0;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Bounded derivative-free 1-D minimization: golden-section with parabolic
// acceleration (Brent). Deterministic; tol is the absolute x tolerance.
MinimizeResult brent_minimize(const std::function<double(double)>& f, double a, double b,
                              double tol, int max_iter = 200);

} // namespace thermo
