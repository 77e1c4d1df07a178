#include "thermo/kernels.hpp"

namespace thermo::kernels {

// Reference kernels. Evaluation order is the contract: every SIMD variant must
// perform the same roundings in the same order per element.

namespace {

void mm_step_scalar(double* p0, double* p1, const double* k00, const double* k01,
                    const double* k10, const double* k11, double w0, double w1, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double a = (k00[i] * p0[i] + k01[i] * p1[i]) * w0;
        const double b = (k10[i] * p0[i] + k11[i] * p1[i]) * w1;
        p0[i] = a;
        p1[i] = b;
    }
}

void relax_scalar(double* q1, const double* p1, const double* pinf, const double* decay,
                  std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) q1[i] = pinf[i] + (p1[i] - pinf[i]) * decay[i];
}

void weight_update_scalar(double* w, const double* q1, double base, double coeff, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) w[i] = w[i] * (base + coeff * q1[i]);
}

void occupation_update_scalar(double* p1, const double* q1, double gain, double c1, double c2,
                              std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double q = q1[i];
        p1[i] = q + gain * q * (1.0 - q) * (c1 - c2 * q);
    }
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{"scalar", mm_step_scalar, relax_scalar, weight_update_scalar,
                                   occupation_update_scalar};
    return table;
}

} // namespace thermo::kernels
