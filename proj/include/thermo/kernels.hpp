#pragma once

#include <cstddef>
#include <string>

namespace thermo::kernels {

// Elementwise inner loops of the detector filters, dispatched at runtime to the
// best instruction set. Kernels are pure mul/add/sub with a fixed evaluation
// order and no in-kernel reductions or transcendentals, so every variant is
// bit-identical to the scalar reference (the library builds with
// -ffp-contract=off to keep FMA contraction from breaking that).
struct KernelTable {
    const char* name;

    // Unnormalized M-matrix filter step:
    //   a = (k00 p0 + k01 p1) w0;  b = (k10 p0 + k11 p1) w1;  p0 = a;  p1 = b
    void (*mm_step)(double* p0, double* p1, const double* k00, const double* k01,
                    const double* k10, const double* k11, double w0, double w1, std::size_t n);

    // Conditioned-occupation relaxation toward the per-node steady state:
    //   q1 = pinf + (p1 - pinf) * decay
    void (*relax)(double* q1, const double* p1, const double* pinf, const double* decay,
                  std::size_t n);

    // Multiplicative posterior-weight update, w *= (base + coeff * q1):
    //   base = 1 - coeff * p1bar folded in by the caller
    void (*weight_update)(double* w, const double* q1, double base, double coeff, std::size_t n);

    // Euler-Maruyama innovation update of the conditioned occupation:
    //   p1 = q1 + gain * q1 (1 - q1) * (c1 - c2 q1)
    void (*occupation_update)(double* p1, const double* q1, double gain, double c1, double c2,
                              std::size_t n);
};

const KernelTable& scalar_table();

// Auto-detected best table; honors THERMO_SIMD={auto,scalar,avx2,neon}.
const KernelTable& active_table();

// Tables compiled into this binary (scalar first), for equivalence tests.
std::size_t available_tables(const KernelTable** out, std::size_t max);

} // namespace thermo::kernels
