#include "thermo/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace thermo::kernels {

// NEON variants (aarch64 baseline). Same per-lane operation order as the scalar
// reference; vmulq/vaddq only, no fused multiply-add.

namespace {

void mm_step_neon(double* p0, double* p1, const double* k00, const double* k01,
                  const double* k10, const double* k11, double w0, double w1, std::size_t n) {
    const float64x2_t vw0 = vdupq_n_f64(w0);
    const float64x2_t vw1 = vdupq_n_f64(w1);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vp0 = vld1q_f64(p0 + i);
        const float64x2_t vp1 = vld1q_f64(p1 + i);
        const float64x2_t a = vmulq_f64(
            vaddq_f64(vmulq_f64(vld1q_f64(k00 + i), vp0), vmulq_f64(vld1q_f64(k01 + i), vp1)),
            vw0);
        const float64x2_t b = vmulq_f64(
            vaddq_f64(vmulq_f64(vld1q_f64(k10 + i), vp0), vmulq_f64(vld1q_f64(k11 + i), vp1)),
            vw1);
        vst1q_f64(p0 + i, a);
        vst1q_f64(p1 + i, b);
    }
    for (; i < n; ++i) {
        const double a = (k00[i] * p0[i] + k01[i] * p1[i]) * w0;
        const double b = (k10[i] * p0[i] + k11[i] * p1[i]) * w1;
        p0[i] = a;
        p1[i] = b;
    }
}

void relax_neon(double* q1, const double* p1, const double* pinf, const double* decay,
                std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vpinf = vld1q_f64(pinf + i);
        const float64x2_t diff = vsubq_f64(vld1q_f64(p1 + i), vpinf);
        vst1q_f64(q1 + i, vaddq_f64(vpinf, vmulq_f64(diff, vld1q_f64(decay + i))));
    }
    for (; i < n; ++i) q1[i] = pinf[i] + (p1[i] - pinf[i]) * decay[i];
}

void weight_update_neon(double* w, const double* q1, double base, double coeff, std::size_t n) {
    const float64x2_t vbase = vdupq_n_f64(base);
    const float64x2_t vcoeff = vdupq_n_f64(coeff);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t factor = vaddq_f64(vbase, vmulq_f64(vcoeff, vld1q_f64(q1 + i)));
        vst1q_f64(w + i, vmulq_f64(vld1q_f64(w + i), factor));
    }
    for (; i < n; ++i) w[i] = w[i] * (base + coeff * q1[i]);
}

void occupation_update_neon(double* p1, const double* q1, double gain, double c1, double c2,
                            std::size_t n) {
    const float64x2_t vgain = vdupq_n_f64(gain);
    const float64x2_t vc1 = vdupq_n_f64(c1);
    const float64x2_t vc2 = vdupq_n_f64(c2);
    const float64x2_t one = vdupq_n_f64(1.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t q = vld1q_f64(q1 + i);
        const float64x2_t innov = vsubq_f64(vc1, vmulq_f64(vc2, q));
        const float64x2_t gq1q = vmulq_f64(vmulq_f64(vgain, q), vsubq_f64(one, q));
        vst1q_f64(p1 + i, vaddq_f64(q, vmulq_f64(gq1q, innov)));
    }
    for (; i < n; ++i) {
        const double q = q1[i];
        p1[i] = q + gain * q * (1.0 - q) * (c1 - c2 * q);
    }
}

} // namespace

const KernelTable& neon_table() {
    static const KernelTable table{"neon", mm_step_neon, relax_neon, weight_update_neon,
                                   occupation_update_neon};
    return table;
}

} // namespace thermo::kernels

#endif // __aarch64__
