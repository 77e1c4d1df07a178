#include "thermo/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace thermo::kernels {

// AVX2 variants. Per-lane operation order mirrors the scalar reference exactly;
// no FMA, so results are bit-identical lane by lane.

namespace {

void mm_step_avx2(double* p0, double* p1, const double* k00, const double* k01,
                  const double* k10, const double* k11, double w0, double w1, std::size_t n) {
    const __m256d vw0 = _mm256_set1_pd(w0);
    const __m256d vw1 = _mm256_set1_pd(w1);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vp0 = _mm256_loadu_pd(p0 + i);
        const __m256d vp1 = _mm256_loadu_pd(p1 + i);
        const __m256d a = _mm256_mul_pd(
            _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(k00 + i), vp0),
                          _mm256_mul_pd(_mm256_loadu_pd(k01 + i), vp1)),
            vw0);
        const __m256d b = _mm256_mul_pd(
            _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(k10 + i), vp0),
                          _mm256_mul_pd(_mm256_loadu_pd(k11 + i), vp1)),
            vw1);
        _mm256_storeu_pd(p0 + i, a);
        _mm256_storeu_pd(p1 + i, b);
    }
    for (; i < n; ++i) {
        const double a = (k00[i] * p0[i] + k01[i] * p1[i]) * w0;
        const double b = (k10[i] * p0[i] + k11[i] * p1[i]) * w1;
        p0[i] = a;
        p1[i] = b;
    }
}

void relax_avx2(double* q1, const double* p1, const double* pinf, const double* decay,
                std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vpinf = _mm256_loadu_pd(pinf + i);
        const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(p1 + i), vpinf);
        _mm256_storeu_pd(q1 + i,
                         _mm256_add_pd(vpinf, _mm256_mul_pd(diff, _mm256_loadu_pd(decay + i))));
    }
    for (; i < n; ++i) q1[i] = pinf[i] + (p1[i] - pinf[i]) * decay[i];
}

void weight_update_avx2(double* w, const double* q1, double base, double coeff, std::size_t n) {
    const __m256d vbase = _mm256_set1_pd(base);
    const __m256d vcoeff = _mm256_set1_pd(coeff);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d factor =
            _mm256_add_pd(vbase, _mm256_mul_pd(vcoeff, _mm256_loadu_pd(q1 + i)));
        _mm256_storeu_pd(w + i, _mm256_mul_pd(_mm256_loadu_pd(w + i), factor));
    }
    for (; i < n; ++i) w[i] = w[i] * (base + coeff * q1[i]);
}

void occupation_update_avx2(double* p1, const double* q1, double gain, double c1, double c2,
                            std::size_t n) {
    const __m256d vgain = _mm256_set1_pd(gain);
    const __m256d vc1 = _mm256_set1_pd(c1);
    const __m256d vc2 = _mm256_set1_pd(c2);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d q = _mm256_loadu_pd(q1 + i);
        const __m256d innov = _mm256_sub_pd(vc1, _mm256_mul_pd(vc2, q));
        const __m256d gq = _mm256_mul_pd(vgain, q);
        const __m256d gq1q = _mm256_mul_pd(gq, _mm256_sub_pd(one, q));
        _mm256_storeu_pd(p1 + i, _mm256_add_pd(q, _mm256_mul_pd(gq1q, innov)));
    }
    for (; i < n; ++i) {
        const double q = q1[i];
        p1[i] = q + gain * q * (1.0 - q) * (c1 - c2 * q);
    }
}

} // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{"avx2", mm_step_avx2, relax_avx2, weight_update_avx2,
                                   occupation_update_avx2};
    return table;
}

} // namespace thermo::kernels

#endif // x86_64
