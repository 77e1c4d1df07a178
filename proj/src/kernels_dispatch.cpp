#include "thermo/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace thermo::kernels {

#if defined(THERMO_HAVE_AVX2_TU)
const KernelTable& avx2_table();
#endif
#if defined(THERMO_HAVE_NEON_TU)
const KernelTable& neon_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(THERMO_HAVE_AVX2_TU) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const KernelTable* pick_auto() {
#if defined(THERMO_HAVE_AVX2_TU)
    if (cpu_has_avx2()) return &avx2_table();
#endif
#if defined(THERMO_HAVE_NEON_TU)
    return &neon_table();
#endif
    return &scalar_table();
}

const KernelTable* pick_from_env() {
    const char* env = std::getenv("THERMO_SIMD");
    if (env == nullptr || std::strcmp(env, "auto") == 0 || env[0] == '\0') return pick_auto();
    if (std::strcmp(env, "scalar") == 0) return &scalar_table();
#if defined(THERMO_HAVE_AVX2_TU)
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return &avx2_table();
#endif
#if defined(THERMO_HAVE_NEON_TU)
    if (std::strcmp(env, "neon") == 0) return &neon_table();
#endif
    // Unknown or unavailable request: fall back to the safe choice.
    return &scalar_table();
}

} // namespace

const KernelTable& active_table() {
    static const KernelTable* chosen = pick_from_env();
    return *chosen;
}

std::size_t available_tables(const KernelTable** out, std::size_t max) {
    std::size_t count = 0;
    if (count < max) out[count++] = &scalar_table();
#if defined(THERMO_HAVE_AVX2_TU)
    if (cpu_has_avx2() && count < max) out[count++] = &avx2_table();
#endif
#if defined(THERMO_HAVE_NEON_TU)
    if (count < max) out[count++] = &neon_table();
#endif
    return count;
}

} // namespace thermo::kernels
