#include <cstdlib>
#include <cstring>

#include "bismarck/simd/kernels.hpp"

namespace bismarck::simd {
namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Kernels& pick() {
    const Kernels* avx2 = avx2_kernels_or_null();
    if (const char* env = std::getenv("BISMARCK_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return scalar_kernels();
        if (std::strcmp(env, "avx2") == 0 && avx2 && cpu_has_avx2_fma()) return *avx2;
    }
    if (avx2 && cpu_has_avx2_fma()) return *avx2;
    return scalar_kernels();
}

}  // namespace

const Kernels& active() {
    static const Kernels& k = pick();
    return k;
}

}  // namespace bismarck::simd
