#include "effkern/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace effkern::simd {

const Ops& scalar_ops();
#if defined(EFFKERN_BUILD_AVX2)
const Ops& avx2_ops();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(EFFKERN_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend detect() {
    if (const char* env = std::getenv("EFFKERN_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::avx2;
        // "auto" or anything unrecognized falls through to detection
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<int>& active_slot() {
    static std::atomic<int> slot{static_cast<int>(detect())};
    return slot;
}

} // namespace

bool backend_available(Backend b) {
    return b == Backend::scalar || (b == Backend::avx2 && cpu_has_avx2());
}

const Ops& ops(Backend b) {
#if defined(EFFKERN_BUILD_AVX2)
    if (b == Backend::avx2) return avx2_ops();
#endif
    return scalar_ops();
}

const Ops& ops() { return ops(active_backend()); }

Backend active_backend() { return static_cast<Backend>(active_slot().load()); }

bool set_backend(Backend b) {
    if (!backend_available(b)) return false;
    active_slot().store(static_cast<int>(b));
    return true;
}

const char* backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

} // namespace effkern::simd
