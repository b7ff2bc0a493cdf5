#pragma once

#include <cstddef>

// Data-parallel inner loops shared by the reduction and simulation paths.
// Each kernel has a scalar reference implementation and, on x86-64 with
// AVX2+FMA, a vectorized variant selected at runtime. Backends are
// equivalence-tested against each other; see tests/test_simd_kernels.cpp.

namespace effkern::simd {

enum class Backend { scalar = 0, avx2 = 1 };

struct Ops {
    // u[i] += dt * (lin[i] + chi(u[i]) * g(a[i] + b[i]))
    // where chi is the plateau cutoff (1 on |u| <= u*/2, linear to 0 at u*)
    // and g = identity, or max(., 0) when rectify is set.
    // lin and b may be null (treated as zero).
    void (*fused_update)(double* u, const double* lin, const double* a,
                         const double* b, std::size_t n, double dt,
                         double u_star, bool rectify);

    // out[j] += sum_k coeff[k] * cos((s0 + k*ds) * x[j])
    void (*cosine_accumulate)(double* out, const double* x, std::size_t nx,
                              const double* coeff, std::size_t nk,
                              double s0, double ds);

    double (*max_abs)(const double* v, std::size_t n);
    double (*sum_abs)(const double* v, std::size_t n);

    // n interleaved (re, im) pairs, each scaled by the real multiplier m[i].
    void (*scale_complex)(double* z, const double* m, std::size_t n);
};

// Active table. Detection order: EFFKERN_SIMD env override ("scalar",
// "avx2", "auto"), then CPUID.
const Ops& ops();

// Explicit table for a backend, for cross-backend tests.
const Ops& ops(Backend b);

Backend active_backend();
bool backend_available(Backend b);
// Force a backend; returns false (and leaves the state unchanged) when the
// backend is not available on this CPU/build.
bool set_backend(Backend b);
const char* backend_name(Backend b);

} // namespace effkern::simd
