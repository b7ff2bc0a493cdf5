#include "effkern/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <immintrin.h>

// AVX2 + FMA variants. Compiled only into x86-64 builds; selected at
// runtime by the dispatcher after a CPUID check.

namespace effkern::simd {

namespace {

inline double chi_plateau(double u, double u_star) {
    double t = (u_star - std::fabs(u)) * (2.0 / u_star);
    return std::clamp(t, 0.0, 1.0);
}

const __m256d kSignMask = _mm256_set1_pd(-0.0);

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(kSignMask, v); }

void fused_update_avx2(double* u, const double* lin, const double* a,
                       const double* b, std::size_t n, double dt,
                       double u_star, bool rectify) {
    const __m256d vdt = _mm256_set1_pd(dt);
    const __m256d vstar = _mm256_set1_pd(u_star);
    const __m256d vslope = _mm256_set1_pd(2.0 / u_star);
    const __m256d vzero = _mm256_setzero_pd();
    const __m256d vone = _mm256_set1_pd(1.0);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vu = _mm256_loadu_pd(u + i);
        __m256d conv = _mm256_loadu_pd(a + i);
        if (b) conv = _mm256_add_pd(conv, _mm256_loadu_pd(b + i));
        if (rectify) conv = _mm256_max_pd(conv, vzero);

        __m256d t = _mm256_mul_pd(_mm256_sub_pd(vstar, abs_pd(vu)), vslope);
        __m256d chi = _mm256_min_pd(vone, _mm256_max_pd(vzero, t));

        __m256d du = _mm256_mul_pd(chi, conv);
        if (lin) du = _mm256_add_pd(du, _mm256_loadu_pd(lin + i));
        _mm256_storeu_pd(u + i, _mm256_fmadd_pd(vdt, du, vu));
    }
    for (; i < n; ++i) {
        double conv = a[i] + (b ? b[i] : 0.0);
        if (rectify) conv = std::max(conv, 0.0);
        double du = (lin ? lin[i] : 0.0) + chi_plateau(u[i], u_star) * conv;
        u[i] += dt * du;
    }
}

// Four output points at a time; each lane advances cos/sin of (s_k * x_j)
// by a lane-specific rotation (angle ds * x_j), so the inner loop over the
// uniform s grid is pure FMA work. Rotation round-off grows like nk * eps,
// well under the cross-backend tolerance for the grid sizes used here.
void cosine_accumulate_avx2(double* out, const double* x, std::size_t nx,
                            const double* coeff, std::size_t nk,
                            double s0, double ds) {
    std::size_t j = 0;
    for (; j + 4 <= nx; j += 4) {
        alignas(32) double c0[4], s0v[4], cd[4], sd[4];
        for (int l = 0; l < 4; ++l) {
            double th0 = s0 * x[j + l];
            double dth = ds * x[j + l];
            c0[l] = std::cos(th0);
            s0v[l] = std::sin(th0);
            cd[l] = std::cos(dth);
            sd[l] = std::sin(dth);
        }
        __m256d c = _mm256_load_pd(c0);
        __m256d s = _mm256_load_pd(s0v);
        __m256d vcd = _mm256_load_pd(cd);
        __m256d vsd = _mm256_load_pd(sd);
        __m256d acc = _mm256_setzero_pd();

        for (std::size_t k = 0; k < nk; ++k) {
            __m256d w = _mm256_set1_pd(coeff[k]);
            acc = _mm256_fmadd_pd(w, c, acc);
            __m256d cn = _mm256_fmsub_pd(c, vcd, _mm256_mul_pd(s, vsd));
            s = _mm256_fmadd_pd(s, vcd, _mm256_mul_pd(c, vsd));
            c = cn;
        }
        __m256d prev = _mm256_loadu_pd(out + j);
        _mm256_storeu_pd(out + j, _mm256_add_pd(prev, acc));
    }
    for (; j < nx; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < nk; ++k) {
            acc += coeff[k] * std::cos((s0 + static_cast<double>(k) * ds) * x[j]);
        }
        out[j] += acc;
    }
}

double max_abs_avx2(const double* v, std::size_t n) {
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, abs_pd(_mm256_loadu_pd(v + i)));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i) r = std::max(r, std::fabs(v[i]));
    return r;
}

double sum_abs_avx2(const double* v, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, abs_pd(_mm256_loadu_pd(v + i)));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double r = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) r += std::fabs(v[i]);
    return r;
}

void scale_complex_avx2(double* z, const double* m, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d mv = _mm256_loadu_pd(m + i);
        __m256d lo = _mm256_permute4x64_pd(mv, 0b01010000); // m0 m0 m1 m1
        __m256d hi = _mm256_permute4x64_pd(mv, 0b11111010); // m2 m2 m3 m3
        __m256d z0 = _mm256_loadu_pd(z + 2 * i);
        __m256d z1 = _mm256_loadu_pd(z + 2 * i + 4);
        _mm256_storeu_pd(z + 2 * i, _mm256_mul_pd(z0, lo));
        _mm256_storeu_pd(z + 2 * i + 4, _mm256_mul_pd(z1, hi));
    }
    for (; i < n; ++i) {
        z[2 * i] *= m[i];
        z[2 * i + 1] *= m[i];
    }
}

} // namespace

const Ops& avx2_ops() {
    static const Ops table{
        fused_update_avx2, cosine_accumulate_avx2,
        max_abs_avx2,      sum_abs_avx2,
        scale_complex_avx2,
    };
    return table;
}

} // namespace effkern::simd
