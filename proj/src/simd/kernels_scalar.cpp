#include "effkern/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace effkern::simd {

namespace {

inline double chi_plateau(double u, double u_star) {
    double t = (u_star - std::fabs(u)) * (2.0 / u_star);
    return std::clamp(t, 0.0, 1.0);
}

void fused_update_scalar(double* u, const double* lin, const double* a,
                         const double* b, std::size_t n, double dt,
                         double u_star, bool rectify) {
    for (std::size_t i = 0; i < n; ++i) {
        double conv = a[i] + (b ? b[i] : 0.0);
        if (rectify) conv = std::max(conv, 0.0);
        double du = (lin ? lin[i] : 0.0) + chi_plateau(u[i], u_star) * conv;
        u[i] += dt * du;
    }
}

void cosine_accumulate_scalar(double* out, const double* x, std::size_t nx,
                              const double* coeff, std::size_t nk,
                              double s0, double ds) {
    for (std::size_t j = 0; j < nx; ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < nk; ++k) {
            acc += coeff[k] * std::cos((s0 + static_cast<double>(k) * ds) * x[j]);
        }
        out[j] += acc;
    }
}

double max_abs_scalar(const double* v, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(v[i]));
    return m;
}

double sum_abs_scalar(const double* v, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::fabs(v[i]);
    return s;
}

void scale_complex_scalar(double* z, const double* m, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        z[2 * i] *= m[i];
        z[2 * i + 1] *= m[i];
    }
}

} // namespace

const Ops& scalar_ops() {
    static const Ops table{
        fused_update_scalar, cosine_accumulate_scalar,
        max_abs_scalar,      sum_abs_scalar,
        scale_complex_scalar,
    };
    return table;
}

} // namespace effkern::simd
