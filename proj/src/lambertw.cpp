#include "effkern/lambertw.hpp"

#include <cmath>

namespace effkern {

namespace {

constexpr double kInvE = 0.36787944117144233; // 1/e

// Piecewise initial guess for the Halley iteration.
double w0_initial_guess(double z) {
    if (z < -0.32) {
        // Branch-point series in p = sqrt(2(ez+1)).
        double p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    }
    if (z < 0.5) {
        // Taylor series about 0.
        return z * (1.0 + z * (-1.0 + z * (1.5 - 8.0 / 3.0 * z)));
    }
    if (z < 3.0) {
        return 0.5 * std::log1p(z); // crude but inside the convergence basin
    }
    double l1 = std::log(z);
    double l2 = std::log(l1);
    return l1 - l2 + l2 / l1;
}

} // namespace

double lambert_w0(double z) {
    if (z < -kInvE) {
        // Allow a few ulp of slack for callers that computed z = x*exp(x).
        if (z > -kInvE - 1e-14) return -1.0;
        throw std::domain_error("lambert_w0: argument below -1/e");
    }
    if (z == 0.0) return 0.0;

    double w = w0_initial_guess(z);
    const double tol = 1e-14 * std::max(1.0, std::fabs(z));
    for (int it = 0; it < 64; ++it) {
        double ew = std::exp(w);
        double f = w * ew - z;
        if (std::fabs(f) <= tol) break;
        double wp1 = w + 1.0;
        // Halley step; the (w+2)/(2w+2) factor degenerates at w = -1.
        double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        double step = f / denom;
        if (!std::isfinite(step)) break;
        w -= step;
        if (w < -1.0) w = -1.0; // principal branch lives in [-1, inf)
    }
    return w;
}

double mu_exact(double zeta, double delta) {
    double x = delta * zeta;
    // W0(x e^x) = x on x >= -1; return the input unchanged there so the
    // identity regime is exact.
    if (x >= -1.0) return zeta;
    return lambert_w0(x * std::exp(x)) / delta;
}

double mu_rough(double zeta, double delta) {
    return zeta * std::exp(delta * zeta);
}

std::complex<double> mu_rough(std::complex<double> zeta, double delta) {
    return zeta * std::exp(delta * zeta);
}

} // namespace effkern
