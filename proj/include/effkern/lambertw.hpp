#pragma once

#include <complex>
#include <stdexcept>

namespace effkern {

/// Time-shift / damping scales of the reduction. Defaults follow the
/// reference parameterization used throughout the preset pipelines.
struct DelayParams {
    double delta = 0.1;    // time shift, > 0
    double epsilon = 0.05; // damping scale, > 0
};

/// Principal branch W0 of the Lambert W function on the real domain
/// z >= -1/e. Halley iteration to a 1e-14 residual target.
/// Throws std::domain_error for z < -1/e (beyond rounding slack).
double lambert_w0(double z);

/// mu = (1/delta) * W0(delta * zeta * exp(delta * zeta)).
/// Equals zeta exactly when zeta > -1/delta; never below -1/delta.
double mu_exact(double zeta, double delta);

/// Rough map M*(z) = z * exp(delta * z), real and complex forms.
double mu_rough(double zeta, double delta);
std::complex<double> mu_rough(std::complex<double> zeta, double delta);

} // namespace effkern
