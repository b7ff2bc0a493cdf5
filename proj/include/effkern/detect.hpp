#pragma once

#include <vector>

#include "effkern/gridio.hpp"

namespace effkern {

// Output of the two-snapshot kernel recovery. spectrum holds the real part
// of (u_after^ / u_before^ - 1) / delta per r2c mode; masked modes carry 0.
struct DetectionResult {
    std::vector<double> spectrum;
    std::vector<bool> mask; // true = excluded for small denominator
    Field kernel;           // inverse transform over unmasked modes
    double delta = 0.0;
    double imag_residue = 0.0; // max |Im| over unmasked modes, diagnostic
    int unmasked = 0;
};

// Per mode K^ = (1/delta)(u_after^/u_before^ - 1) wherever |u_before^|
// exceeds floor_rel * max |u_before^|. Throws when every mode is masked.
DetectionResult detect_kernel(const Field& before, const Field& after, double delta,
                              double floor_rel = 1e-6);

} // namespace effkern
