#include "effkern/detect.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "effkern/fftutil.hpp"

namespace effkern {

DetectionResult detect_kernel(const Field& before, const Field& after, double delta,
                              double floor_rel) {
    if (before.dimension != after.dimension || before.nx != after.nx ||
        before.ny != after.ny)
        throw std::invalid_argument("detect_kernel: snapshots must share one grid");
    if (!(delta > 0.0)) throw std::invalid_argument("detect_kernel: delta must be positive");

    FftGrid fft(before.nx, before.dimension == 1 ? 1 : before.ny);
    const int nm = fft.spectrum_size();
    std::vector<std::complex<double>> ub(nm), ua(nm);
    fft.forward(before.values.data(), ub.data());
    fft.forward(after.values.data(), ua.data());

    double peak = 0.0;
    for (const auto& z : ub) peak = std::max(peak, std::abs(z));
    double floor = floor_rel * peak;

    DetectionResult res;
    res.delta = delta;
    res.spectrum.assign(nm, 0.0);
    res.mask.assign(nm, true);
    std::vector<std::complex<double>> khat(nm, 0.0);
    for (int m = 0; m < nm; ++m) {
        if (std::abs(ub[m]) <= floor) continue;
        std::complex<double> k = (ua[m] / ub[m] - 1.0) / delta;
        res.spectrum[m] = k.real();
        res.imag_residue = std::max(res.imag_residue, std::fabs(k.imag()));
        res.mask[m] = false;
        khat[m] = k.real();
        ++res.unmasked;
    }
    if (res.unmasked == 0)
        throw std::runtime_error("detect_kernel: all modes masked (detection impossible)");

    // Real-space kernel on the snapshot grid, comparable to the wrapped
    // kernels the simulators use.
    res.kernel = Field::zeros(before.dimension, before.nx, before.ny, before.dx);
    fft.inverse(khat.data(), res.kernel.values.data());
    double cell = before.dimension == 1 ? before.dx : before.dx * before.dx;
    for (double& v : res.kernel.values) v /= cell;
    res.kernel.time = before.time;
    return res;
}

} // namespace effkern
