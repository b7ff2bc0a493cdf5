#pragma once

#include <complex>
#include <vector>

namespace effkern {

// Thin wrapper over FFTW real<->complex transforms for the periodic grids
// used by the simulators and the detector. Plans are created with
// FFTW_ESTIMATE so results are reproducible run to run.
class FftGrid {
  public:
    // ny == 1 selects the 1D transform.
    FftGrid(int nx, int ny);
    ~FftGrid();
    FftGrid(const FftGrid&) = delete;
    FftGrid& operator=(const FftGrid&) = delete;

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    // r2c layout: ny rows of (nx/2 + 1) complex entries.
    int spectrum_size() const { return ny_ * (nx_ / 2 + 1); }

    // Unnormalized forward transform.
    void forward(const double* in, std::complex<double>* out) const;
    // Inverse transform including the 1/(nx*ny) normalization.
    void inverse(const std::complex<double>* in, double* out) const;

    // Wavenumber magnitude |k| of r2c mode index m, for grid spacing dx.
    double mode_magnitude(int m, double dx) const;
    // Signed component wavenumbers of r2c mode index m.
    void mode_components(int m, double dx, double& kx, double& ky) const;

  private:
    int nx_, ny_;
    void* plan_fwd_;
    void* plan_inv_;
    mutable std::vector<double> real_buf_;
    mutable std::vector<std::complex<double>> cplx_buf_;
};

} // namespace effkern
