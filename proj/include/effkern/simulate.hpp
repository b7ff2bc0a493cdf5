#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "effkern/fftutil.hpp"
#include "effkern/gridio.hpp"
#include "effkern/netspec.hpp"
#include "effkern/reduction.hpp"

namespace effkern {

struct InstabilityError : std::runtime_error {
    int step;
    explicit InstabilityError(int step_)
        : std::runtime_error("instability detected at step " + std::to_string(step_)),
          step(step_) {}
};

struct SimParams {
    double dt = 0.0; // 0 selects half the reported stability bound
    int steps = 1000;
    int record_every = 0; // 0: only the final state is reported
    std::uint64_t seed = 1;
    bool irreversible = false;
    bool cutoff_enabled = true;
};

// Plateau cutoff: 1 on |u| <= u*/2, linear down to 0 at |u| = u*, 0 beyond.
double cutoff_chi(double u, const CutoffSpec& spec);

using SnapshotCb = std::function<void(const Field&, int step)>;

struct SimResult {
    Field final;
    double dt_used = 0.0;
    double dt_bound = 0.0;
    double kernel_l1 = 0.0;
    std::vector<std::string> warnings;
};

// Explicit Euler on u_t = L u + chi(u) * (K*u); irreversible mode replaces
// the reaction term by chi(u) * max(K*u, 0). Convolution by FFT with the
// sampled kernel wrapped onto the torus.
SimResult simulate_scalar(const EffectiveSystem& sys, const Field& f0,
                          const SimParams& params, const SnapshotCb& on_snapshot = {});

struct PairResult {
    Field x;
    Field y;
    double dt_used = 0.0;
    double dt_bound = 0.0;
    std::vector<std::string> warnings;
};

// Two-field system: X_t = L X + chi(X) g(K*X + L.Y), Y_t = L Y + chi(Y)(M*X + N*Y),
// with g = max(., 0) in irreversible mode and L.Y the identity-plus-kernel
// coupling of the effective system.
PairResult simulate_pair(const EffectiveSystem& sys, const Field& x0, const Field& y0,
                         const SimParams& params, const SnapshotCb& on_snapshot_x = {},
                         const SnapshotCb& on_snapshot_y = {});

// Exact-in-space linear oracle: per Fourier mode, U <- exp(dt B(|k|)) U.
// One field per network component; snapshots are inverse-transformed on
// demand. dt = 0 selects 0.1.
std::vector<Field> simulate_full_network(
    const NetworkSpec& spec, int dimension, const std::vector<Field>& u0,
    const SimParams& params,
    const std::function<void(const std::vector<Field>&, int step)>& on_snapshot = {});

struct WavenumberEstimate {
    double wavenumber = 0.0;
    double confidence = 0.0; // peak / median of the binned power spectrum
};

// argmax over radial (or 1D) bins of the power spectrum of field - mean.
WavenumberEstimate dominant_wavenumber(const Field& field);

// Initial states
Field make_noise_field(int dimension, int nx, int ny, double dx, double amplitude,
                       std::uint64_t seed);
void seed_left_edge(Field& f, int columns, double value);
void ablate_disk(Field& f, double cx, double cy, double radius);

// Kernel plumbing, exposed for the convolution tests and the detector:
// wrapped torus samples (index 0 at the origin) and the spectral multiplier.
std::vector<double> wrap_kernel_1d(const KernelProfile& profile, int n, double dx);
std::vector<double> wrap_kernel_radial(const KernelProfile& profile, int nx, int ny,
                                       double dx);
// Re(FFT(wrapped)) * dx^dim; throws when the imaginary residue is not tiny.
std::vector<double> kernel_multiplier(const FftGrid& fft, const std::vector<double>& wrapped,
                                      double dx, int dimension);
// IFFT(mult . FFT(u)), the convolution product used by the steppers.
std::vector<double> convolve_periodic(const FftGrid& fft, const std::vector<double>& mult,
                                      const std::vector<double>& u);

} // namespace effkern
