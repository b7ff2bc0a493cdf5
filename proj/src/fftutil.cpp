#include "effkern/fftutil.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

namespace effkern {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

struct Plans {
    fftw_plan fwd;
    fftw_plan inv;
    double* rbuf;
    fftw_complex* cbuf;
};

FftGrid::FftGrid(int nx, int ny) : nx_(nx), ny_(ny), plan_fwd_(nullptr), plan_inv_(nullptr) {
    if (nx < 2 || ny < 1) throw std::invalid_argument("FftGrid: bad shape");
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* p = new Plans;
    p->rbuf = fftw_alloc_real(static_cast<std::size_t>(nx) * ny);
    p->cbuf = fftw_alloc_complex(static_cast<std::size_t>(ny) * (nx / 2 + 1));
    if (ny == 1) {
        p->fwd = fftw_plan_dft_r2c_1d(nx, p->rbuf, p->cbuf, FFTW_ESTIMATE);
        p->inv = fftw_plan_dft_c2r_1d(nx, p->cbuf, p->rbuf, FFTW_ESTIMATE);
    } else {
        p->fwd = fftw_plan_dft_r2c_2d(ny, nx, p->rbuf, p->cbuf, FFTW_ESTIMATE);
        p->inv = fftw_plan_dft_c2r_2d(ny, nx, p->cbuf, p->rbuf, FFTW_ESTIMATE);
    }
    plan_fwd_ = p;
}

FftGrid::~FftGrid() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* p = static_cast<Plans*>(plan_fwd_);
    fftw_destroy_plan(p->fwd);
    fftw_destroy_plan(p->inv);
    fftw_free(p->rbuf);
    fftw_free(p->cbuf);
    delete p;
}

void FftGrid::forward(const double* in, std::complex<double>* out) const {
    auto* p = static_cast<Plans*>(plan_fwd_);
    std::memcpy(p->rbuf, in, sizeof(double) * nx_ * ny_);
    fftw_execute(p->fwd);
    std::memcpy(out, p->cbuf, sizeof(fftw_complex) * spectrum_size());
}

void FftGrid::inverse(const std::complex<double>* in, double* out) const {
    auto* p = static_cast<Plans*>(plan_fwd_);
    std::memcpy(p->cbuf, in, sizeof(fftw_complex) * spectrum_size());
    fftw_execute(p->inv);
    double norm = 1.0 / (static_cast<double>(nx_) * ny_);
    for (int i = 0; i < nx_ * ny_; ++i) out[i] = p->rbuf[i] * norm;
}

void FftGrid::mode_components(int m, double dx, double& kx, double& ky) const {
    int nxh = nx_ / 2 + 1;
    int ikx = m % nxh;
    int iky = m / nxh;
    if (iky > ny_ / 2) iky -= ny_;
    double two_pi = 2.0 * std::numbers::pi;
    kx = two_pi * ikx / (nx_ * dx);
    ky = ny_ == 1 ? 0.0 : two_pi * iky / (ny_ * dx);
}

double FftGrid::mode_magnitude(int m, double dx) const {
    double kx, ky;
    mode_components(m, dx, kx, ky);
    return std::hypot(kx, ky);
}

} // namespace effkern
