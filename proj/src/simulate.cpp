#include "effkern/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "effkern/simd/kernels.hpp"
#include "effkern/symbol.hpp"

namespace effkern {

double cutoff_chi(double u, const CutoffSpec& spec) {
    double t = (spec.u_star - std::fabs(u)) * (2.0 / spec.u_star);
    return std::clamp(t, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Kernel plumbing
// ---------------------------------------------------------------------------

std::vector<double> wrap_kernel_1d(const KernelProfile& profile, int n, double dx) {
    if (profile.x.size() < 2) throw std::invalid_argument("wrap_kernel_1d: empty profile");
    double dk = profile.x(1) - profile.x(0);
    if (std::fabs(dk - dx) > 1e-9 * dx)
        throw std::invalid_argument("wrap_kernel_1d: kernel grid does not match field grid");
    std::vector<double> out(n, 0.0);
    for (int j = 0; j < profile.x.size(); ++j) {
        long idx = std::lround(profile.x(j) / dx) % n;
        if (idx < 0) idx += n;
        out[static_cast<std::size_t>(idx)] += profile.values(j);
    }
    return out;
}

std::vector<double> wrap_kernel_radial(const KernelProfile& profile, int nx, int ny,
                                       double dx) {
    if (profile.x.size() < 2)
        throw std::invalid_argument("wrap_kernel_radial: empty profile");
    double dr = profile.x(1) - profile.x(0);
    int np = static_cast<int>(profile.x.size());
    std::vector<double> out(static_cast<std::size_t>(nx) * ny, 0.0);
    for (int iy = 0; iy < ny; ++iy) {
        int my = std::min(iy, ny - iy);
        for (int ix = 0; ix < nx; ++ix) {
            int mx = std::min(ix, nx - ix);
            double r = std::hypot(mx * dx, my * dx);
            double t = r / dr;
            int k = static_cast<int>(t);
            double v = 0.0;
            if (k + 1 < np) {
                double frac = t - k;
                v = profile.values(k) * (1.0 - frac) + profile.values(k + 1) * frac;
            }
            out[static_cast<std::size_t>(iy) * nx + ix] = v;
        }
    }
    return out;
}

std::vector<double> kernel_multiplier(const FftGrid& fft, const std::vector<double>& wrapped,
                                      double dx, int dimension) {
    std::vector<std::complex<double>> spec(fft.spectrum_size());
    fft.forward(wrapped.data(), spec.data());
    double cell = dimension == 1 ? dx : dx * dx;
    double scale = simd::ops().max_abs(wrapped.data(), wrapped.size());
    std::vector<double> mult(spec.size());
    for (std::size_t m = 0; m < spec.size(); ++m) {
        if (std::fabs(spec[m].imag()) > 1e-8 * std::max(1.0, scale) * wrapped.size())
            throw std::runtime_error("kernel_multiplier: kernel transform not real "
                                     "(kernel not even on the torus)");
        mult[m] = spec[m].real() * cell;
    }
    return mult;
}

std::vector<double> convolve_periodic(const FftGrid& fft, const std::vector<double>& mult,
                                      const std::vector<double>& u) {
    std::vector<std::complex<double>> spec(fft.spectrum_size());
    fft.forward(u.data(), spec.data());
    simd::ops().scale_complex(reinterpret_cast<double*>(spec.data()), mult.data(),
                              spec.size());
    std::vector<double> out(u.size());
    fft.inverse(spec.data(), out.data());
    return out;
}

// ---------------------------------------------------------------------------
// Steppers
// ---------------------------------------------------------------------------

namespace {

struct StepperContext {
    FftGrid fft;
    std::vector<double> lambda_mult; // spectral multiplier of the L operator
    bool has_lambda = false;
    double nyquist = 0.0;

    StepperContext(const Field& f, const LambdaH& lh)
        : fft(f.nx, f.dimension == 1 ? 1 : f.ny) {
        nyquist = std::numbers::pi / f.dx * (f.dimension == 2 ? std::numbers::sqrt2 : 1.0);
        has_lambda = lh.degree == 2;
        if (has_lambda) {
            lambda_mult.resize(fft.spectrum_size());
            for (int m = 0; m < fft.spectrum_size(); ++m)
                lambda_mult[m] = lh(fft.mode_magnitude(m, f.dx));
        }
    }
};

void check_grid(const Field& a, const Field& b) {
    if (a.dimension != b.dimension || a.nx != b.nx || a.ny != b.ny ||
        std::fabs(a.dx - b.dx) > 1e-12 * a.dx)
        throw std::invalid_argument("fields must share one grid");
}

double resolve_dt(double requested, double bound) {
    if (requested <= 0.0) {
        if (!std::isfinite(bound)) throw std::invalid_argument("dt required (no finite bound)");
        return 0.5 * bound;
    }
    if (requested > bound * (1.0 + 1e-12))
        throw std::invalid_argument("dt " + std::to_string(requested) +
                                    " exceeds the stability bound " + std::to_string(bound));
    return requested;
}

double decay_length(const KernelProfile& profile) {
    double peak = profile.values.cwiseAbs().maxCoeff();
    if (peak == 0.0) return 0.0;
    double far = 0.0;
    for (int j = 0; j < profile.x.size(); ++j)
        if (std::fabs(profile.values(j)) > 1e-3 * peak)
            far = std::max(far, std::fabs(profile.x(j)));
    return far;
}

} // namespace

SimResult simulate_scalar(const EffectiveSystem& sys, const Field& f0,
                          const SimParams& params, const SnapshotCb& on_snapshot) {
    Field u = f0;
    StepperContext ctx(u, sys.lambda_h);
    const std::size_t n = u.size();

    std::vector<double> wrapped =
        u.dimension == 1 ? wrap_kernel_1d(sys.K, u.nx, u.dx)
                         : wrap_kernel_radial(sys.K, u.nx, u.ny, u.dx);
    std::vector<double> kmult = kernel_multiplier(ctx.fft, wrapped, u.dx, u.dimension);

    SimResult res;
    double cell = u.dimension == 1 ? u.dx : u.dx * u.dx;
    res.kernel_l1 = simd::ops().sum_abs(wrapped.data(), wrapped.size()) * cell;
    double lam = ctx.has_lambda ? std::fabs(sys.lambda_h(ctx.nyquist)) : 0.0;
    res.dt_bound = 0.5 / std::max(res.kernel_l1 + lam, 1e-300);
    res.dt_used = resolve_dt(params.dt, res.dt_bound);

    double box = u.nx * u.dx;
    double dl = decay_length(sys.K);
    if (dl > 0.0 && box < 8.0 * dl)
        res.warnings.push_back("box " + std::to_string(box) +
                               " shorter than 8x kernel decay length " + std::to_string(dl));

    const double u_star = sys.cutoff.u_star;
    const double u_star_eff = params.cutoff_enabled ? u_star : 1e30;
    const double max_allowed = (u_star + res.dt_used * res.kernel_l1 * u_star) * (1.0 + 1e-6);

    std::vector<std::complex<double>> spec(ctx.fft.spectrum_size());
    std::vector<std::complex<double>> work(ctx.fft.spectrum_size());
    std::vector<double> conv(n), lin;
    if (ctx.has_lambda) lin.resize(n);

    for (int step = 1; step <= params.steps; ++step) {
        ctx.fft.forward(u.values.data(), spec.data());
        work = spec;
        simd::ops().scale_complex(reinterpret_cast<double*>(work.data()), kmult.data(),
                                  work.size());
        ctx.fft.inverse(work.data(), conv.data());
        if (ctx.has_lambda) {
            work = spec;
            simd::ops().scale_complex(reinterpret_cast<double*>(work.data()),
                                      ctx.lambda_mult.data(), work.size());
            ctx.fft.inverse(work.data(), lin.data());
        }
        simd::ops().fused_update(u.values.data(), ctx.has_lambda ? lin.data() : nullptr,
                                 conv.data(), nullptr, n, res.dt_used, u_star_eff,
                                 params.irreversible);
        u.time += res.dt_used;

        if (params.cutoff_enabled) {
            double m = simd::ops().max_abs(u.values.data(), n);
            if (m > 10.0 * u_star) throw InstabilityError(step);
            if (m > max_allowed)
                throw std::logic_error("cutoff bound violated at step " + std::to_string(step));
        }
        if (on_snapshot && params.record_every > 0 && step % params.record_every == 0)
            on_snapshot(u, step);
    }
    res.final = std::move(u);
    return res;
}

PairResult simulate_pair(const EffectiveSystem& sys, const Field& x0, const Field& y0,
                         const SimParams& params, const SnapshotCb& on_snapshot_x,
                         const SnapshotCb& on_snapshot_y) {
    if (!sys.pair()) throw std::invalid_argument("simulate_pair: scalar effective system");
    check_grid(x0, y0);
    Field x = x0, y = y0;
    StepperContext ctx(x, sys.lambda_h);
    const std::size_t n = x.size();

    auto wrap = [&](const KernelProfile& p) {
        return x.dimension == 1 ? wrap_kernel_1d(p, x.nx, x.dx)
                                : wrap_kernel_radial(p, x.nx, x.ny, x.dx);
    };
    std::vector<double> wk = wrap(sys.K);
    std::vector<double> wm = wrap(*sys.M);
    std::vector<double> wn = wrap(*sys.N);
    std::vector<double> kmult = kernel_multiplier(ctx.fft, wk, x.dx, x.dimension);
    std::vector<double> mmult = kernel_multiplier(ctx.fft, wm, x.dx, x.dimension);
    std::vector<double> nmult = kernel_multiplier(ctx.fft, wn, x.dx, x.dimension);
    std::vector<double> lmult;
    double l_gain = sys.L ? sys.L->identity_gain : 1.0;
    if (sys.L && sys.L->kernel) {
        std::vector<double> wl = wrap(*sys.L->kernel);
        lmult = kernel_multiplier(ctx.fft, wl, x.dx, x.dimension);
    }

    PairResult res;
    double cell = x.dimension == 1 ? x.dx : x.dx * x.dx;
    auto l1 = [&](const std::vector<double>& w) {
        return simd::ops().sum_abs(w.data(), w.size()) * cell;
    };
    double couple = std::max(l1(wk) + std::fabs(l_gain), l1(wm) + l1(wn));
    double lam = ctx.has_lambda ? std::fabs(sys.lambda_h(ctx.nyquist)) : 0.0;
    res.dt_bound = 0.5 / std::max(couple + lam, 1e-300);
    res.dt_used = resolve_dt(params.dt, res.dt_bound);

    const double u_star = sys.cutoff.u_star;
    const double u_star_eff = params.cutoff_enabled ? u_star : 1e30;

    std::vector<std::complex<double>> specx(ctx.fft.spectrum_size());
    std::vector<std::complex<double>> specy(ctx.fft.spectrum_size());
    std::vector<std::complex<double>> work(ctx.fft.spectrum_size());
    std::vector<double> conv_kx(n), conv_mx(n), conv_ny(n), ly(n);
    std::vector<double> linx, liny;
    if (ctx.has_lambda) {
        linx.resize(n);
        liny.resize(n);
    }

    auto apply = [&](const std::vector<std::complex<double>>& spec,
                     const std::vector<double>& mult, std::vector<double>& out) {
        work = spec;
        simd::ops().scale_complex(reinterpret_cast<double*>(work.data()), mult.data(),
                                  work.size());
        ctx.fft.inverse(work.data(), out.data());
    };

    for (int step = 1; step <= params.steps; ++step) {
        ctx.fft.forward(x.values.data(), specx.data());
        ctx.fft.forward(y.values.data(), specy.data());
        apply(specx, kmult, conv_kx);
        apply(specx, mmult, conv_mx);
        apply(specy, nmult, conv_ny);
        if (!lmult.empty()) {
            apply(specy, lmult, ly);
            for (std::size_t i = 0; i < n; ++i) ly[i] += l_gain * y.values[i];
        } else {
            for (std::size_t i = 0; i < n; ++i) ly[i] = l_gain * y.values[i];
        }
        if (ctx.has_lambda) {
            apply(specx, ctx.lambda_mult, linx);
            apply(specy, ctx.lambda_mult, liny);
        }

        simd::ops().fused_update(x.values.data(), ctx.has_lambda ? linx.data() : nullptr,
                                 conv_kx.data(), ly.data(), n, res.dt_used, u_star_eff,
                                 params.irreversible);
        simd::ops().fused_update(y.values.data(), ctx.has_lambda ? liny.data() : nullptr,
                                 conv_mx.data(), conv_ny.data(), n, res.dt_used, u_star_eff,
                                 false);
        x.time += res.dt_used;
        y.time += res.dt_used;

        if (params.cutoff_enabled) {
            double m = std::max(simd::ops().max_abs(x.values.data(), n),
                                simd::ops().max_abs(y.values.data(), n));
            if (m > 10.0 * u_star) throw InstabilityError(step);
        }
        if (params.record_every > 0 && step % params.record_every == 0) {
            if (on_snapshot_x) on_snapshot_x(x, step);
            if (on_snapshot_y) on_snapshot_y(y, step);
        }
    }
    res.x = std::move(x);
    res.y = std::move(y);
    return res;
}

// ---------------------------------------------------------------------------
// Linear network oracle
// ---------------------------------------------------------------------------

std::vector<Field> simulate_full_network(
    const NetworkSpec& spec, int dimension, const std::vector<Field>& u0,
    const SimParams& params,
    const std::function<void(const std::vector<Field>&, int step)>& on_snapshot) {
    const int nc = spec.size();
    if (static_cast<int>(u0.size()) != nc)
        throw std::invalid_argument("simulate_full_network: one field per component");
    for (int c = 1; c < nc; ++c) check_grid(u0[0], u0[c]);

    SpectralSymbol symbol = assemble_symbol(spec, dimension);
    const Field& proto = u0[0];
    FftGrid fft(proto.nx, proto.dimension == 1 ? 1 : proto.ny);
    const int nm = fft.spectrum_size();
    double dt = params.dt > 0.0 ? params.dt : 0.1;

    // exp(dt B(s)) per mode, cached over equal wavenumber magnitudes
    std::vector<Eigen::MatrixXd> prop(nm);
    {
        std::map<double, Eigen::MatrixXd> cache;
        for (int m = 0; m < nm; ++m) {
            double s = fft.mode_magnitude(m, proto.dx);
            auto it = cache.find(s);
            if (it == cache.end()) {
                Eigen::MatrixXd e = (dt * symbol.evaluate(s)).exp();
                it = cache.emplace(s, std::move(e)).first;
            }
            prop[m] = it->second;
        }
    }

    std::vector<std::vector<std::complex<double>>> spec_state(
        nc, std::vector<std::complex<double>>(nm));
    for (int c = 0; c < nc; ++c) fft.forward(u0[c].values.data(), spec_state[c].data());

    Eigen::VectorXcd v(nc), w(nc);
    std::vector<Field> out(u0);
    auto materialize = [&](double t) {
        for (int c = 0; c < nc; ++c) {
            fft.inverse(spec_state[c].data(), out[c].values.data());
            out[c].time = t;
        }
    };

    double t = proto.time;
    for (int step = 1; step <= params.steps; ++step) {
        for (int m = 0; m < nm; ++m) {
            for (int c = 0; c < nc; ++c) v(c) = spec_state[c][m];
            w = prop[m] * v;
            for (int c = 0; c < nc; ++c) spec_state[c][m] = w(c);
        }
        t += dt;
        if (on_snapshot && params.record_every > 0 && step % params.record_every == 0) {
            materialize(t);
            on_snapshot(out, step);
        }
    }
    materialize(t);
    return out;
}

// ---------------------------------------------------------------------------
// Diagnostics and initial states
// ---------------------------------------------------------------------------

WavenumberEstimate dominant_wavenumber(const Field& field) {
    const std::size_t n = field.size();
    double mean = 0.0;
    for (double v : field.values) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> centered(field.values);
    for (double& v : centered) v -= mean;
    if (simd::ops().max_abs(centered.data(), n) == 0.0)
        throw std::invalid_argument("dominant_wavenumber: zero field");

    FftGrid fft(field.nx, field.dimension == 1 ? 1 : field.ny);
    std::vector<std::complex<double>> spec(fft.spectrum_size());
    fft.forward(centered.data(), spec.data());

    int nbins = field.dimension == 1
                    ? field.nx / 2 + 1
                    : static_cast<int>(std::hypot(field.nx / 2, field.ny / 2)) + 2;
    std::vector<double> power(nbins, 0.0);
    int nxh = field.nx / 2 + 1;
    for (int m = 0; m < fft.spectrum_size(); ++m) {
        int ikx = m % nxh;
        int iky = m / nxh;
        if (iky > field.ny / 2) iky -= field.ny;
        double w = (ikx == 0 || ikx == field.nx / 2) ? 1.0 : 2.0; // r2c halves kx
        int bin = field.dimension == 1
                      ? ikx
                      : static_cast<int>(std::lround(std::hypot(ikx, iky)));
        if (bin < nbins) power[bin] += w * std::norm(spec[m]);
    }

    int best = 1;
    for (int b = 2; b < nbins; ++b)
        if (power[b] > power[best]) best = b;

    std::vector<double> positive(power.begin() + 1, power.end());
    std::sort(positive.begin(), positive.end());
    double median = positive[positive.size() / 2];
    double bin_width = 2.0 * std::numbers::pi / (field.nx * field.dx);

    WavenumberEstimate est;
    est.wavenumber = best * bin_width;
    est.confidence = median > 0.0 ? power[best] / median
                                  : std::numeric_limits<double>::infinity();
    return est;
}

Field make_noise_field(int dimension, int nx, int ny, double dx, double amplitude,
                       std::uint64_t seed) {
    Field f = Field::zeros(dimension, nx, ny, dx);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-amplitude, amplitude);
    for (double& v : f.values) v = dist(rng);
    return f;
}

void seed_left_edge(Field& f, int columns, double value) {
    for (int iy = 0; iy < f.ny; ++iy)
        for (int ix = 0; ix < std::min(columns, f.nx); ++ix) f.at(ix, iy) = value;
}

void ablate_disk(Field& f, double cx, double cy, double radius) {
    for (int iy = 0; iy < f.ny; ++iy)
        for (int ix = 0; ix < f.nx; ++ix) {
            double x = ix * f.dx, y = iy * f.dx;
            if (std::hypot(x - cx, y - cy) <= radius) f.at(ix, iy) = 0.0;
        }
}

} // namespace effkern
