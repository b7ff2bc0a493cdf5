#include "effkern/reduction.hpp"

#include <cmath>
#include <numbers>
#include <thread>

#include "effkern/simd/kernels.hpp"

namespace effkern {

double Mollifier::transform(double s) const {
    double h = 0.5 * epsilon * s;
    if (std::fabs(h) < 1e-8) return 1.0 - h * h / 3.0;
    double sc = std::sin(h) / h;
    return sc * sc;
}

double Mollifier::real_space(double x) const {
    double t = std::fabs(x) / epsilon;
    return t >= 1.0 ? 0.0 : (1.0 - t) / epsilon;
}

const char* method_name(ReductionMethod m) {
    switch (m) {
    case ReductionMethod::exact_lambert: return "exact";
    case ReductionMethod::way_I: return "way1";
    case ReductionMethod::way_II: return "way2";
    }
    return "?";
}

namespace {

NetworkSpec spec_without_transport(NetworkSpec spec) {
    for (auto& t : spec.transport) t = TransportTerm::make_none();
    return spec;
}

} // namespace

RegularizedSymbol regularize(const SpectralSymbol& symbol, const LambdaH& lambda_h,
                             const RegularizationMode& mode) {
    const int n = symbol.size();
    auto damp = [mode](double s) {
        if (mode.variant == RegularizationMode::Variant::mollifier)
            return mode.mollifier.transform(s);
        return std::exp(-mode.epsilon * s * s);
    };

    if (mode.variant == RegularizationMode::Variant::split) {
        const NetworkSpec& spec = symbol.spec();
        for (const auto& t : spec.transport) {
            if (t.kind == TransportTerm::Kind::custom_kernel)
                throw UnsupportedError(
                    "regularize: split mode cannot classify the growth of a custom "
                    "transport; use uniform damping");
        }
        // Residual transports -(d_i + alpha) s^2 stay undamped (they are the
        // unbounded part); local and ring couplings are bounded and damped.
        Eigen::VectorXd resid = spec.diffusivities();
        double alpha = lambda_h.degree == 2 ? lambda_h.coefficient : 0.0;
        for (int i = 0; i < n; ++i) resid(i) += alpha; // -(d_i + alpha) s^2 below
        SpectralSymbol bounded(spec_without_transport(spec), symbol.dimension());
        return {n, [resid, bounded, damp](double s) {
                    Eigen::MatrixXd m = damp(s) * bounded.evaluate(s);
                    for (int i = 0; i < resid.size(); ++i)
                        m(i, i) += -resid(i) * s * s;
                    return m;
                }};
    }

    SymbolFn base = symbol.evaluator();
    LambdaH lh = lambda_h;
    return {n, [base, lh, damp, n](double s) {
                Eigen::MatrixXd m = base(s);
                double shift = lh(s);
                for (int i = 0; i < n; ++i) m(i, i) -= shift;
                return Eigen::MatrixXd(damp(s) * m);
            }};
}

namespace {

double curve_decay_ratio(const Eigen::VectorXd& v) {
    double peak = v.cwiseAbs().maxCoeff();
    if (peak == 0.0) return 0.0;
    return std::fabs(v(v.size() - 1)) / peak;
}

bool any_complex(const EigenBranches& eb) {
    for (int i = 0; i < eb.grid.n; ++i)
        for (int j = 0; j < eb.size(); ++j)
            if (eb.branches(i, j).imag() != 0.0) return true;
    return false;
}

} // namespace

ReducedSpectrum reduce_real(const RegularizedSymbol& sym, const WavenumberGrid& grid,
                            const LambdaH& lambda_h, const DelayParams& params,
                            ReductionMethod method, int threads) {
    EigenBranches eb = sample_eigenvalues(sym.fn, sym.size, grid, threads);
    if (method != ReductionMethod::way_II && any_complex(eb))
        throw ComplexBranches(
            "reduce_real: complex branches detected; use reduce_complex");

    ReducedSpectrum out;
    out.grid = grid;
    out.lambda_h = lambda_h;
    out.kind = ReducedSpectrum::Kind::scalar;
    out.method = method;
    out.mu.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < eb.size(); ++j) {
            double z = eb.branches(i, j).real();
            double m = z;
            if (method == ReductionMethod::exact_lambert) m = mu_exact(z, params.delta);
            else if (method == ReductionMethod::way_I) m = mu_rough(z, params.delta);
            best = std::max(best, m);
        }
        out.mu(i) = best;
    }
    out.decay_ratio = curve_decay_ratio(out.mu);
    return out;
}

ReducedSpectrum reduce_complex(const RegularizedSymbol& sym, const WavenumberGrid& grid,
                               const LambdaH& lambda_h, const DelayParams& params,
                               ReductionMethod method, int threads) {
    if (method == ReductionMethod::exact_lambert)
        throw UnsupportedError(
            "reduce_complex: the exact Lambert route is only defined for real "
            "branches; use way_I or way_II");
    EigenBranches eb = sample_eigenvalues(sym.fn, sym.size, grid, threads);
    if (!eb.collision) {
        if (!eb.collision_diagnostic.empty())
            throw UnsupportedError("reduce_complex: " + eb.collision_diagnostic);
        throw UnsupportedError(
            "reduce_complex: no collision of the leading branches on the grid; "
            "use reduce_real");
    }
    const CollisionData& cd = *eb.collision;

    // The leading pair must carry the maximal real part everywhere.
    for (int i = 0; i < grid.n; ++i) {
        double lead = std::max(eb.branches(i, 0).real(), eb.branches(i, 1).real());
        double scale = std::max(1.0, std::fabs(lead));
        for (int j = 2; j < eb.size(); ++j) {
            if (eb.branches(i, j).real() > lead + 1e-9 * scale)
                throw UnsupportedError(
                    "reduce_complex: collision is not in the leading pair at s=" +
                    std::to_string(grid.point(i)));
        }
    }

    const double delta = params.delta;
    ReducedSpectrum out;
    out.grid = grid;
    out.lambda_h = lambda_h;
    out.kind = ReducedSpectrum::Kind::pair;
    out.method = method;
    out.xi_c = cd.xi_c;
    out.nu1.resize(grid.n);
    out.nu2.resize(grid.n);
    out.p.resize(grid.n);
    out.q.resize(grid.n);

    for (int i = 0; i < grid.n; ++i) {
        double b = cd.b(i);
        if (b == 0.0) {
            // Order the real pair so nu1 carries the larger branch; the two
            // curves meet at every window boundary, so both stay continuous.
            double z1 = std::max(eb.branches(i, 0).real(), eb.branches(i, 1).real());
            double z2 = std::min(eb.branches(i, 0).real(), eb.branches(i, 1).real());
            if (method == ReductionMethod::way_II) {
                out.nu1(i) = z1;
                out.nu2(i) = z2;
                out.p(i) = 1.0;
            } else {
                double m1 = mu_rough(z1, delta);
                double m2 = mu_rough(z2, delta);
                out.nu1(i) = m1;
                out.nu2(i) = m2;
                double dz = z2 - z1;
                // difference quotient of M*; derivative at the merge point
                out.p(i) = std::fabs(dz) < 1e-12 * std::max(1.0, std::fabs(z1))
                               ? std::exp(delta * z1) * (1.0 + delta * z1)
                               : (m2 - m1) / dz;
            }
            out.q(i) = 0.0;
        } else {
            double a = cd.a(i);
            if (method == ReductionMethod::way_II) {
                out.nu1(i) = a;
                out.nu2(i) = a;
                out.p(i) = 1.0;
                out.q(i) = -b * b;
            } else {
                double ea = std::exp(delta * a);
                double cdb = std::cos(delta * b);
                double sdb = std::sin(delta * b);
                double as = ea * (a * cdb - b * sdb);
                double bs = ea * (b * cdb + a * sdb);
                out.nu1(i) = as;
                out.nu2(i) = as;
                out.p(i) = ea * (cdb + a * sdb / b);
                out.q(i) = -bs * b;
            }
        }
    }
    Eigen::VectorXd lead = out.nu1.cwiseAbs().cwiseMax(out.nu2.cwiseAbs()).cwiseMax(out.q.cwiseAbs());
    out.decay_ratio = lead(grid.n - 1) / std::max(lead.maxCoeff(), 1e-300);
    return out;
}

// ---------------------------------------------------------------------------
// Kernel inversion
// ---------------------------------------------------------------------------

Eigen::VectorXd invert_kernel_1d(const WavenumberGrid& grid, const Eigen::VectorXd& mu,
                                 const Eigen::VectorXd& x) {
    const int nk = grid.n;
    const double ds = grid.spacing();
    Eigen::VectorXd coeff(nk);
    for (int k = 0; k < nk; ++k) {
        double w = (k == 0 || k == nk - 1) ? 0.5 : 1.0;
        coeff(k) = mu(k) * w * ds / std::numbers::pi;
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
    simd::ops().cosine_accumulate(out.data(), x.data(), x.size(), coeff.data(), nk,
                                  0.0, ds);
    return out;
}

namespace {

int theta_node_count(double z_max) {
    int n = 128;
    while (n < z_max * 1.2 && n < 16384) n *= 2;
    return n;
}

} // namespace

Eigen::VectorXd invert_kernel_radial(const WavenumberGrid& grid, const Eigen::VectorXd& mu,
                                     const Eigen::VectorXd& r, int threads) {
    const int nk = grid.n;
    const int nr = static_cast<int>(r.size());
    const double ds = grid.spacing();
    const double pi = std::numbers::pi;

    Eigen::VectorXd base(nk); // trapezoid-weighted R mu(R) dR
    for (int k = 0; k < nk; ++k) {
        double w = (k == 0 || k == nk - 1) ? 0.5 : 1.0;
        base(k) = grid.point(k) * mu(k) * w * ds;
    }

    const double z_max = r.maxCoeff() * grid.s_max;
    const int ntheta = theta_node_count(z_max);
    const double h = (pi / 2.0) / ntheta;

    Eigen::VectorXd quad = Eigen::VectorXd::Zero(nr);
    auto run_rows = [&](int lo, int hi) {
        if (lo >= hi) return;
        Eigen::VectorXd xs(hi - lo);
        Eigen::VectorXd coeff(nk);
        for (int m = 0; m <= ntheta; ++m) {
            double wt = (m == 0 || m == ntheta) ? 0.5 : 1.0;
            double sin_t = std::sin(m * h);
            double factor = wt * h / (pi * pi);
            for (int k = 0; k < nk; ++k) coeff(k) = base(k) * factor;
            for (int j = lo; j < hi; ++j) xs(j - lo) = r(j) * sin_t;
            simd::ops().cosine_accumulate(quad.data() + lo, xs.data(), hi - lo,
                                          coeff.data(), nk, 0.0, ds);
        }
    };
    int nthreads = std::max(1, threads);
    if (nthreads == 1) {
        run_rows(0, nr);
    } else {
        std::vector<std::thread> pool;
        int chunk = (nr + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back(run_rows, t * chunk, std::min(nr, (t + 1) * chunk));
        for (auto& th : pool) th.join();
    }

    // Independent Bessel route: (1/2pi) int R mu(R) J0(rR) dR.
    Eigen::VectorXd bessel = Eigen::VectorXd::Zero(nr);
    auto run_bessel = [&](int lo, int hi) {
        for (int j = lo; j < hi; ++j) {
            double acc = 0.0;
            for (int k = 0; k < nk; ++k)
                acc += base(k) * std::cyl_bessel_j(0.0, r(j) * grid.point(k));
            bessel(j) = acc / (2.0 * pi);
        }
    };
    if (nthreads == 1) {
        run_bessel(0, nr);
    } else {
        std::vector<std::thread> pool;
        int chunk = (nr + nthreads - 1) / nthreads;
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back(run_bessel, t * chunk, std::min(nr, (t + 1) * chunk));
        for (auto& th : pool) th.join();
    }

    double scale = std::max(1.0, quad.cwiseAbs().maxCoeff());
    double diff = (quad - bessel).cwiseAbs().maxCoeff();
    if (diff > 1e-8 * scale)
        throw std::runtime_error(
            "invert_kernel_radial: theta-quadrature and Bessel routes disagree by " +
            std::to_string(diff));
    return quad;
}

// ---------------------------------------------------------------------------
// Effective system assembly
// ---------------------------------------------------------------------------

Eigen::VectorXd symmetric_grid(int n, double dx) {
    Eigen::VectorXd x(n);
    for (int j = 0; j < n; ++j) x(j) = (j - n / 2) * dx;
    return x;
}

Eigen::VectorXd radial_grid(int n, double dr) {
    Eigen::VectorXd r(n);
    for (int j = 0; j < n; ++j) r(j) = j * dr;
    return r;
}

EffectiveSystem build_effective_system(const ReducedSpectrum& spectrum, int dimension,
                                       const Eigen::VectorXd& kernel_grid,
                                       const CutoffSpec& cutoff, int threads) {
    EffectiveSystem sys;
    sys.lambda_h = spectrum.lambda_h;
    sys.dimension = dimension;
    sys.spectrum = spectrum;
    sys.cutoff = cutoff;

    if (!spectrum.decayed())
        sys.warnings.push_back("insufficient spectrum decay at s_max (ratio=" +
                               std::to_string(spectrum.decay_ratio) + ")");

    auto invert = [&](const Eigen::VectorXd& curve) {
        KernelProfile prof;
        prof.x = kernel_grid;
        prof.values = dimension == 1
                          ? invert_kernel_1d(spectrum.grid, curve, kernel_grid)
                          : invert_kernel_radial(spectrum.grid, curve, kernel_grid, threads);
        return prof;
    };

    if (spectrum.kind == ReducedSpectrum::Kind::scalar) {
        sys.K = invert(spectrum.mu);
        return sys;
    }

    sys.K = invert(spectrum.nu1);
    sys.M = invert(spectrum.q);
    sys.N = invert(spectrum.nu2);
    PairCoupling l;
    l.identity_gain = 1.0;
    if (spectrum.method == ReductionMethod::way_I) {
        // p~ tends to 1 at infinity; invert the decaying remainder and keep
        // the delta component as an identity coupling.
        Eigen::VectorXd rem = spectrum.p.array() - 1.0;
        l.kernel = invert(rem);
    }
    sys.L = l;
    return sys;
}

} // namespace effkern
