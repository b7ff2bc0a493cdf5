#include "effkern/pipeline.hpp"

#include <cmath>
#include <numbers>

namespace effkern {

namespace {

RegularizationMode make_mode(const ReduceOptions& opt) {
    RegularizationMode::Variant v;
    if (opt.variant) {
        v = *opt.variant;
    } else {
        v = opt.method == ReductionMethod::way_II ? RegularizationMode::Variant::uniform
                                                  : RegularizationMode::Variant::split;
    }
    RegularizationMode mode;
    mode.variant = v;
    mode.epsilon = opt.epsilon;
    mode.mollifier = Mollifier{opt.epsilon};
    return mode;
}

} // namespace

ReduceArtifacts run_reduction(const NetworkSpec& spec, const ReduceOptions& opt) {
    SpectralSymbol symbol = assemble_symbol(spec, opt.dimension);
    WavenumberGrid grid{opt.s_max, opt.samples};
    EigenBranches branches = sample_eigenvalues(symbol, grid, opt.threads);
    LambdaH lambda_h = fit_lambda_h(branches, opt.fit_window);
    RegularizedSymbol reg = regularize(symbol, lambda_h, make_mode(opt));
    DelayParams params{opt.delta, opt.epsilon};

    ReducedSpectrum spectrum;
    if (opt.method == ReductionMethod::exact_lambert) {
        spectrum = reduce_real(reg, grid, lambda_h, params, opt.method, opt.threads);
    } else {
        // a collision of the leading pair selects the two-field construction
        EigenBranches reg_branches = sample_eigenvalues(reg.fn, reg.size, grid, opt.threads);
        if (reg_branches.collision) {
            spectrum = reduce_complex(reg, grid, lambda_h, params, opt.method, opt.threads);
        } else {
            spectrum = reduce_real(reg, grid, lambda_h, params, opt.method, opt.threads);
        }
    }

    Eigen::VectorXd kernel_grid;
    if (opt.dimension == 1) {
        double spacing = std::numbers::pi / opt.s_max;
        int n = opt.kernel_points > 0 ? opt.kernel_points : opt.samples;
        kernel_grid = symmetric_grid(n, spacing);
    } else {
        double spacing =
            opt.kernel_spacing > 0.0 ? opt.kernel_spacing : std::numbers::pi / opt.s_max;
        int n = opt.kernel_points > 0
                    ? opt.kernel_points
                    : static_cast<int>(std::ceil(opt.kernel_extent / spacing)) + 1;
        kernel_grid = radial_grid(n, spacing);
    }
    EffectiveSystem system = build_effective_system(spectrum, opt.dimension, kernel_grid,
                                                    CutoffSpec{opt.u_star}, opt.threads);
    return {std::move(symbol), std::move(branches), lambda_h, std::move(spectrum),
            std::move(system)};
}

ReduceArtifacts run_reduction_matched(const NetworkSpec& spec, ReduceOptions opt,
                                      int grid_n, double dx) {
    const double pi = std::numbers::pi;
    if (opt.dimension == 1) {
        // sample the reduction exactly on the field's r2c mode set
        opt.s_max = pi / dx;
        opt.samples = grid_n / 2 + 1;
        opt.kernel_points = grid_n;
        ReduceArtifacts art = run_reduction(spec, opt);
        return art;
    }
    // 2D: cover the corner modes and resolve the radial profile at half the
    // grid spacing; the kernel is interpolated onto the torus by radius
    opt.s_max = pi / dx * std::numbers::sqrt2;
    opt.samples = std::max(opt.samples, 2048);
    double r_max = grid_n * dx * std::numbers::sqrt2 / 2.0 + 2.0 * dx;
    opt.kernel_spacing = dx / 2.0;
    opt.kernel_points = static_cast<int>(std::ceil(r_max / opt.kernel_spacing)) + 1;
    ReduceArtifacts art = run_reduction(spec, opt);
    return art;
}

} // namespace effkern
