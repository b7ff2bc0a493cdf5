#pragma once

#include "effkern/reduction.hpp"

namespace effkern {

// One-call wiring of spec -> symbol -> branches -> lambda_h -> regularized
// spectrum -> real-space kernels, with the exact/way switching rules.
struct ReduceOptions {
    int dimension = 1;
    ReductionMethod method = ReductionMethod::way_II;
    // regularization variant; empty = method default (way II: uniform,
    // exact / way I: split)
    std::optional<RegularizationMode::Variant> variant;
    double epsilon = 0.05;
    double delta = 0.1;
    double s_max = 40.0;
    int samples = 4096;
    double fit_window = 0.2;
    // kernel grid: 1D symmetric x grid with spacing pi/s_max and
    // kernel_points samples; 2D radial grid up to kernel_extent
    int kernel_points = 0;       // 0: samples (1D) or extent-derived (2D)
    double kernel_extent = 40.0; // 2D radial reach
    double kernel_spacing = 0.0; // 2D radial spacing; 0: pi/s_max
    double u_star = 1.0;
    int threads = 1;
};

struct ReduceArtifacts {
    SpectralSymbol symbol;
    EigenBranches branches; // of the plain symbol
    LambdaH lambda_h;
    ReducedSpectrum spectrum;
    EffectiveSystem system;
};

// Runs the full reduction. Scalar reductions that hit complex branches
// fall through to the pair construction for ways I/II; the exact route
// propagates ComplexBranches.
ReduceArtifacts run_reduction(const NetworkSpec& spec, const ReduceOptions& opt);

// Reduction on a wavenumber grid matched to an n-point dx-spaced periodic
// field, so the sampled kernels drop onto the simulation grid directly.
ReduceArtifacts run_reduction_matched(const NetworkSpec& spec, ReduceOptions opt,
                                      int grid_n, double dx);

} // namespace effkern
