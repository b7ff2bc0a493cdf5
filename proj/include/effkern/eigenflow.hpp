#pragma once

#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "effkern/symbol.hpp"

namespace effkern {

// Network structures outside the supported reduction theory (multiple
// complex windows, non-leading collisions, ambiguous asymptotes, ...).
struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WavenumberGrid {
    double s_max = 40.0;
    int n = 4096;

    double point(int i) const { return s_max * i / (n - 1); }
    double spacing() const { return s_max / (n - 1); }
    bool valid() const { return n >= 16 && s_max > 0.0; }
};

// Real -> complex merge structure of the two leading branches. Oscillating
// ring couplings can re-collide the pair, so the complex region may consist
// of several windows; xi_c marks the first merge and b is 0 on every real
// stretch.
struct CollisionData {
    double xi_c = 0.0;
    Eigen::VectorXd a; // Re of the leading pair
    Eigen::VectorXd b; // positive Im of the pair; exactly 0 where real
    int windows = 1;   // number of contiguous complex windows on the grid
};

struct EigenBranches {
    WavenumberGrid grid;
    // One row per sample, one column per branch. Branch 0 has the largest
    // real part at s = 0; pairing between adjacent samples is by
    // minimal-total-distance assignment.
    Eigen::MatrixXcd branches;
    Eigen::VectorXd lambda_max; // pointwise max_j Re
    std::optional<CollisionData> collision;
    // Set when the collision structure is outside the supported theory
    // (multiple windows, ...); collision is empty in that case.
    std::string collision_diagnostic;

    int size() const { return static_cast<int>(branches.cols()); }
};

// Leading term of the asymptotic profile of lambda_max: 0 or coeff * s^2.
struct LambdaH {
    int degree = 0;          // 0 or 2
    double coefficient = 0.0; // < 0 when degree == 2
    double intercept = 0.0;   // degree-0 fit constant (diagnostic only)
    double fit_residual = 0.0;

    double operator()(double s) const {
        return degree == 2 ? coefficient * s * s : 0.0;
    }
};

// Sample eigenvalues of fn over the grid and continuity-track branches.
// Deterministic for any thread count (threads only parallelize the
// per-sample solves). Populates `collision` when the two leading branches
// merge into a conjugate pair on the grid.
EigenBranches sample_eigenvalues(const SymbolFn& fn, int size,
                                 const WavenumberGrid& grid, int threads = 1);

inline EigenBranches sample_eigenvalues(const SpectralSymbol& sym,
                                        const WavenumberGrid& grid,
                                        int threads = 1) {
    return sample_eigenvalues(sym.evaluator(), sym.size(), grid, threads);
}

// Least-squares fit of lambda_max ~ alpha s^2 + beta over the top
// `fit_window` fraction of the grid. Throws UnsupportedError when the fit
// residual leaves the asymptote ambiguous.
LambdaH fit_lambda_h(const EigenBranches& branches, double fit_window = 0.2);

// Locate the collision of the two leading branches, refining xi_c by
// bisection on the sign of the pair's squared imaginary part (32x local
// oversampling). nullopt when the leading pair stays real.
std::optional<CollisionData> detect_collision(const SymbolFn& fn, int size,
                                              const EigenBranches& branches);

} // namespace effkern
