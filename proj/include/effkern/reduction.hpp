#pragma once

#include <optional>
#include <string>
#include <vector>

#include "effkern/eigenflow.hpp"
#include "effkern/lambertw.hpp"
#include "effkern/symbol.hpp"

namespace effkern {

// Signals that the regularized symbol has complex branches, which the
// requested scalar reduction cannot handle; callers switch to
// reduce_complex.
struct ComplexBranches : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unit-mass triangular bump (1 - |x|) on [-1, 1], scaled to width epsilon.
// Its transform sinc^2(eps s / 2) is nonnegative everywhere.
struct Mollifier {
    double epsilon = 0.05;
    double mass = 1.0;               // integral of J
    double second_moment = 1.0 / 12.0; // (1/2) * int x^2 J(x) dx
    bool transform_nonneg = true;

    double transform(double s) const;  // Fourier transform of J_eps at s
    double real_space(double x) const; // J_eps(x)
};

struct RegularizationMode {
    enum class Variant { split, uniform, mollifier };
    Variant variant = Variant::uniform;
    double epsilon = 0.05;
    Mollifier mollifier{}; // used by the mollifier variant

    static RegularizationMode split(double eps) { return {Variant::split, eps, {eps}}; }
    static RegularizationMode uniform(double eps) { return {Variant::uniform, eps, {eps}}; }
    static RegularizationMode with_mollifier(double eps) {
        return {Variant::mollifier, eps, {eps}};
    }
};

struct RegularizedSymbol {
    int size = 0;
    SymbolFn fn;
};

enum class ReductionMethod { exact_lambert, way_I, way_II };
const char* method_name(ReductionMethod m);

struct ReducedSpectrum {
    enum class Kind { scalar, pair };
    WavenumberGrid grid;
    LambdaH lambda_h;
    Kind kind = Kind::scalar;
    ReductionMethod method = ReductionMethod::way_II;

    Eigen::VectorXd mu; // scalar kind: mu_max samples

    // pair kind: the unified two-field curves
    Eigen::VectorXd nu1, nu2, p, q;
    double xi_c = 0.0;

    // |value at s_max| / max |value| of the leading curve
    double decay_ratio = 0.0;
    bool decayed() const { return decay_ratio <= 1e-4; }
};

// B_eps evaluator per regularization variant:
//   split:    undamped residual transports + damp(s) * bounded part
//   uniform:  damp(s) * (B(s) - lambda_h(s) I)
// with damp = exp(-eps s^2), or the mollifier transform for the
// mollifier variant (uniform form). The split classification is symbolic:
// diffusion transports grow, local/ring couplings are bounded; split with
// custom transports is rejected.
RegularizedSymbol regularize(const SpectralSymbol& symbol, const LambdaH& lambda_h,
                             const RegularizationMode& mode);

// Scalar reduction. exact_lambert / way_I require real branches (throws
// ComplexBranches otherwise); way_II takes max_j Re.
ReducedSpectrum reduce_real(const RegularizedSymbol& sym, const WavenumberGrid& grid,
                            const LambdaH& lambda_h, const DelayParams& params,
                            ReductionMethod method, int threads = 1);

// Pair reduction over the leading-pair collision structure (way_I /
// way_II). The unified curves are pointwise in s, so re-colliding pairs
// (several complex windows) are handled; the pair must carry the maximal
// real part everywhere, otherwise the structure is unsupported.
ReducedSpectrum reduce_complex(const RegularizedSymbol& sym, const WavenumberGrid& grid,
                               const LambdaH& lambda_h, const DelayParams& params,
                               ReductionMethod method, int threads = 1);

// K(x) = (1/pi) int_0^smax mu(s) cos(s x) ds, composite trapezoid.
Eigen::VectorXd invert_kernel_1d(const WavenumberGrid& grid, const Eigen::VectorXd& mu,
                                 const Eigen::VectorXd& x);

// Radial inverse transform, evaluated twice: theta-quadrature double
// integral and the Bessel-J0 form. The two must agree to 1e-8; the
// quadrature result is returned.
Eigen::VectorXd invert_kernel_radial(const WavenumberGrid& grid, const Eigen::VectorXd& mu,
                                     const Eigen::VectorXd& r, int threads = 1);

struct CutoffSpec {
    double u_star = 1.0; // chi(u) = 0 for |u| >= u_star
};

struct KernelProfile {
    Eigen::VectorXd x;      // positions (radii in 2D)
    Eigen::VectorXd values;
};

// Cross-coupling slot of the pair system: identity_gain * Y plus an
// optional convolution. Way II reduces it to the bare identity.
struct PairCoupling {
    double identity_gain = 1.0;
    std::optional<KernelProfile> kernel;
};

struct EffectiveSystem {
    LambdaH lambda_h; // differential part; spectral multiplier lambda_h(s)
    int dimension = 1;
    ReducedSpectrum spectrum;
    CutoffSpec cutoff;

    KernelProfile K;                 // scalar kind kernel, or the X<-X kernel
    std::optional<PairCoupling> L;   // pair kind: X<-Y coupling
    std::optional<KernelProfile> M;  // pair kind: Y<-X kernel
    std::optional<KernelProfile> N;  // pair kind: Y<-Y kernel

    std::vector<std::string> warnings;

    bool pair() const { return spectrum.kind == ReducedSpectrum::Kind::pair; }
};

// Invert the reduced curves onto the kernel grid: a symmetric x grid in 1D
// or an ascending radius grid in 2D.
EffectiveSystem build_effective_system(const ReducedSpectrum& spectrum, int dimension,
                                       const Eigen::VectorXd& kernel_grid,
                                       const CutoffSpec& cutoff, int threads = 1);

// x_j = (j - n/2) dx; with dx = pi / s_max this matches the simulation grid
// so the sampled kernel needs no re-interpolation.
Eigen::VectorXd symmetric_grid(int n, double dx);
Eigen::VectorXd radial_grid(int n, double dr);

} // namespace effkern
