#pragma once

#include <functional>

#include <Eigen/Dense>

#include "effkern/netspec.hpp"

namespace effkern {

// N x N real matrix family evaluated at a wavenumber s >= 0.
using SymbolFn = std::function<Eigen::MatrixXd(double)>;

// Transform of one transport term at wavenumber s:
//   diffusion(d) -> -d s^2, none -> 0, custom -> interpolated samples.
double fourier_transport(const TransportTerm& term, double s, int dimension);

// Unit-mass ring transform: cos(s l) in 1D, J0(l s) in 2D (evaluated by
// adaptive trapezoid quadrature over theta in [0, pi/2], normalized so the
// value at s = 0 is 1).
double ring_transform(double l, double s, int dimension);

// Total mass of the ring coupling measure: the two points at distance l in
// 1D, the circle of radius l in 2D. Ring gains enter the symbol multiplied
// by this mass; see the README section on ring conventions.
double ring_mass(double l, int dimension);

class SpectralSymbol {
  public:
    SpectralSymbol(NetworkSpec spec, int dimension);

    int size() const { return spec_.size(); }
    int dimension() const { return dimension_; }
    const NetworkSpec& spec() const { return spec_; }

    // B(s) = diag(transport transforms) + A(s), where ring-range gains are
    // weighted by ring_mass * ring_transform and local gains are constant.
    Eigen::MatrixXd evaluate(double s) const;

    SymbolFn evaluator() const;

  private:
    NetworkSpec spec_;
    int dimension_;
    Eigen::MatrixXd local_; // constant local part
    struct RingTerm {
        int row, col;
        double gain;
        double l;
    };
    std::vector<RingTerm> rings_;
};

// Validates the spec and builds the symbol; throws std::invalid_argument
// listing the validation errors when the spec is unusable.
SpectralSymbol assemble_symbol(const NetworkSpec& spec, int dimension);

} // namespace effkern
