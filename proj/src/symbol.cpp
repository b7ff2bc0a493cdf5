#include "effkern/symbol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace effkern {

double fourier_transport(const TransportTerm& term, double s, int dimension) {
    (void)dimension; // radial transforms coincide with the 1D forms used here
    if (!std::isfinite(s)) throw std::invalid_argument("fourier_transport: s not finite");
    switch (term.kind) {
    case TransportTerm::Kind::none:
        return 0.0;
    case TransportTerm::Kind::diffusion:
        return -term.d * s * s;
    case TransportTerm::Kind::custom_kernel: {
        const auto& smp = term.samples;
        double a = std::fabs(s);
        if (smp.empty()) return 0.0;
        if (a <= smp.front().first) return smp.front().second;
        if (a >= smp.back().first) return smp.back().second;
        // linear interpolation between bracketing samples
        for (std::size_t i = 1; i < smp.size(); ++i) {
            if (a <= smp[i].first) {
                double t = (a - smp[i - 1].first) / (smp[i].first - smp[i - 1].first);
                return smp[i - 1].second + t * (smp[i].second - smp[i - 1].second);
            }
        }
        return smp.back().second;
    }
    }
    return 0.0;
}

namespace {

// Trapezoid over theta in [0, pi/2] of cos(z sin(theta)). The integrand is
// symmetric about both endpoints, so the rule converges spectrally; refine
// by doubling until two levels agree to 1e-12.
double ring_quadrature(double z) {
    auto trap = [&](int n) {
        double h = (std::numbers::pi / 2.0) / n;
        double sum = 0.5 * (std::cos(0.0) + std::cos(z));
        for (int i = 1; i < n; ++i) sum += std::cos(z * std::sin(i * h));
        return sum * h;
    };
    int n = 128;
    double prev = trap(n);
    for (; n <= (1 << 20); ) {
        n *= 2;
        double cur = trap(n);
        if (std::fabs(cur - prev) < 1e-12) return cur;
        prev = cur;
    }
    return prev;
}

} // namespace

double ring_transform(double l, double s, int dimension) {
    if (!(l > 0.0)) throw std::invalid_argument("ring_transform: l must be positive");
    if (!std::isfinite(s)) throw std::invalid_argument("ring_transform: s not finite");
    double z = l * std::fabs(s);
    if (dimension == 1) return std::cos(z);
    return ring_quadrature(z) / (std::numbers::pi / 2.0);
}

double ring_mass(double l, int dimension) {
    return dimension == 1 ? 2.0 : 2.0 * std::numbers::pi * l;
}

SpectralSymbol::SpectralSymbol(NetworkSpec spec, int dimension)
    : spec_(std::move(spec)), dimension_(dimension) {
    if (dimension != 1 && dimension != 2)
        throw std::invalid_argument("SpectralSymbol: dimension must be 1 or 2");
    local_ = spec_.local_matrix();
    for (const auto& e : spec_.interactions) {
        if (!e.ring_l) continue;
        rings_.push_back({spec_.index_of(e.target), spec_.index_of(e.source),
                          e.gain * ring_mass(*e.ring_l, dimension_), *e.ring_l});
    }
}

Eigen::MatrixXd SpectralSymbol::evaluate(double s) const {
    Eigen::MatrixXd b = local_;
    for (int i = 0; i < size(); ++i)
        b(i, i) += fourier_transport(spec_.transport[i], s, dimension_);
    for (const auto& r : rings_)
        b(r.row, r.col) += r.gain * ring_transform(r.l, s, dimension_);
    return b;
}

SymbolFn SpectralSymbol::evaluator() const {
    return [sym = *this](double s) { return sym.evaluate(s); };
}

SpectralSymbol assemble_symbol(const NetworkSpec& spec, int dimension) {
    ValidationReport rep = validate(spec);
    if (!rep.ok()) {
        std::string msg = "assemble_symbol: invalid spec:";
        for (const auto& e : rep.errors) msg += "\n  " + e.location + ": " + e.message;
        throw std::invalid_argument(msg);
    }
    return SpectralSymbol(spec, dimension);
}

} // namespace effkern
