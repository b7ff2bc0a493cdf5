#include <doctest.h>

#include <cmath>
#include <numbers>

#include "effkern/reduction.hpp"

using namespace effkern;

namespace {

NetworkSpec collision_spec(double diag) {
    // B(s) = [[diag + T(s), 1], [-1, diag]] with T falling linearly 4 -> 0
    // over s in [0,4]; discriminant (T(s))^2 - 4 crosses zero at s = 2,
    // where both eigenvalues equal diag + 1.
    NetworkSpec s;
    s.components = {"a", "b"};
    TransportTerm ramp;
    ramp.kind = TransportTerm::Kind::custom_kernel;
    ramp.samples = {{0.0, 4.0}, {4.0, 0.0}};
    s.transport = {ramp, TransportTerm::make_none()};
    s.interactions.push_back({"a", "a", diag, std::nullopt});
    s.interactions.push_back({"b", "b", diag, std::nullopt});
    s.interactions.push_back({"b", "a", 1.0, std::nullopt});
    s.interactions.push_back({"a", "b", -1.0, std::nullopt});
    return s;
}

} // namespace

TEST_CASE("mollifier: mass, second moment and nonnegative transform") {
    Mollifier m{0.05};
    // quadrature over the triangular bump
    double mass = 0.0, second = 0.0;
    int n = 40000;
    double h = 2.0 * m.epsilon / n;
    for (int i = 0; i <= n; ++i) {
        double x = -m.epsilon + i * h;
        double w = (i == 0 || i == n) ? 0.5 : 1.0;
        mass += w * h * m.real_space(x);
        second += w * h * x * x * m.real_space(x);
    }
    CHECK(mass == doctest::Approx(m.mass).epsilon(1e-8));
    CHECK(0.5 * second == doctest::Approx(m.second_moment * m.epsilon * m.epsilon).epsilon(1e-6));
    for (double s = 0.0; s < 400.0; s += 1.7) CHECK(m.transform(s) >= 0.0);
}

TEST_CASE("mollifier transform agrees with direct quadrature of J_eps") {
    Mollifier m{0.1};
    int n = 20000;
    double h = 2.0 * m.epsilon / n;
    for (double s : {0.0, 1.0, 7.3, 31.0}) {
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            double x = -m.epsilon + i * h;
            double w = (i == 0 || i == n) ? 0.5 : 1.0;
            acc += w * h * m.real_space(x) * std::cos(s * x);
        }
        CHECK(m.transform(s) == doctest::Approx(acc).epsilon(1e-8));
    }
}

TEST_CASE("mollifier expansion J*u = u + eps^2 gamma1 u'' + O(eps^4)") {
    // For u = cos(kx) the sup-norm error is |J^(eps k) - 1 + eps^2 k^2/12|;
    // fitted order in eps must be >= 3.5 across a halving ladder.
    const double k = 3.0;
    Mollifier base{1.0};
    std::vector<double> eps = {0.1, 0.05, 0.025};
    std::vector<double> err;
    for (double e : eps) {
        Mollifier m{e};
        err.push_back(std::fabs(m.transform(k) - 1.0 + e * e * k * k * m.second_moment));
    }
    double slope1 = std::log(err[0] / err[1]) / std::log(2.0);
    double slope2 = std::log(err[1] / err[2]) / std::log(2.0);
    CHECK(slope1 >= 3.5);
    CHECK(slope2 >= 3.5);
}

TEST_CASE("regularize split reproduces the activator-inhibitor structure") {
    SpectralSymbol sym = assemble_symbol(builtin_preset("activator_inhibitor"), 1);
    LambdaH lh{2, -0.05, 0.0, 0.0};
    RegularizedSymbol reg = regularize(sym, lh, RegularizationMode::split(0.05));
    for (double s : {0.0, 1.0, 3.0, 10.0}) {
        double damp = std::exp(-0.05 * s * s);
        Eigen::MatrixXd want(2, 2);
        want << damp * 1.0, damp * -1.0, damp * 4.0, -(3.0 - 0.05) * s * s + damp * -3.0;
        CHECK((reg.fn(s) - want).cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + s * s));
    }
}

TEST_CASE("regularize uniform leaves s=0 unchanged and damps elsewhere") {
    SpectralSymbol sym = assemble_symbol(builtin_preset("three_node"), 2);
    LambdaH lh; // degree 0
    RegularizedSymbol reg = regularize(sym, lh, RegularizationMode::uniform(0.05));
    CHECK((reg.fn(0.0) - sym.evaluate(0.0)).cwiseAbs().maxCoeff() == 0.0);
    for (double s : {0.5, 2.0, 11.0}) {
        Eigen::MatrixXd want = std::exp(-0.05 * s * s) * sym.evaluate(s);
        CHECK((reg.fn(s) - want).cwiseAbs().maxCoeff() <= 1e-14 * want.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("regularize mollifier variant uses the bump transform") {
    SpectralSymbol sym = assemble_symbol(builtin_preset("three_node"), 2);
    LambdaH lh;
    RegularizationMode mode = RegularizationMode::with_mollifier(0.05);
    RegularizedSymbol reg = regularize(sym, lh, mode);
    for (double s : {0.0, 1.0, 5.0}) {
        Eigen::MatrixXd want = mode.mollifier.transform(s) * sym.evaluate(s);
        CHECK((reg.fn(s) - want).cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + want.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("regularize split refuses custom transports") {
    NetworkSpec spec = collision_spec(-1.5);
    SpectralSymbol sym = assemble_symbol(spec, 1);
    CHECK_THROWS_AS(regularize(sym, LambdaH{}, RegularizationMode::split(0.05)),
                    UnsupportedError);
}

TEST_CASE("reduce_real exact on the activator-inhibitor preset") {
    SpectralSymbol sym = assemble_symbol(builtin_preset("activator_inhibitor"), 1);
    WavenumberGrid grid{40.0, 2048};
    EigenBranches eb = sample_eigenvalues(sym, grid);
    LambdaH lh = fit_lambda_h(eb);
    RegularizedSymbol reg = regularize(sym, lh, RegularizationMode::split(0.05));
    ReducedSpectrum rs = reduce_real(reg, grid, lh, DelayParams{}, ReductionMethod::exact_lambert);
    CHECK(rs.mu(0) == doctest::Approx(-1.0).epsilon(1e-9)); // double root, m(-1) = -1
    CHECK(rs.mu.maxCoeff() > 0.1);                          // unstable hump
    CHECK(rs.decayed());
}

TEST_CASE("reduce_real way II on three_node matches the sign structure") {
    SpectralSymbol sym = assemble_symbol(builtin_preset("three_node"), 2);
    WavenumberGrid grid{40.0, 2048};
    LambdaH lh = fit_lambda_h(sample_eigenvalues(sym, grid));
    REQUIRE(lh.degree == 0);
    RegularizedSymbol reg = regularize(sym, lh, RegularizationMode::uniform(0.05));
    ReducedSpectrum rs = reduce_real(reg, grid, lh, DelayParams{}, ReductionMethod::way_II);
    CHECK(rs.mu(0) <= 1e-10); // exact zero eigenvalue at s = 0 (det A = 0)
    CHECK(rs.mu.maxCoeff() > 0.01);
    CHECK(rs.decayed());
}

TEST_CASE("single diffusing component reduces to exactly zero") {
    NetworkSpec spec;
    spec.components = {"u"};
    spec.transport = {TransportTerm::make_diffusion(0.7)};
    SpectralSymbol sym = assemble_symbol(spec, 1);
    WavenumberGrid grid{40.0, 1024};
    LambdaH lh = fit_lambda_h(sample_eigenvalues(sym, grid));
    REQUIRE(lh.degree == 2);
    CHECK(lh.coefficient == doctest::Approx(-0.7).epsilon(1e-10));
    RegularizedSymbol reg = regularize(sym, lh, RegularizationMode::uniform(0.05));
    ReducedSpectrum rs = reduce_real(reg, grid, lh, DelayParams{}, ReductionMethod::exact_lambert);
    CHECK(rs.mu.cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("exact and way II agree where branches stay above -1/delta") {
    SpectralSymbol sym = assemble_symbol(builtin_preset("activator_inhibitor"), 1);
    WavenumberGrid grid{40.0, 1024};
    LambdaH lh = fit_lambda_h(sample_eigenvalues(sym, grid));
    RegularizedSymbol reg = regularize(sym, lh, RegularizationMode::uniform(0.05));
    ReducedSpectrum a = reduce_real(reg, grid, lh, DelayParams{}, ReductionMethod::exact_lambert);
    ReducedSpectrum b = reduce_real(reg, grid, lh, DelayParams{}, ReductionMethod::way_II);
    // the max branch lies in (-1, 0.7] everywhere, so W0 is the identity
    CHECK((a.mu - b.mu).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("reduce_real rejects complex branches for exact and way I") {
    NetworkSpec rot;
    rot.components = {"a", "b"};
    rot.transport = {TransportTerm::make_none(), TransportTerm::make_none()};
    rot.interactions.push_back({"b", "a", -1.0, std::nullopt});
    rot.interactions.push_back({"a", "b", 1.0, std::nullopt});
    SpectralSymbol sym = assemble_symbol(rot, 1);
    WavenumberGrid grid{10.0, 64};
    RegularizedSymbol reg = regularize(sym, LambdaH{}, RegularizationMode::uniform(0.05));
    CHECK_THROWS_AS(
        reduce_real(reg, grid, LambdaH{}, DelayParams{}, ReductionMethod::exact_lambert),
        ComplexBranches);
    CHECK_THROWS_AS(
        reduce_real(reg, grid, LambdaH{}, DelayParams{}, ReductionMethod::way_I),
        ComplexBranches);
    // way II takes max Re and is fine with them
    ReducedSpectrum rs = reduce_real(reg, grid, LambdaH{}, DelayParams{}, ReductionMethod::way_II);
    CHECK(rs.mu(0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("reduce_complex way II: p == 1 and q == -b^2") {
    SpectralSymbol sym = assemble_symbol(builtin_preset("proneural_salt_pepper"), 2);
    WavenumberGrid grid{40.0, 1024};
    LambdaH lh = fit_lambda_h(sample_eigenvalues(sym, grid));
    RegularizedSymbol reg = regularize(sym, lh, RegularizationMode::uniform(0.05));
    ReducedSpectrum rs = reduce_complex(reg, grid, lh, DelayParams{}, ReductionMethod::way_II);
    EigenBranches rb = sample_eigenvalues(reg.fn, reg.size, grid);
    REQUIRE(rb.collision.has_value());
    for (int i = 0; i < grid.n; ++i) {
        CHECK(rs.p(i) == 1.0);
        double b = rb.collision->b(i);
        CHECK(rs.q(i) == -b * b);
        CHECK(rs.nu1(i) >= rs.nu2(i));
    }
    CHECK(rs.xi_c == 0.0); // complex from the origin for this preset
}

TEST_CASE("reduce_complex way I: collision-point value of the L-curve") {
    // Engineered collision at s = 2 with pair value -0.5 there:
    // p*(xi_c) = e^{delta a}(1 + delta a) = e^{-0.05} * 0.95.
    NetworkSpec spec = collision_spec(-1.5);
    SpectralSymbol sym = assemble_symbol(spec, 1);
    WavenumberGrid grid{8.0, 129}; // s = 2 is a grid point
    LambdaH lh = fit_lambda_h(sample_eigenvalues(sym, grid));
    REQUIRE(lh.degree == 0);
    // negligible damping so the engineered pair value stays -0.5
    RegularizedSymbol reg = regularize(sym, lh, RegularizationMode::uniform(1e-12));
    DelayParams params{0.1, 1e-12};
    ReducedSpectrum rs = reduce_complex(reg, grid, lh, params, ReductionMethod::way_I);
    int ic = 32; // s = 2.0
    CHECK(grid.point(ic) == doctest::Approx(2.0).epsilon(1e-14));
    double want = std::exp(-0.05) * (1.0 - 0.05);
    CHECK(rs.p(ic) == doctest::Approx(want).epsilon(1e-6));
    CHECK(want == doctest::Approx(0.9036).epsilon(1e-4));
    // one-sided limits agree with the collision value
    CHECK(rs.p(ic - 1) == doctest::Approx(want).epsilon(0.05));
    CHECK(rs.p(ic + 1) == doctest::Approx(want).epsilon(0.05));
    // q vanishes below, is negative above
    CHECK(rs.q(ic - 4) == 0.0);
    CHECK(rs.q(ic + 4) < 0.0);
}

TEST_CASE("pair curves are continuous at the collision") {
    SpectralSymbol sym = assemble_symbol(builtin_preset("proneural_salt_pepper"), 2);
    WavenumberGrid grid{40.0, 4096};
    LambdaH lh = fit_lambda_h(sample_eigenvalues(sym, grid));
    RegularizedSymbol reg = regularize(sym, lh, RegularizationMode::uniform(0.05));
    EigenBranches rb = sample_eigenvalues(reg.fn, reg.size, grid);
    REQUIRE(rb.collision.has_value());
    for (ReductionMethod m : {ReductionMethod::way_I, ReductionMethod::way_II}) {
        ReducedSpectrum rs = reduce_complex(reg, grid, lh, DelayParams{}, m);
        for (const Eigen::VectorXd* c : {&rs.nu1, &rs.nu2, &rs.p, &rs.q}) {
            double scale = std::max(1.0, c->cwiseAbs().maxCoeff());
            for (int i = 2; i + 1 < grid.n; ++i) {
                bool below = rb.collision->b(i - 1) == 0.0;
                bool above = rb.collision->b(i) > 0.0;
                if (below == above) continue; // not a window boundary
                // one-sided limits agree to ~10x the local resolution
                double local = std::max(std::fabs((*c)(i + 1) - (*c)(i)),
                                        std::fabs((*c)(i - 1) - (*c)(i - 2)));
                double jump = std::fabs((*c)(i) - (*c)(i - 1));
                CHECK(jump <= 10.0 * (local + 1e-9 * scale));
            }
        }
    }
}

TEST_CASE("invert_kernel_1d against the Gaussian pair") {
    WavenumberGrid grid{12.0, 1024};
    Eigen::VectorXd mu(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        double s = grid.point(i);
        mu(i) = std::exp(-s * s);
    }
    Eigen::VectorXd x(201);
    for (int j = 0; j <= 200; ++j) x(j) = -10.0 + 0.1 * j;
    Eigen::VectorXd k = invert_kernel_1d(grid, mu, x);
    for (int j = 0; j < x.size(); ++j) {
        double want = std::exp(-x(j) * x(j) / 4.0) / (2.0 * std::sqrt(std::numbers::pi));
        CHECK(std::fabs(k(j) - want) <= 1e-6);
    }
}

TEST_CASE("invert_kernel_radial: Gaussian pair and Bessel agreement") {
    WavenumberGrid grid{12.0, 4096};
    Eigen::VectorXd mu(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        double s = grid.point(i);
        mu(i) = std::exp(-s * s);
    }
    Eigen::VectorXd r = radial_grid(101, 0.1);
    // internal theta-quadrature vs Bessel agreement is asserted inside
    Eigen::VectorXd k = invert_kernel_radial(grid, mu, r, 2);
    for (int j = 0; j < r.size(); ++j) {
        double want = std::exp(-r(j) * r(j) / 4.0) / (4.0 * std::numbers::pi);
        CHECK(std::fabs(k(j) - want) <= 1e-6);
    }
}

TEST_CASE("zero spectrum inverts to the zero kernel") {
    WavenumberGrid grid{10.0, 64};
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(grid.n);
    Eigen::VectorXd x = symmetric_grid(32, 0.3);
    CHECK(invert_kernel_1d(grid, mu, x).cwiseAbs().maxCoeff() == 0.0);
    Eigen::VectorXd r = radial_grid(16, 0.3);
    CHECK(invert_kernel_radial(grid, mu, r).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matched-grid round-trip recovers the spectrum") {
    const int n = 512;
    const double s_max = 10.0;
    const double dx = std::numbers::pi / s_max;
    WavenumberGrid grid{s_max, n / 2 + 1};
    Eigen::VectorXd mu(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        double s = grid.point(i);
        mu(i) = std::exp(-0.3 * s * s) * (1.0 + 0.5 * std::cos(s));
    }
    Eigen::VectorXd x = symmetric_grid(n, dx);
    Eigen::VectorXd k = invert_kernel_1d(grid, mu, x);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        double s = grid.point(i), acc = 0.0;
        for (int j = 0; j < n; ++j) acc += k(j) * std::cos(s * x(j)) * dx;
        num += (acc - mu(i)) * (acc - mu(i));
        den += mu(i) * mu(i);
    }
    CHECK(std::sqrt(num / den) <= 1e-4);
}

TEST_CASE("build_effective_system wiring for scalar and pair kinds") {
    SpectralSymbol sym = assemble_symbol(builtin_preset("proneural_salt_pepper"), 2);
    WavenumberGrid grid{40.0, 1024};
    LambdaH lh = fit_lambda_h(sample_eigenvalues(sym, grid));
    RegularizedSymbol reg = regularize(sym, lh, RegularizationMode::uniform(0.05));
    ReducedSpectrum pair = reduce_complex(reg, grid, lh, DelayParams{}, ReductionMethod::way_II);
    Eigen::VectorXd r = radial_grid(128, 0.1);
    EffectiveSystem sys = build_effective_system(pair, 2, r, CutoffSpec{1.0}, 2);
    REQUIRE(sys.pair());
    REQUIRE(sys.L.has_value());
    CHECK(sys.L->identity_gain == 1.0);
    CHECK(!sys.L->kernel.has_value()); // way II: the bare identity
    CHECK(sys.M.has_value());
    CHECK(sys.N.has_value());

    ReducedSpectrum pair1 = reduce_complex(reg, grid, lh, DelayParams{}, ReductionMethod::way_I);
    EffectiveSystem sys1 = build_effective_system(pair1, 2, r, CutoffSpec{1.0}, 2);
    CHECK(sys1.L->kernel.has_value()); // way I: delta + decaying remainder

    LambdaH lh2{2, -0.05, 0.0, 0.0};
    CHECK(lh2(2.0) == doctest::Approx(-0.2));
    CHECK(LambdaH{}(2.0) == 0.0);
}

TEST_CASE("insufficient decay is reported as a warning") {
    SpectralSymbol sym = assemble_symbol(builtin_preset("three_node"), 2);
    WavenumberGrid grid{4.0, 256}; // cut off in the middle of the hump
    LambdaH lh;
    RegularizedSymbol reg = regularize(sym, lh, RegularizationMode::uniform(0.05));
    ReducedSpectrum rs = reduce_real(reg, grid, lh, DelayParams{}, ReductionMethod::way_II);
    CHECK(!rs.decayed());
    Eigen::VectorXd x = symmetric_grid(64, std::numbers::pi / 4.0);
    EffectiveSystem sys = build_effective_system(rs, 1, x, CutoffSpec{});
    REQUIRE(!sys.warnings.empty());
    CHECK(sys.warnings[0].find("decay") != std::string::npos);
}
