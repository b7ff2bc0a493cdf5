#include <doctest.h>

#include <cmath>
#include <random>

#include "effkern/lambertw.hpp"

using namespace effkern;

namespace {

// Independent oracle: bisection on w e^w = z over the principal branch.
double w0_bisect(double z) {
    double lo = -1.0;
    double hi = 1.0;
    while (hi * std::exp(hi) < z) hi *= 2.0;
    auto f = [z](double w) { return w * std::exp(w) - z; };
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("w0 special points") {
    CHECK(lambert_w0(0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(lambert_w0(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lambert_w0(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("w0 defining identity on random points") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-std::exp(-1.0), 10.0);
    for (int i = 0; i < 10000; ++i) {
        double z = dist(rng);
        double w = lambert_w0(z);
        CHECK(std::fabs(w * std::exp(w) - z) <= 1e-12 * std::max(1.0, std::fabs(z)));
    }
}

TEST_CASE("w0 monotone on a dense grid") {
    double prev = lambert_w0(-std::exp(-1.0));
    for (int i = 1; i <= 4000; ++i) {
        double z = -std::exp(-1.0) + i * (10.0 + std::exp(-1.0)) / 4000.0;
        double w = lambert_w0(z);
        CHECK(w >= prev - 1e-13);
        prev = w;
    }
}

TEST_CASE("w0 domain error below -1/e") {
    CHECK_THROWS_AS(lambert_w0(-0.5), std::domain_error);
}

TEST_CASE("mu_exact fixed point above -1/delta") {
    const double delta = 0.1;
    for (double zeta : {2.0, 0.0, -1.0, -9.999, 100.0, 1e6}) {
        CHECK(mu_exact(zeta, delta) == zeta); // exact, not approximate
    }
}

TEST_CASE("mu_exact boundary and below") {
    const double delta = 0.1;
    // delta*zeta = -1 is the branch point: W0(-1/e) = -1
    CHECK(mu_exact(-10.0, delta) == doctest::Approx(-10.0).epsilon(1e-12));
    // frozen from the bisection oracle: solve w e^w = -2 e^-2
    double expected = w0_bisect(-2.0 * std::exp(-2.0)) / delta;
    CHECK(expected == doctest::Approx(-4.0637).epsilon(1e-4));
    CHECK(mu_exact(-20.0, delta) == doctest::Approx(expected).epsilon(1e-11));
}

TEST_CASE("mu_exact never below -1/delta and continuous at the corner") {
    const double delta = 0.1;
    for (double zeta = -200.0; zeta <= 50.0; zeta += 0.37) {
        CHECK(mu_exact(zeta, delta) >= -1.0 / delta - 1e-12);
    }
    double left = mu_exact(-10.0 - 1e-9, delta);
    double right = mu_exact(-10.0 + 1e-9, delta);
    CHECK(std::fabs(left - right) < 1e-4); // sqrt-type kink, small step
}

TEST_CASE("mu_rough closed forms") {
    CHECK(mu_rough(0.0, 0.1) == 0.0);
    CHECK(mu_rough(1.0, 0.1) == doctest::Approx(std::exp(0.1)).epsilon(1e-14));
}

TEST_CASE("mu_rough complex matches the trig expansion") {
    const double delta = 0.1;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        double a = dist(rng), b = dist(rng);
        std::complex<double> got = mu_rough(std::complex<double>(a, b), delta);
        double ea = std::exp(delta * a);
        double re = ea * (a * std::cos(delta * b) - b * std::sin(delta * b));
        double im = ea * (b * std::cos(delta * b) + a * std::sin(delta * b));
        CHECK(got.real() == doctest::Approx(re).epsilon(1e-12));
        CHECK(got.imag() == doctest::Approx(im).epsilon(1e-12));
    }
}

TEST_CASE("mu_rough deviation from mu_exact is bounded by |zeta|(e^(d|zeta|)-1)") {
    const double delta = 0.1;
    // On [-1/(2d), 1/(2d)] both maps equal zeta * e^(d zeta) resp. zeta, so
    // the deviation is exactly |zeta| |e^(d zeta) - 1| <= |zeta| (e^0.5 - 1).
    for (double zeta = -5.0; zeta <= 5.0; zeta += 0.01) {
        double diff = std::fabs(mu_rough(zeta, delta) - mu_exact(zeta, delta));
        CHECK(diff <= std::fabs(zeta) * (std::exp(0.5) - 1.0) + 1e-12);
    }
    // 1% agreement holds on the narrower window |zeta| <= ln(1.01)/delta.
    double w = std::log(1.01) / delta;
    for (double zeta = -w; zeta <= w; zeta += w / 64.0) {
        double diff = std::fabs(mu_rough(zeta, delta) - mu_exact(zeta, delta));
        CHECK(diff <= 0.01 * std::fabs(zeta) + 1e-12);
    }
}
