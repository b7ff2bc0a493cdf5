#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "effkern/simd/kernels.hpp"

using namespace effkern::simd;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

bool have_avx2() { return backend_available(Backend::avx2); }

} // namespace

TEST_CASE("dispatch reports a valid backend") {
    Backend b = active_backend();
    CHECK((b == Backend::scalar || b == Backend::avx2));
    CHECK(backend_available(Backend::scalar));
    CHECK(set_backend(Backend::scalar));
    CHECK(active_backend() == Backend::scalar);
    if (have_avx2()) {
        CHECK(set_backend(Backend::avx2));
        CHECK(active_backend() == Backend::avx2);
    }
    set_backend(b);
}

TEST_CASE("fused_update backends agree, all operand combinations") {
    if (!have_avx2()) return;
    std::mt19937_64 rng(11);
    for (std::size_t n : {1u, 3u, 4u, 7u, 64u, 1001u}) {
        auto u0 = random_vec(n, rng, -2.0, 2.0);
        auto lin = random_vec(n, rng, -1.0, 1.0);
        auto a = random_vec(n, rng, -1.0, 1.0);
        auto b = random_vec(n, rng, -1.0, 1.0);
        for (bool rect : {false, true}) {
            for (int combo = 0; combo < 4; ++combo) {
                auto us = u0, uv = u0;
                const double* pl = (combo & 1) ? lin.data() : nullptr;
                const double* pb = (combo & 2) ? b.data() : nullptr;
                ops(Backend::scalar)
                    .fused_update(us.data(), pl, a.data(), pb, n, 0.03, 1.0, rect);
                ops(Backend::avx2)
                    .fused_update(uv.data(), pl, a.data(), pb, n, 0.03, 1.0, rect);
                for (std::size_t i = 0; i < n; ++i)
                    CHECK(us[i] == doctest::Approx(uv[i]).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("fused_update applies the plateau cutoff") {
    // chi = 1 inside |u| <= u*/2, 0 beyond u*, linear between
    std::vector<double> u = {0.0, 0.4, 0.75, 1.0, 2.0, -0.75};
    std::vector<double> a(u.size(), 1.0);
    auto expect = u;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double chi = std::clamp((1.0 - std::fabs(u[i])) * 2.0, 0.0, 1.0);
        expect[i] = u[i] + 0.1 * chi;
    }
    ops(Backend::scalar).fused_update(u.data(), nullptr, a.data(), nullptr, u.size(), 0.1, 1.0, false);
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(u[i] == doctest::Approx(expect[i]).epsilon(1e-15));
}

TEST_CASE("cosine_accumulate backends agree at long series") {
    if (!have_avx2()) return;
    std::mt19937_64 rng(5);
    const std::size_t nx = 37, nk = 4096;
    auto x = random_vec(nx, rng, -160.0, 160.0);
    auto coeff = random_vec(nk, rng, -1.0, 1.0);
    std::vector<double> outs(nx, 0.0), outv(nx, 0.0);
    ops(Backend::scalar).cosine_accumulate(outs.data(), x.data(), nx, coeff.data(), nk, 0.0, 0.009765625);
    ops(Backend::avx2).cosine_accumulate(outv.data(), x.data(), nx, coeff.data(), nk, 0.0, 0.009765625);
    double scale = 0.0;
    for (double c : coeff) scale += std::fabs(c);
    for (std::size_t i = 0; i < nx; ++i) CHECK(std::fabs(outs[i] - outv[i]) <= 1e-10 * scale);
}

TEST_CASE("cosine_accumulate against a plain cosine sum") {
    std::vector<double> x = {0.0, 0.5, -2.0};
    std::vector<double> coeff = {1.0, 0.25, -0.5};
    std::vector<double> out(x.size(), 0.0);
    ops().cosine_accumulate(out.data(), x.data(), x.size(), coeff.data(), coeff.size(), 0.3, 0.7);
    for (std::size_t j = 0; j < x.size(); ++j) {
        double want = 0.0;
        for (std::size_t k = 0; k < coeff.size(); ++k)
            want += coeff[k] * std::cos((0.3 + k * 0.7) * x[j]);
        CHECK(out[j] == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("reductions agree across backends") {
    if (!have_avx2()) return;
    std::mt19937_64 rng(23);
    for (std::size_t n : {1u, 5u, 8u, 1000u, 4097u}) {
        auto v = random_vec(n, rng, -3.0, 3.0);
        double ms = ops(Backend::scalar).max_abs(v.data(), n);
        double mv = ops(Backend::avx2).max_abs(v.data(), n);
        CHECK(ms == mv); // max is order-independent, exact
        double ss = ops(Backend::scalar).sum_abs(v.data(), n);
        double sv = ops(Backend::avx2).sum_abs(v.data(), n);
        CHECK(ss == doctest::Approx(sv).epsilon(1e-13));
    }
}

TEST_CASE("scale_complex backends agree") {
    if (!have_avx2()) return;
    std::mt19937_64 rng(31);
    for (std::size_t n : {1u, 2u, 3u, 4u, 129u}) {
        auto zs = random_vec(2 * n, rng, -1.0, 1.0);
        auto m = random_vec(n, rng, -2.0, 2.0);
        auto zv = zs;
        ops(Backend::scalar).scale_complex(zs.data(), m.data(), n);
        ops(Backend::avx2).scale_complex(zv.data(), m.data(), n);
        for (std::size_t i = 0; i < 2 * n; ++i) CHECK(zs[i] == zv[i]); // pure multiplies
    }
}
