#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "floquet/lyapunov.hpp"
#include "oracle_utils.hpp"

using namespace floquet;
using testutil::load;

namespace {
const double pi = std::acos(-1.0);
}

TEST_CASE("half trace matches the pinned reference and maps into the K strip") {
    const auto p = load("smooth_poly");
    const auto s = delta(p, 4.0, 0.0);
    CHECK(std::abs(s.delta - cplx(-0.6292256498665894)) < 1e-9);
    CHECK(s.classification == BandClass::Passband);
    CHECK_FALSE(s.origin);
    CHECK(s.K.imag() == 0.0);
    CHECK(s.K.real() > 0.0);
    CHECK(s.K.real() < pi);
    CHECK(std::abs(std::cos(s.K) - s.delta) < 1e-12);
}

TEST_CASE("band classification over a frequency sweep") {
    const auto p = load("smooth_poly");
    // first zone-edge cutoff at k = 0 sits at omega = 2.361868772856435
    const double w_cut = 2.361868772856435;

    const auto cut = delta(p, w_cut * w_cut, 0.0);
    CHECK(cut.classification == BandClass::CutoffMinus);
    CHECK(std::abs(cut.delta + 1.0) < 1e-7);

    const auto gap = delta(p, 3.0 * 3.0, 0.0);
    CHECK(gap.classification == BandClass::Stopband);
    CHECK(gap.delta.real() < -1.0);
    CHECK(gap.K.real() == doctest::Approx(pi));
    CHECK(gap.K.imag() > 0.0);

    // evanescent region: omega below the first branch at k > 0
    const auto ev = delta(p, 0.01, 4.0);
    CHECK(ev.classification == BandClass::Stopband);
    CHECK(ev.delta.real() > 1.0);
    CHECK(ev.K.real() == doctest::Approx(0.0));
    CHECK(ev.K.imag() > 0.0);

    const auto org = delta(p, 0.0, 0.0);
    CHECK(org.origin);
    CHECK(std::abs(org.delta - 1.0) < 1e-12);
}

TEST_CASE("Floquet parameter branch layout") {
    for (double d : {0.3, -0.99, 0.999999}) {
        const cplx K = floquet_K(d);
        CHECK(K.imag() == 0.0);
        CHECK(K.real() >= 0.0);
        CHECK(K.real() <= pi);
        CHECK(std::abs(std::cos(K) - d) < 1e-9);
    }
    const cplx up = floquet_K(1.7);
    CHECK(up.real() == 0.0);
    CHECK(up.imag() == doctest::Approx(std::acosh(1.7)).epsilon(1e-12));
    const cplx dn = floquet_K(-1.7);
    CHECK(dn.real() == doctest::Approx(pi));
    CHECK(dn.imag() == doctest::Approx(std::acosh(1.7)).epsilon(1e-12));

    const cplx z = floquet_K(cplx(0.4, 0.7));
    CHECK(z.imag() >= 0.0);
    CHECK(std::abs(std::cos(z) - cplx(0.4, 0.7)) < 1e-12);
}

TEST_CASE("quadratic origin expansion with independently integrated means") {
    const auto p = load("smooth_poly");
    const double mr = testutil::mean_of(p, [](double r, double, double) { return r; });
    const double mi = testutil::mean_of(p, [](double, double m1, double) { return 1.0 / m1; });
    const double m2 = testutil::mean_of(p, [](double, double, double mu2) { return mu2; });
    const double w2 = 1e-4, k2 = 2e-4;
    const double expect = 1.0 + mi * (m2 * k2 - mr * w2) / 2.0;
    CHECK(delta_small(p, w2, k2) == doctest::Approx(expect).epsilon(1e-10));
    CHECK(std::abs(delta(p, w2, k2).delta - expect) < 1e-7);
}

TEST_CASE("three derivative routes agree in a passband") {
    const auto p = load("smooth_poly");
    for (auto [w2, k2] : {std::pair<double, double>{4.0, 0.0}, {4.5, 1.1}}) {
        const auto gi = d_delta_integral(p, w2, k2);
        const auto ge = d_delta_eigen(p, w2, k2);
        const auto gf = d_delta_fd(p, w2, k2);
        CHECK(testutil::rel_err(gi.d_dw2, ge.d_dw2) < 1e-6);
        CHECK(testutil::rel_err(gi.d_dw2, gf.d_dw2) < 1e-6);
        CHECK(testutil::rel_err(gi.d_dk2, ge.d_dk2) < 1e-6);
        CHECK(testutil::rel_err(gi.d_dk2, gf.d_dk2) < 1e-6);
        // first band: Delta decreasing in w2, increasing in k2
        CHECK(gi.d_dw2 < 0.0);
        CHECK(gi.d_dk2 > 0.0);
    }
}

TEST_CASE("eigenvector route requires a passband or cutoff") {
    const auto p = load("smooth_poly");
    CHECK_THROWS_AS((void)d_delta_eigen(p, 9.0, 0.0), NotInPassband);
    // integral route works anywhere
    const auto g = d_delta_integral(p, 9.0, 0.0);
    CHECK(std::isfinite(g.d_dw2));
}

TEST_CASE("identity monodromy reports exact zero derivatives with a flag") {
    // uniform-speed cell: M(1,0) = -I at omega = 2pi, k = 0
    const auto p = load("uniform_speed");
    const auto g = d_delta_eigen(p, 4.0 * pi * pi, 0.0);
    CHECK(g.zws_degenerate);
    CHECK(g.d_dw2 == 0.0);
    CHECK(g.d_dk2 == 0.0);
    const auto gi = d_delta_integral(p, 4.0 * pi * pi, 0.0);
    CHECK(std::abs(gi.d_dw2) < 1e-9);
    CHECK(std::abs(gi.d_dk2) < 1e-9);
}

TEST_CASE("iterated-kernel second derivatives match finite differences") {
    const auto p = load("smooth_poly");
    const double w2 = 4.0, k2 = 0.25;
    const double h = 1e-3;

    const double dww = d2_delta(p, w2, k2, SecondDeriv::W2W2);
    const double fd_ww = testutil::central_diff(
        [&](double x) { return d_delta_integral(p, x, k2).d_dw2; }, w2, h);
    CHECK(testutil::rel_err(dww, fd_ww) < 1e-5);

    const double dkk = d2_delta(p, w2, k2, SecondDeriv::K2K2);
    const double fd_kk = testutil::central_diff(
        [&](double x) { return d_delta_integral(p, w2, x).d_dk2; }, k2, h);
    CHECK(testutil::rel_err(dkk, fd_kk) < 1e-5);

    const double dwk = d2_delta(p, w2, k2, SecondDeriv::W2K2);
    const double fd_wk = testutil::central_diff(
        [&](double x) { return d_delta_integral(p, w2, x).d_dw2; }, k2, h);
    CHECK(testutil::rel_err(dwk, fd_wk) < 1e-5);
}

TEST_CASE("full omega second derivative composes the chain rule") {
    const auto p = load("smooth_poly");
    const double w = 2.0, k = 0.5, h = 1e-3;
    const double got = d2_delta_domega2(p, w, k);
    auto f = [&](double x) { return delta(p, x * x, k * k).delta.real(); };
    const double fd = (f(w + h) - 2.0 * f(w) + f(w - h)) / (h * h);
    CHECK(testutil::rel_err(got, fd) < 1e-4);
}
