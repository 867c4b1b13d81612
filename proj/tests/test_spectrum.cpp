#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "floquet/spectrum.hpp"
#include "oracle_utils.hpp"

using namespace floquet;
using testutil::load;

namespace {
const double pi = std::acos(-1.0);

double delta_at(const MaterialProfile& p, double w, double k) {
    return delta(p, w * w, k * k).delta.real();
}
} // namespace

TEST_CASE("Floquet branches solve Delta = cos K in ascending order") {
    const auto p = load("smooth_poly");
    const double K = 1.1, k = 0.8;
    const auto roots = floquet_branches(p, K, k, 12.0);
    REQUIRE(roots.size() >= 3);
    CHECK(std::is_sorted(roots.begin(), roots.end()));
    for (double w : roots) CHECK(std::abs(delta_at(p, w, k) - std::cos(K)) < 1e-9);
    // branch accessor agrees with the list
    for (int n = 1; n <= (int)roots.size(); ++n)
        CHECK(branch_omega(p, K, k, n) == doctest::Approx(roots[n - 1]).epsilon(1e-12));
}

TEST_CASE("zone-edge cutoff matches the pinned reference") {
    const auto p = load("smooth_poly");
    CHECK(branch_omega(p, pi, 0.0, 1) ==
          doctest::Approx(2.361868772856435).epsilon(1e-10));
}

TEST_CASE("band edges alternate in conjugate pairs") {
    const auto p = load("smooth_poly");
    const auto edges = band_edges(p, 0.0, 12.0);
    REQUIRE(edges.size() >= 4);
    for (size_t i = 0; i + 1 < edges.size(); ++i) CHECK(edges[i].omega < edges[i + 1].omega);
    // k = 0: pattern -1,-1,+1,+1,-1,... starting at the first zone-edge pair
    for (size_t i = 0; i < edges.size(); ++i) {
        CHECK(edges[i].parity == (int)(((i / 2) % 2 == 0) ? 1 : 0));
        const double target = edges[i].parity ? -1.0 : 1.0;
        CHECK(std::abs(delta_at(p, edges[i].omega, 0.0) - target) < 1e-8);
        CHECK_FALSE(edges[i].tangent);
    }
}

TEST_CASE("stopband intervals carry the sign of Delta inside") {
    const auto p = load("smooth_poly");
    for (double k : {0.0, 1.5}) {
        const auto gaps = stopband_intervals(p, k, 12.0);
        REQUIRE(!gaps.empty());
        if (k > 0.0) CHECK(gaps.front().lo == 0.0); // evanescent region below branch 1
        for (const auto& g : gaps) {
            CHECK(g.lo < g.hi);
            const double mid = delta_at(p, 0.5 * (g.lo + g.hi), k);
            CHECK(std::abs(mid) > 1.0);
            CHECK((mid < -1.0) == (g.parity == 1));
        }
        // complement spot check: midpoints between gaps are passband
        for (size_t i = 0; i + 1 < gaps.size(); ++i) {
            const double mid = 0.5 * (gaps[i].hi + gaps[i + 1].lo);
            CHECK(std::abs(delta_at(p, mid, k)) < 1.0);
        }
    }
}

TEST_CASE("clamped and free cell spectra sit in the gap closures") {
    const auto p = load("smooth_poly");
    const double k = 0.7, cap = 12.0;
    const auto [dir, neu] = dirichlet_neumann(p, 0.0, k, cap);
    REQUIRE(dir.size() >= 2);
    REQUIRE(neu.size() >= 2);

    // residuals of the defining entries
    for (double w : dir)
        CHECK(std::abs(propagate(p, 0.0, 1.0, w * w, k * k).M2()) < 1e-7);
    for (double w : neu)
        CHECK(std::abs(propagate(p, 0.0, 1.0, w * w, k * k).M3()) < 1e-7);

    const auto gaps = stopband_intervals(p, k, cap + 2.0);
    // gaps[0] is the evanescent region [0, omega_1(0,k)]: holds the first
    // free value, no clamped value; thereafter one of each per gap
    const double tol = 1e-8;
    auto inside = [&](double w, const GapInterval& g) {
        return w >= g.lo - tol && w <= g.hi + tol;
    };
    CHECK(inside(neu[0], gaps[0]));
    for (size_t j = 0; j + 1 < gaps.size(); ++j) {
        if (j < dir.size()) CHECK(inside(dir[j], gaps[j + 1]));
        if (j + 1 < neu.size()) CHECK(inside(neu[j + 1], gaps[j + 1]));
    }
}

TEST_CASE("clamped spectra depend on the cell base point, gaps do not") {
    const auto p = load("smooth_poly");
    const auto a = dirichlet_neumann(p, 0.0, 0.7, 8.0).first;
    const auto b = dirichlet_neumann(p, 0.5, 0.7, 8.0).first;
    REQUIRE(!a.empty());
    REQUIRE(!b.empty());
    CHECK(std::abs(a[0] - b[0]) > 1e-3);
    // both land in the same gap closures
    const auto gaps = stopband_intervals(p, 0.7, 10.0);
    CHECK(a[0] >= gaps[1].lo - 1e-8);
    CHECK(a[0] <= gaps[1].hi + 1e-8);
    CHECK(b[0] >= gaps[1].lo - 1e-8);
    CHECK(b[0] <= gaps[1].hi + 1e-8);
}

TEST_CASE("free spectrum at k = 0 starts at zero") {
    const auto p = load("smooth_poly");
    const auto neu = dirichlet_neumann(p, 0.0, 0.0, 6.0).second;
    REQUIRE(!neu.empty());
    CHECK(neu[0] == 0.0);
}

TEST_CASE("zero-width stopband confirmed on the uniform-speed lattice") {
    const auto p = load("uniform_speed");
    // exact crossing at omega = 2pi, k = 0; start the refinement nearby
    const auto r = detect_zws(p, 6.28, 0.02);
    CHECK(r.newton_converged);
    CHECK(r.confirmed);
    CHECK(r.sign == -1);
    CHECK(r.residual_M <= tol_zws);
    CHECK(r.residual_m2 <= tol_zws);
    CHECK(std::abs(r.omega * r.omega - 4.0 * pi * pi - r.k * r.k) < 1e-6);
}

TEST_CASE("bilayer crossing types separate confirmed from rejected") {
    const auto p = load("bilayer_contrast");
    // sin-type crossing: genuine degeneracy
    const auto good = detect_zws(p, 19.4677, 4.8669);
    CHECK(good.confirmed);
    CHECK(std::abs(good.omega - 19.467738) < 1e-4);
    CHECK(std::abs(good.k - 4.866934) < 1e-4);
    // cos-type crossing: clamped/free values collide but M stays off-identity
    const auto bad = detect_zws(p, 16.859555, 6.124092, {}, ZwsMode::Free, false);
    CHECK_FALSE(bad.confirmed);
    CHECK(bad.residual_M >= 0.1);
}

TEST_CASE("stopband decay profile peaks inside the gap") {
    const auto p = load("smooth_poly");
    const auto prof = stopband_profile(p, 0.0, 1);
    CHECK(prof.omega_lo == doctest::Approx(2.361868772856435).epsilon(1e-8));
    CHECK(prof.omega_hi > prof.omega_lo);
    CHECK(prof.omega_ext > prof.omega_lo);
    CHECK(prof.omega_ext < prof.omega_hi);
    CHECK(prof.im_K_max > 0.0);
    CHECK(prof.curvature < 0.0);
    REQUIRE(prof.samples.size() >= 5);
    for (const auto& [w, imk] : prof.samples) {
        CHECK(imk >= 0.0);
        CHECK(imk <= prof.im_K_max + 1e-12);
    }
}

TEST_CASE("branch slope in K matches finite differences") {
    const auto p = load("smooth_poly");
    const double k = 0.4;
    for (int n : {1, 2}) {
        const auto d = domega_dK(p, 1.2, k, n);
        CHECK_FALSE(d.at_cutoff);
        const double h = 1e-4;
        const double fd = (branch_omega(p, 1.2 + h, k, n) - branch_omega(p, 1.2 - h, k, n)) / (2 * h);
        CHECK(testutil::rel_err(d.value, fd) < 1e-5);
        // branches alternate direction in K
        CHECK((n % 2 == 1 ? d.value > 0 : d.value < 0));
    }
}

TEST_CASE("zone-edge slope vanishes with the advertised curvature") {
    const auto p = load("smooth_poly");
    const auto d = domega_dK(p, pi, 0.3, 1);
    CHECK(d.at_cutoff);
    CHECK(d.value == 0.0);
    CHECK(d.curvature < 0.0); // top of the first band
    const double h = 1e-3;
    const double w_edge = branch_omega(p, pi, 0.3, 1);
    const double fd_curv = 2.0 * (branch_omega(p, pi - h, 0.3, 1) - w_edge) / (h * h);
    CHECK(testutil::rel_err(d.curvature, fd_curv) < 2e-3);
}

TEST_CASE("origin slopes reproduce the homogenized sound speeds") {
    const auto p = load("smooth_poly");
    const double mr = testutil::mean_of(p, [](double r, double, double) { return r; });
    const double mi = testutil::mean_of(p, [](double, double m1, double) { return 1.0 / m1; });
    const double m2 = testutil::mean_of(p, [](double, double, double mu2) { return mu2; });

    const auto dk0 = domega_dK(p, 0.0, 0.0, 1);
    CHECK(dk0.origin);
    CHECK(dk0.value == doctest::Approx(1.0 / std::sqrt(mr * mi)).epsilon(1e-9));

    CHECK(domega_dk(p, 0.0, 0.0, 1) ==
          doctest::Approx(std::sqrt(m2 / mr)).epsilon(1e-9));
}

TEST_CASE("branch slope in k matches finite differences and axis parity") {
    const auto p = load("smooth_poly");
    const double K = 2.0, k = 0.9;
    for (int n : {1, 2}) {
        const double d = domega_dk(p, K, k, n);
        const double h = 1e-4;
        const double fd =
            (branch_omega(p, K, k + h, n) - branch_omega(p, K, k - h, n)) / (2 * h);
        CHECK(testutil::rel_err(d, fd) < 1e-5);
        CHECK(d > 0.0); // branches rise with k
    }
    CHECK(domega_dk(p, K, 0.0, 1) == 0.0); // even in k on the axis
}

TEST_CASE("degenerate crossing keeps a finite branch slope") {
    // branches 3 and 4 cross at omega = 2pi, K = pi on the uniform-speed cell
    const auto p = load("uniform_speed");
    // tangent roots are only locatable to ~sqrt(scan tol) by bracketing
    CHECK(branch_omega(p, pi, 0.0, 3) == doctest::Approx(2.0 * pi).epsilon(1e-6));
    const auto d = domega_dK(p, pi, 0.0, 3);
    CHECK(d.zws);
    CHECK(d.omega == doctest::Approx(2.0 * pi).epsilon(1e-10));
    CHECK(d.value > 0.0); // odd branch rises through the crossing
    // h below ~1e-3 pushes the split pair under the tangency window
    const double h = 1e-3;
    const double fd = (d.omega - branch_omega(p, pi - h, 0.0, 3)) / h;
    CHECK(testutil::rel_err(d.value, fd) < 5e-3);
}

TEST_CASE("Bloch eigenfunction is quasi-periodic and self-consistent") {
    const auto p = load("smooth_poly");
    std::vector<double> grid;
    const int n = 256;
    for (int i = 0; i <= n; ++i) grid.push_back(double(i) / n);
    const auto bf = bloch_eigenfunction(p, 1.2, 0.7, 2, grid);
    CHECK(bf.qp_residual < 1e-9);
    REQUIRE(bf.u.size() == grid.size());
    const cplx phase = std::exp(cplx(0.0, bf.K));
    CHECK(std::abs(bf.u.back() - phase * bf.u.front()) < 1e-8);
    CHECK(std::abs(bf.mu1_du.back() - phase * bf.mu1_du.front()) < 1e-8);
    // mu1 u' column consistent with a central difference of u
    double worst = 0.0;
    for (int i = 1; i < n; ++i) {
        const cplx du = (bf.u[i + 1] - bf.u[i - 1]) / (grid[i + 1] - grid[i - 1]);
        worst = std::max(worst, std::abs(p.mu1(grid[i]) * du - bf.mu1_du[i]));
    }
    const double scale = std::abs(bf.mu1_du[n / 2]);
    CHECK(worst / scale < 5e-3);
}

TEST_CASE("high-k branch ratio descends toward the minimum speed") {
    const auto p = load("bilayer_contrast"); // min(mu2/rho) = 1
    const auto ratios = high_k_limit(p, pi / 2, 1, {5.0, 10.0, 20.0});
    REQUIRE(ratios.size() == 3);
    CHECK(ratios[0] > ratios[1]);
    CHECK(ratios[1] > ratios[2]);
    CHECK(ratios[2] > 1.0);
    CHECK(ratios[2] < 1.5);
}
