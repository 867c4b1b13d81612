#pragma once
// Shared test helpers, deliberately independent of the library's propagation
// machinery: fixed-step RK4, adaptive Simpson, homogeneous closed forms, and
// a random piecewise-polynomial profile generator.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "floquet/profile.hpp"
#include "floquet/profile_io.hpp"
#include "floquet/types.hpp"

namespace testutil {

using floquet::cplx;
using floquet::Mat2;
using floquet::MaterialProfile;

inline std::string profiles_dir() {
    const char* env = std::getenv("FLOQUET1D_PROFILES");
    return env ? env : "profiles";
}

inline MaterialProfile load(const std::string& name) {
    return floquet::load_profile(profiles_dir() + "/" + name + ".json");
}

// i * [[0, -1/mu1], [mu2 k^2 - rho w^2, 0]] built from scratch
inline Mat2 q_of(const MaterialProfile& p, double y, cplx w2, cplx k2) {
    const auto m = p.at(y);
    Mat2 q;
    const cplx i(0.0, 1.0);
    q(0, 0) = 0.0;
    q(0, 1) = -i / m.mu1;
    q(1, 0) = i * (m.mu2 * k2 - m.rho * w2);
    q(1, 1) = 0.0;
    return q;
}

// Classical RK4 on Y' = Q(y) Y with fixed steps, chunked at coefficient
// breakpoints so a jump never falls inside a step. End-of-chunk coefficient
// evaluations are nudged left of the jump.
inline Mat2 rk4_matricant(const MaterialProfile& p, double y0, double y1,
                          cplx w2, cplx k2, int steps_per_unit = 20000) {
    std::vector<double> cuts{y0, y1};
    auto add = [&](double c) {
        if (c > y0 + 1e-14 && c < y1 - 1e-14) cuts.push_back(c);
    };
    for (int n = 0; n <= 1; ++n)
        for (double b : p.breakpoints()) add(b + n);
    add(1.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-13; }),
               cuts.end());

    Mat2 Y = Mat2::Identity();
    for (size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double a = cuts[c], b = cuts[c + 1];
        const int n = std::max(2, (int)std::ceil(steps_per_unit * (b - a)));
        const double h = (b - a) / n;
        const double b_in = std::nextafter(b, a);
        auto qe = [&](double y) { return q_of(p, std::min(y, b_in), w2, k2); };
        for (int s = 0; s < n; ++s) {
            const double y = a + s * h;
            const Mat2 q1 = qe(y), q2 = qe(y + h / 2), q4 = qe(y + h);
            const Mat2 r1 = q1 * Y;
            const Mat2 r2 = q2 * (Y + (h / 2) * r1);
            const Mat2 r3 = q2 * (Y + (h / 2) * r2);
            const Mat2 r4 = q4 * (Y + h * r3);
            Y += (h / 6) * (r1 + 2 * r2 + 2 * r3 + r4);
        }
    }
    return Y;
}

inline Mat2 rk4_monodromy(const MaterialProfile& p, cplx w2, cplx k2,
                          int steps_per_unit = 20000) {
    return rk4_matricant(p, 0.0, 1.0, w2, k2, steps_per_unit);
}

// Exact matricant of a uniform medium over [s, y].
inline Mat2 homogeneous_matricant(double rho, double mu1, double mu2, double y,
                                  double s, cplx w2, cplx k2) {
    const cplx a2 = (rho * w2 - mu2 * k2) / mu1;
    const double t = y - s;
    const cplx i(0.0, 1.0);
    cplx c, snc; // cos(alpha t), t * sinc(alpha t)
    if (std::abs(a2) * t * t < 1e-10) {
        const cplx x = a2 * t * t;
        c = 1.0 - x / 2.0 + x * x / 24.0;
        snc = t * (1.0 - x / 6.0 + x * x / 120.0);
    } else {
        const cplx alpha = std::sqrt(a2);
        c = std::cos(alpha * t);
        snc = std::sin(alpha * t) / alpha;
    }
    Mat2 M;
    M(0, 0) = c;
    M(0, 1) = -i * snc / mu1;
    M(1, 1) = c;
    M(1, 0) = -i * mu1 * a2 * snc;
    return M;
}

// Layer-by-layer product of exact uniform-slab matricants.
inline Mat2 slab_product(const MaterialProfile& p, cplx w2, cplx k2) {
    std::vector<double> widths;
    const auto layers = p.layers(&widths);
    Mat2 M = Mat2::Identity();
    for (size_t j = 0; j < layers.size(); ++j)
        M = homogeneous_matricant(layers[j].rho, layers[j].mu1, layers[j].mu2,
                                  widths[j], 0.0, w2, k2) *
            M;
    return M;
}

// adaptive Simpson, plain recursion
namespace detail {
template <class F>
double simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double m = (a + b) / 2;
    const double lm = (a + m) / 2, rm = (m + b) / 2;
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
        return left + right + (left + right - whole) / 15;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}
} // namespace detail

template <class F>
double simpson(F f, double a, double b, double tol = 1e-13) {
    const double m = (a + b) / 2;
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

// <f(rho, mu1, mu2)> over one period, segment-aware
template <class F>
double mean_of(const MaterialProfile& p, F f) {
    std::vector<double> cuts{0.0};
    for (double b : p.breakpoints()) cuts.push_back(b);
    cuts.push_back(1.0);
    double total = 0.0;
    for (size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double hi = std::nextafter(cuts[c + 1], cuts[c]);
        total += simpson(
            [&](double y) {
                const auto m = p.at(std::min(y, hi));
                return f(m.rho, m.mu1, m.mu2);
            },
            cuts[c], cuts[c + 1]);
    }
    return total;
}

// Random piecewise-polynomial profile: 1-4 segments, positive coefficients.
// Polynomial pieces are written in the global y, positivity on [0,1] is
// guaranteed by |c1| + |c2| < c0.
inline MaterialProfile random_profile(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int nseg = 1 + (int)(u01(rng) * 3.0);
    std::vector<double> cuts{0.0, 1.0};
    while ((int)cuts.size() < nseg + 1) {
        const double c = 0.1 + 0.8 * u01(rng);
        bool ok = true;
        for (double x : cuts)
            if (std::abs(x - c) < 0.08) ok = false;
        if (ok) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());

    auto coeff = [&](void) -> floquet::Coefficient {
        if (u01(rng) < 0.4)
            return floquet::Coefficient::constant_value(0.6 + 2.4 * u01(rng));
        const double c0 = 0.9 + 1.6 * u01(rng);
        const double c1 = (u01(rng) - 0.5) * 0.8 * c0;
        const double c2 = (u01(rng) - 0.5) * (0.8 * c0 - std::abs(c1));
        return floquet::Coefficient::polynomial({c0, c1, c2});
    };

    std::vector<floquet::Segment> segs;
    for (int s = 0; s < nseg; ++s) {
        floquet::Segment sg;
        sg.from = cuts[s];
        sg.to = cuts[s + 1];
        sg.rho = coeff();
        sg.mu1 = coeff();
        sg.mu2 = coeff();
        segs.push_back(std::move(sg));
    }
    return MaterialProfile(std::move(segs));
}

template <class F>
double bisect(F f, double a, double b, int iters = 90) {
    double fa = f(a);
    for (int i = 0; i < iters; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fa < 0) == (fm < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

template <class F>
double central_diff(F f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2 * h);
}

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

inline double rel_err(cplx a, cplx b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12});
}

} // namespace testutil
