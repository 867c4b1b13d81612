#pragma once

// Marching root scanner shared by the spectrum (omega sweeps) and the
// isofrequency (k sweeps) modules. Steps are sized so the accumulated phase
// of the propagator cannot exceed kPhaseBudget between samples, which keeps
// every sign change of the scanned function inside one step.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "floquet/matricant.hpp"
#include "floquet/profile.hpp"
#include "floquet/types.hpp"
#include "rootfind.hpp"

namespace floquet::detail {

inline constexpr double kPhaseBudget = M_PI / 8.0;

// int_0^1 sqrt(num/mu1) dy with a small safety margin. With num = rho this
// bounds d(phase)/d(omega) uniformly in k; with num = mu2 it bounds
// d(phase)/dk uniformly in omega, since |kappa(x2) - kappa(x1)| <=
// sqrt(num/mu1) sqrt(x2^2 - x1^2) for kappa^2 = (rho w^2 - mu2 k^2)/mu1.
inline double rate_integral(const MaterialProfile& p, bool mu2_over_mu1) {
    double total = 0.0;
    for (const auto& s : p.segments()) {
        const int n = 128;
        const double h = (s.to - s.from) / n;
        double acc = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double y = s.from + h * j;
            const double num = mu2_over_mu1 ? s.mu2.eval(y) : s.rho.eval(y);
            acc += std::sqrt(num / s.mu1.eval(y)) *
                   ((j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0));
        }
        total += acc * h / 3.0;
    }
    return total * 1.02 + 1e-9;
}

// largest h with rate * sqrt((x+h)^2 - x^2) <= budget
inline double scan_step(double x, double rate, double budget) {
    const double a = budget / rate;
    return a * a / (x + std::sqrt(x * x + a * a));
}

struct ScanHit {
    double x;
    bool tangent;
};

inline QuadratureConfig loosened(const QuadratureConfig& cfg) {
    QuadratureConfig c = cfg;
    c.abs_tol = std::max(cfg.abs_tol, 1e-9);
    c.rel_tol = std::max(cfg.rel_tol, 1e-9);
    return c;
}

// March g over [lo, hi] with phase-bounded steps and refine every sign change.
// eval(x, tight): loose tolerance while marching, tight while refining. With
// tangency on, grazing double roots (|g| dipping below tangency_window at a
// local extremum without a sign change) are classified by a minimizer pass.
template <class Eval>
std::vector<ScanHit> scan_for_roots(Eval&& eval, double lo, double hi, double rate,
                                    bool tangency, double tangency_window,
                                    const char* what) {
    std::vector<ScanHit> hits;
    auto tight = [&](double x) { return eval(x, true); };

    double x_prev = lo, g_prev = eval(lo, false);
    double x_pp = lo, g_pp = g_prev;
    bool have_pp = false;
    while (x_prev < hi) {
        const double h = scan_step(x_prev, rate, kPhaseBudget);
        if (!(h > 1e-13 * (1.0 + x_prev)))
            throw ScanIncomplete(std::string(what) + ": scan step underflow");
        const double x = std::min(hi, x_prev + h);
        const double g = eval(x, false);
        if (g_prev * g < 0.0) {
            const double fa = tight(x_prev), fb = tight(x);
            if (fa == 0.0) hits.push_back({x_prev, false});
            else if (fb == 0.0) hits.push_back({x, false});
            else if (fa * fb < 0.0)
                hits.push_back({brent_root(tight, x_prev, x, fa, fb), false});
            // else: the loose-tolerance samples flipped sign by noise only
        } else if (tangency && have_pp && g_pp * g > 0.0 &&
                   std::abs(g_prev) <= std::abs(g_pp) && std::abs(g_prev) <= std::abs(g) &&
                   std::abs(g_prev) < 0.1) {
            // minimize the signed value toward zero: |g| vanishes at both
            // roots of a hidden pair and would pull the minimizer onto one
            const double dip = g_prev > 0.0 ? 1.0 : -1.0;
            const double xstar =
                golden_min([&](double t) { return dip * tight(t); }, x_pp, x);
            const double gstar = tight(xstar);
            if (std::abs(gstar) <= tangency_window) {
                hits.push_back({xstar, true});
            } else if (gstar * g_pp < 0.0) {
                // a close pair of simple roots hidden between samples
                const double fa = tight(x_pp), fb = tight(x);
                hits.push_back({brent_root(tight, x_pp, xstar, fa, gstar), false});
                hits.push_back({brent_root(tight, xstar, x, gstar, fb), false});
            }
        }
        x_pp = x_prev;
        g_pp = g_prev;
        have_pp = true;
        x_prev = x;
        g_prev = g;
        if (x >= hi) break;
    }
    std::sort(hits.begin(), hits.end(),
              [](const ScanHit& a, const ScanHit& b) { return a.x < b.x; });
    std::vector<ScanHit> out;
    for (const auto& hit : hits) {
        if (!out.empty() && std::abs(hit.x - out.back().x) <= 1e-9 * (1.0 + hit.x))
            out.back().tangent = out.back().tangent || hit.tangent;
        else
            out.push_back(hit);
    }
    return out;
}

} // namespace floquet::detail
