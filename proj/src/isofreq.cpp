#include "floquet/isofreq.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "floquet/spectrum.hpp"
#include "rootfind.hpp"
#include "scan.hpp"

namespace floquet {

namespace {

double delta_at(const MaterialProfile& p, double omega, double k,
                const QuadratureConfig& cfg) {
    const Matricant2 m = propagate(p, 0.0, 1.0, cplx(omega * omega), cplx(k * k), cfg);
    return 0.5 * (m.M1() + m.M4()).real();
}

// k-interval with |Delta| <= 1: the support of one real branch K_j(k)
struct KWindow {
    double lo = 0.0, hi = 0.0;
    bool lo_is_root = false, hi_is_root = false;
    int lo_m = 0, hi_m = 0;
    bool lo_tangent = false, hi_tangent = false;
};

template <class DeltaFn>
std::vector<KWindow> find_windows(DeltaFn&& f, double k_max, double rate,
                                  const char* what) {
    struct KRoot {
        double k;
        int m;
        bool tangent;
    };
    std::vector<KRoot> roots;
    for (int parity = 0; parity < 2; ++parity) {
        const double c = parity == 0 ? 1.0 : -1.0;
        auto g = [&](double k, bool tight) { return f(k, tight) - c; };
        for (const auto& hit :
             detail::scan_for_roots(g, 1e-4, k_max, rate, true, tangency_tol, what))
            roots.push_back({hit.x, parity, hit.tangent});
    }
    std::sort(roots.begin(), roots.end(),
              [](const KRoot& a, const KRoot& b) { return a.k < b.k; });

    std::vector<double> bounds;
    bounds.push_back(0.0);
    for (const auto& r : roots) bounds.push_back(r.k);
    bounds.push_back(k_max);

    std::vector<KWindow> out;
    for (size_t i = 0; i + 1 < bounds.size(); ++i) {
        const double a = bounds[i], b = bounds[i + 1];
        if (b - a <= 1e-9) continue;
        if (std::abs(f(0.5 * (a + b), true)) >= 1.0) continue;
        KWindow w;
        w.lo = a;
        w.hi = b;
        if (i >= 1) {
            w.lo_is_root = true;
            w.lo_m = roots[i - 1].m;
            w.lo_tangent = roots[i - 1].tangent;
        }
        if (i + 1 <= roots.size()) {
            w.hi_is_root = true;
            w.hi_m = roots[i].m;
            w.hi_tangent = roots[i].tangent;
        }
        out.push_back(w);
    }
    return out;
}

// uniform abscissae plus geometric clustering toward vertical-tangent edges
std::vector<double> window_abscissae(const KWindow& w, int base_n) {
    std::vector<double> ks;
    const double len = w.hi - w.lo;
    for (int i = 0; i <= base_n; ++i) ks.push_back(w.lo + len * i / base_n);
    if (w.lo_is_root)
        for (int pw = 7; pw <= 16; ++pw) ks.push_back(w.lo + len * std::pow(2.0, -pw));
    if (w.hi_is_root)
        for (int pw = 7; pw <= 16; ++pw) ks.push_back(w.hi - len * std::pow(2.0, -pw));
    std::sort(ks.begin(), ks.end());
    std::vector<double> out;
    for (double k : ks) {
        if (!out.empty() && k - out.back() <= 1e-12 * (1.0 + k)) continue;
        out.push_back(k);
    }
    return out;
}

template <class DeltaFn>
IsoBranch build_branch(DeltaFn&& f, const KWindow& w, int j, double omega, int base_n) {
    IsoBranch br;
    br.j = j;
    br.omega = omega;
    for (double k : window_abscissae(w, base_n)) {
        const double d = std::clamp(f(k, true), -1.0, 1.0);
        br.points.emplace_back(k, std::acos(d));
    }
    if (w.lo_is_root) {
        br.points.front().second = M_PI * w.lo_m;
        br.edges.push_back({w.lo, w.lo_m, w.lo_tangent});
    }
    if (w.hi_is_root) {
        br.points.back().second = M_PI * w.hi_m;
        br.edges.push_back({w.hi, w.hi_m, w.hi_tangent});
    }
    return br;
}

Mat2 q_of_point(const MaterialPoint& m, cplx w2, cplx k2) {
    Mat2 q = Mat2::Zero();
    const cplx i(0.0, 1.0);
    q(0, 1) = -i / m.mu1;
    q(1, 0) = i * (m.mu2 * k2 - m.rho * w2);
    return q;
}

} // namespace

std::vector<IsoBranch> iso_branches(const MaterialProfile& p, double omega, double k_max,
                                    const QuadratureConfig& cfg) {
    if (!(omega > 0.0)) throw OutOfDomain("iso_branches: omega must be positive");
    if (!(k_max > 0.0)) throw OutOfDomain("iso_branches: k_max must be positive");
    const QuadratureConfig lcfg = detail::loosened(cfg);
    auto f = [&](double k, bool tight) {
        return delta_at(p, omega, k, tight ? cfg : lcfg);
    };
    const double rate = detail::rate_integral(p, true);
    const auto windows = find_windows(f, k_max, rate, "iso_branches");

    const bool below_first_edge = omega < branch_omega(p, M_PI, 0.0, 1, cfg);
    std::vector<IsoBranch> out;
    for (size_t i = 0; i < windows.size(); ++i) {
        IsoBranch br = build_branch(f, windows[i], int(i) + 1, omega, 64);
        br.closed = (br.j == 1 && !windows[i].lo_is_root && windows[i].lo == 0.0 &&
                     below_first_edge);
        out.push_back(std::move(br));
    }
    return out;
}

IsoSlope dK_dk(const MaterialProfile& p, double omega, double k,
               const QuadratureConfig& cfg) {
    if (k < 0.0) throw OutOfDomain("dK_dk: use k >= 0 (the curves are even in k)");
    const double d = delta_at(p, omega, k, cfg);
    if (std::abs(d) > 1.0 + eps_cut)
        throw OutOfDomain("dK_dk: (omega, k) lies inside a stopband");
    const DerivativeBundle b = d_delta_integral(p, omega * omega, k * k, cfg);

    IsoSlope out;
    const bool edge = std::abs(std::abs(d) - 1.0) <= eps_cut;
    out.m = d >= 0.0 ? 0 : 1;
    const double parity_sign = out.m == 0 ? -1.0 : 1.0; // (-1)^{m+1}

    if (k == 0.0) {
        if (!edge) {
            out.kind = IsoSlope::Kind::AxisRegular;
            const double K1 = std::acos(std::clamp(d, -1.0, 1.0));
            out.d2K_dk2 = -2.0 * b.d_dk2 / std::sin(K1);
            return out;
        }
        if (std::abs(b.d_dk2) > 1e-9) {
            out.kind = IsoSlope::Kind::AxisCutoff;
            const double radicand = 2.0 * parity_sign * b.d_dk2;
            if (!(radicand > 0.0))
                throw OutOfDomain("dK_dk: no real branch emanates from this k = 0 cutoff");
            // K leaves a zone-center cutoff upward and a zone-edge one downward
            out.dK_dk = -parity_sign * std::sqrt(radicand);
            return out;
        }
        out.kind = IsoSlope::Kind::AxisZws;
        const double d2 = d2_delta(p, omega * omega, 0.0, SecondDeriv::K2K2, cfg);
        const double radicand = 2.0 * parity_sign * d2;
        if (!(radicand > 0.0))
            throw NumericalError("dK_dk: curvature sign violates the gap-closure form");
        out.d2K_dk2 = std::sqrt(radicand);
        return out;
    }

    const double dDdk = 2.0 * k * b.d_dk2;
    if (!edge) {
        out.kind = IsoSlope::Kind::Interior;
        out.dK_dk = -dDdk / std::sqrt(1.0 - d * d);
        return out;
    }
    if (std::abs(dDdk) > 1e-9) {
        out.kind = IsoSlope::Kind::VerticalEdge;
        out.d2k_dK2 = parity_sign / dDdk;
        return out;
    }

    // double cutoff in k: the branch crosses the line K = pi*m with a finite
    // slope whose sign alternates with the branch index
    out.kind = IsoSlope::Kind::ZwsEdge;
    const QuadratureConfig lcfg = detail::loosened(cfg);
    auto f = [&](double kk, bool tight) {
        return delta_at(p, omega, kk, tight ? cfg : lcfg);
    };
    const auto windows =
        find_windows(f, k * (1.0 + 1e-6) + 1e-6, detail::rate_integral(p, true), "dK_dk");
    int j = 1;
    for (size_t i = 0; i < windows.size(); ++i)
        if (std::abs(windows[i].hi - k) <= 1e-7 * (1.0 + k)) j = int(i) + 1;
    out.j = j;
    const double d2 = d2_delta(p, omega * omega, k * k, SecondDeriv::K2K2, cfg);
    const double d2Ddk2 = 2.0 * b.d_dk2 + 4.0 * k * k * d2;
    const double radicand = parity_sign * d2Ddk2;
    if (!(radicand > 0.0))
        throw NumericalError("dK_dk: curvature sign violates the gap-closure form");
    out.dK_dk = (((out.m + j) % 2 == 0) ? 1.0 : -1.0) * std::sqrt(radicand);
    return out;
}

ConvexityCertificate convexity_certificate(const MaterialProfile& p, double omega,
                                           const QuadratureConfig& cfg) {
    if (!(omega > 0.0)) throw OutOfDomain("convexity_certificate: omega must be positive");
    const double first_edge = branch_omega(p, M_PI, 0.0, 1, cfg);
    if (omega >= first_edge)
        throw OmegaTooHigh("convexity_certificate: omega = " + std::to_string(omega) +
                           " is not below the first zone-edge cutoff " +
                           std::to_string(first_edge));

    ConvexityCertificate cert;
    cert.omega = omega;
    cert.bracket_lo = omega * std::sqrt(p.mean_rho() / p.mean_mu2());
    cert.bracket_hi = omega * std::sqrt(p.extremum(ProfileExpr::RhoOverMu2).second);

    auto g = [&](double k) { return delta_at(p, omega, k, cfg) - 1.0; };
    const double ga = g(cert.bracket_lo), gb = g(cert.bracket_hi);
    if (std::abs(ga) < 1e-12) cert.k10 = cert.bracket_lo;
    else if (std::abs(gb) < 1e-12) cert.k10 = cert.bracket_hi;
    else if (ga > 0.0) cert.k10 = cert.bracket_lo;
    else if (gb < 0.0)
        throw NumericalError("convexity_certificate: edge bracket failed");
    else cert.k10 = detail::brent_root(g, cert.bracket_lo, cert.bracket_hi, ga, gb);
    cert.bracket_ok = cert.k10 >= cert.bracket_lo - 1e-9 * (1.0 + cert.k10) &&
                      cert.k10 <= cert.bracket_hi + 1e-9 * (1.0 + cert.k10);

    cert.lemma_ok = true;
    const int n = 25;
    for (int i = 0; i <= n - 1; ++i) {
        const double k = cert.k10 * i / n;
        const DerivativeBundle b = d_delta_integral(p, omega * omega, k * k, cfg);
        const double d2 = d2_delta(p, omega * omega, k * k, SecondDeriv::K2K2, cfg);
        cert.lemma_ok = cert.lemma_ok && b.d_dk2 > 0.0 && d2 > 0.0;
        if (i == 0) continue; // k = 0 joins the positivity check only
        const double d = delta_at(p, omega, k, cfg);
        const double dDdk = 2.0 * k * b.d_dk2;
        const double d2Ddk2 = 2.0 * b.d_dk2 + 4.0 * k * k * d2;
        cert.k.push_back(k);
        cert.h.push_back(d * dDdk * dDdk + (1.0 - d * d) * d2Ddk2);
    }
    cert.min_h = *std::min_element(cert.h.begin(), cert.h.end());
    cert.passed = cert.min_h > 0.0;
    return cert;
}

double truncated_delta(const MaterialProfile& p, double omega, double k, int terms) {
    if (terms < 1) throw OutOfDomain("truncated_delta: need at least one term");
    if (!p.piecewise_constant())
        throw NotPiecewiseConstant("truncated_delta: profile must be piecewise constant");
    std::vector<double> widths;
    const auto layers = p.layers(&widths);
    const cplx w2(omega * omega), k2(k * k);
    Mat2 M = Mat2::Identity();
    for (size_t l = 0; l < layers.size(); ++l) {
        const Mat2 A = widths[l] * q_of_point(layers[l], w2, k2);
        Mat2 sum = Mat2::Identity();
        Mat2 term = Mat2::Identity();
        for (int t = 1; t < terms; ++t) {
            term = Mat2(term * A) / double(t);
            sum += term;
        }
        M = sum * M;
    }
    return 0.5 * (M(0, 0) + M(1, 1)).real();
}

IsoBranch truncated_series_isofreq(const MaterialProfile& p, double omega, int terms,
                                   const QuadratureConfig&) {
    if (!(omega > 0.0))
        throw OutOfDomain("truncated_series_isofreq: omega must be positive");
    auto f = [&](double k, bool) { return truncated_delta(p, omega, k, terms); };
    if (std::abs(f(0.0, true)) > 1.0)
        throw NumericalError(
            "truncated_series_isofreq: truncated Lyapunov function has no real branch at k = 0");
    const double rate = detail::rate_integral(p, true);
    // the truncated function eventually escapes [-1,1] for good; scanning a few
    // phase turns past the exact first edge is enough to carry the comparison
    const double k_max = 4.0 * M_PI / rate + omega * std::sqrt(p.extremum(ProfileExpr::RhoOverMu2).second);
    const auto windows = find_windows(f, k_max, rate, "truncated_series_isofreq");
    if (windows.empty())
        throw NumericalError("truncated_series_isofreq: no real branch found");
    IsoBranch br = build_branch(f, windows[0], 1, omega, 200);
    br.closed = !windows[0].lo_is_root && windows[0].hi_is_root && windows[0].hi_m == 0;
    return br;
}

} // namespace floquet
