#include "floquet/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rootfind.hpp"
#include "scan.hpp"

namespace floquet {

namespace {

double delta_value(const MaterialProfile& p, double omega, double k,
                   const QuadratureConfig& cfg) {
    const Matricant2 m = propagate(p, 0.0, 1.0, cplx(omega * omega), cplx(k * k), cfg);
    return 0.5 * (m.M1() + m.M4()).real();
}

// starting omega for upward scans: below the lowest positive root but clear of
// the origin zero when K = k = 0
double scan_start(double K, double k) {
    if (K <= 0.0 && k <= 0.0) return 1e-4;
    return std::min(1e-4, std::max(1e-9, 0.005 * (K + k)));
}

Vec2 bloch_vector(const Mat2& m, cplx q) {
    // both columns of adj(M - qI) are eigenvectors; take the better-conditioned
    if (std::abs(m(0, 1)) >= std::abs(m(1, 0))) return Vec2(m(0, 1), q - m(0, 0));
    return Vec2(q - m(1, 1), m(1, 0));
}

} // namespace

std::vector<double> floquet_branches(const MaterialProfile& p, double K, double k,
                                     double omega_max, const QuadratureConfig& cfg) {
    if (K < 0.0 || K > M_PI + 1e-12) throw OutOfDomain("floquet_branches: K must lie in [0,pi]");
    if (!(omega_max > 0.0)) throw OutOfDomain("floquet_branches: omega_max must be positive");
    const double c = std::cos(K);
    const QuadratureConfig lcfg = detail::loosened(cfg);
    auto eval = [&](double w, bool tight) {
        return delta_value(p, w, k, tight ? cfg : lcfg) - c;
    };
    // extremum hunting stays on for every K: near a zero-width stopband the
    // root pair hides in a dip much narrower than the phase-budget step
    const auto hits =
        detail::scan_for_roots(eval, scan_start(K, k), omega_max, detail::rate_integral(p, false),
                               true, tangency_tol, "floquet_branches");
    std::vector<double> out;
    for (const auto& hit : hits) {
        out.push_back(hit.x);
        if (hit.tangent) out.push_back(hit.x); // double root: two branches meet
    }
    return out;
}

double branch_omega(const MaterialProfile& p, double K, double k, int n,
                    const QuadratureConfig& cfg) {
    if (n < 1) throw OutOfDomain("branch_omega: branch index is 1-based");
    const bool at_origin_root = (K == 0.0 && k == 0.0);
    if (at_origin_root && n == 1) return 0.0;
    const size_t need = at_origin_root ? size_t(n - 1) : size_t(n);

    const double rate = detail::rate_integral(p, false);
    const double fastest = p.extremum(ProfileExpr::Mu2OverRho).second;
    double omega_max = (n + 1) * M_PI / rate + std::sqrt(fastest) * k + 2.0;
    for (int tries = 0; tries < 12; ++tries) {
        const auto roots = floquet_branches(p, K, k, omega_max, cfg);
        if (roots.size() >= need) return roots[need - 1];
        omega_max *= 1.6;
    }
    throw ScanIncomplete("branch_omega: branch " + std::to_string(n) + " not found");
}

std::vector<EdgePoint> band_edges(const MaterialProfile& p, double k, double omega_max,
                                  const QuadratureConfig& cfg) {
    const double rate = detail::rate_integral(p, false);
    const QuadratureConfig lcfg = detail::loosened(cfg);
    std::vector<EdgePoint> out;
    for (int parity = 0; parity < 2; ++parity) {
        const double c = parity == 0 ? 1.0 : -1.0;
        auto eval = [&](double w, bool tight) {
            return delta_value(p, w, k, tight ? cfg : lcfg) - c;
        };
        for (const auto& hit : detail::scan_for_roots(eval, scan_start(0.0, k), omega_max,
                                                      rate, true, tangency_tol, "band_edges"))
            out.push_back({hit.x, parity, hit.tangent});
    }
    std::sort(out.begin(), out.end(),
              [](const EdgePoint& a, const EdgePoint& b) { return a.omega < b.omega; });
    return out;
}

std::vector<GapInterval> stopband_intervals(const MaterialProfile& p, double k,
                                            double omega_max, const QuadratureConfig& cfg) {
    const auto edges = band_edges(p, k, omega_max, cfg);
    std::vector<double> bounds;
    bounds.push_back(0.0);
    for (const auto& e : edges) bounds.push_back(e.omega);
    std::vector<GapInterval> out;
    for (size_t i = 0; i + 1 < bounds.size(); ++i) {
        const double a = bounds[i], b = bounds[i + 1];
        if (b - a <= 1e-9) continue;
        const double mid = delta_value(p, 0.5 * (a + b), k, cfg);
        if (mid > 1.0 + 1e-10) out.push_back({a, b, 0});
        else if (mid < -1.0 - 1e-10) out.push_back({a, b, 1});
    }
    // a gap still open at omega_max is dropped; callers that need gap `m`
    // enlarge omega_max until it is enclosed
    return out;
}

std::pair<std::vector<double>, std::vector<double>>
dirichlet_neumann(const MaterialProfile& p, double y0, double k, double omega_max,
                  const QuadratureConfig& cfg) {
    if (y0 < 0.0 || y0 >= 1.0) throw OutOfDomain("dirichlet_neumann: y0 must lie in [0,1)");
    const double rate = detail::rate_integral(p, false);
    const QuadratureConfig lcfg = detail::loosened(cfg);
    auto entry = [&](double w, bool tight, int row, int col) {
        const Matricant2 m =
            propagate(p, y0, y0 + 1.0, cplx(w * w), cplx(k * k), tight ? cfg : lcfg);
        return m.M(row, col).imag();
    };

    std::vector<double> dirichlet, neumann;
    auto ed = [&](double w, bool tight) { return entry(w, tight, 0, 1); };
    for (const auto& hit :
         detail::scan_for_roots(ed, 1e-3, omega_max, rate, false, 0.0, "dirichlet_neumann"))
        dirichlet.push_back(hit.x);
    auto en = [&](double w, bool tight) { return entry(w, tight, 1, 0); };
    if (k == 0.0) neumann.push_back(0.0); // M3 vanishes identically at omega = k = 0
    for (const auto& hit :
         detail::scan_for_roots(en, 1e-3, omega_max, rate, false, 0.0, "dirichlet_neumann"))
        neumann.push_back(hit.x);
    return {dirichlet, neumann};
}

ZwsReport detect_zws(const MaterialProfile& p, double omega, double k,
                     const QuadratureConfig& cfg, ZwsMode mode, bool refine,
                     double tolerance) {
    double w = omega, q = k;
    bool converged = !refine;

    if (refine && mode == ZwsMode::Free) {
        // Newton on (Im M2, Im M3)(omega, k): the clamped and free cutoff
        // curves cross transversally at a double cutoff, so the Jacobian is
        // well conditioned there
        auto F = [&](double a, double b) {
            const Matricant2 m = propagate(p, 0.0, 1.0, cplx(a * a), cplx(b * b), cfg);
            return std::pair(m.M2().imag(), m.M3().imag());
        };
        for (int it = 0; it < 40; ++it) {
            const auto [f1, f2] = F(w, q);
            if (std::abs(f1) + std::abs(f2) < 1e-11) {
                converged = true;
                break;
            }
            const double hw = 1e-6 * (1.0 + std::abs(w));
            const double hq = 1e-6 * (1.0 + std::abs(q));
            const auto [f1wp, f2wp] = F(w + hw, q);
            const auto [f1wm, f2wm] = F(w - hw, q);
            const auto [f1qp, f2qp] = F(w, q + hq);
            const auto [f1qm, f2qm] = F(w, q - hq);
            Eigen::Matrix2d J;
            J << (f1wp - f1wm) / (2 * hw), (f1qp - f1qm) / (2 * hq),
                (f2wp - f2wm) / (2 * hw), (f2qp - f2qm) / (2 * hq);
            if (!J.allFinite()) break;
            // thresholded least squares: on model profiles the zero set is a
            // whole curve and J drops rank along it; the pseudo-inverse takes
            // the minimal-norm step onto it instead of blowing up
            Eigen::JacobiSVD<Eigen::Matrix2d> svd(
                J, Eigen::ComputeFullU | Eigen::ComputeFullV);
            svd.setThreshold(1e-7);
            Eigen::Vector2d step = -svd.solve(Eigen::Vector2d(f1, f2));
            const double lim = 0.5 * (1.0 + std::abs(w));
            if (step.norm() > lim) step *= lim / step.norm();
            double scale = 1.0;
            const double r0 = std::abs(f1) + std::abs(f2);
            for (int cut = 0; cut < 6; ++cut) {
                const auto [g1, g2] = F(w + scale * step(0), q + scale * step(1));
                if (std::abs(g1) + std::abs(g2) < r0) break;
                scale *= 0.5;
            }
            w += scale * step(0);
            q += scale * step(1);
            if (!std::isfinite(w) || !std::isfinite(q))
                throw NewtonDiverged("detect_zws: iterates left the real domain");
            if (w < 0.0) w = std::abs(w);
            if (q < 0.0) q = std::abs(q);
        }
    } else if (refine && mode == ZwsMode::FixK) {
        // refine omega to the gap extremum dDelta/d(omega^2) = 0 at fixed k
        auto f = [&](double a) { return d_delta_integral(p, a * a, q * q, cfg).d_dw2; };
        double w0 = w, f0 = f(w0);
        double w1 = w0 * (1.0 + 1e-4) + 1e-8, f1 = f(w1);
        for (int it = 0; it < 60; ++it) {
            if (std::abs(f1) < 1e-12) {
                converged = true;
                break;
            }
            if (f1 == f0) break;
            const double w2 = w1 - f1 * (w1 - w0) / (f1 - f0);
            if (!std::isfinite(w2)) throw NewtonDiverged("detect_zws: secant diverged");
            w0 = w1;
            f0 = f1;
            w1 = w2;
            f1 = f(w1);
        }
        w = w1;
    }

    ZwsReport rep;
    rep.omega = w;
    rep.k = q;
    rep.newton_converged = converged;
    const Matricant2 mon = propagate(p, 0.0, 1.0, cplx(w * w), cplx(q * q), cfg);
    const double d = 0.5 * (mon.M1() + mon.M4()).real();
    rep.sign = d >= 0.0 ? 1 : -1;
    Mat2 dev = mon.M;
    dev(0, 0) -= rep.sign;
    dev(1, 1) -= rep.sign;
    rep.residual_M = max_abs(dev);
    std::vector<double> grid(129);
    for (int i = 0; i < 129; ++i) grid[i] = i / 128.0;
    double sup = 0.0;
    for (const auto& row : m_functions(p, w * w, q * q, grid, cfg))
        sup = std::max(sup, std::abs(row.m2));
    rep.residual_m2 = sup;
    rep.confirmed = rep.residual_M <= tolerance && rep.residual_m2 <= tolerance;
    // the spectrum origin has Delta = 1 with M != I; residuals reject it, but
    // guard the exact point explicitly
    if (w == 0.0 && q == 0.0) rep.confirmed = false;
    return rep;
}

StopbandProfile stopband_profile(const MaterialProfile& p, double k, int band,
                                 const QuadratureConfig& cfg) {
    if (band < 1) throw OutOfDomain("stopband_profile: band index is 1-based");
    double omega_max = 10.0;
    std::vector<GapInterval> gaps;
    for (int tries = 0; tries < 10; ++tries) {
        gaps = stopband_intervals(p, k, omega_max, cfg);
        if ((int)gaps.size() >= band) break;
        omega_max *= 1.7;
    }
    if ((int)gaps.size() < band)
        throw OutOfDomain("stopband_profile: gap " + std::to_string(band) + " not found");
    const GapInterval gap = gaps[band - 1];

    StopbandProfile out;
    out.band = band;
    out.k = k;
    out.omega_lo = gap.lo;
    out.omega_hi = gap.hi;

    const int nsamp = 101;
    for (int i = 0; i < nsamp; ++i) {
        const double w = gap.lo + (gap.hi - gap.lo) * i / (nsamp - 1);
        const double d = delta_value(p, w, k, cfg);
        out.samples.push_back({w, floquet_K(d).imag()});
    }

    if (gap.lo == 0.0) {
        // leading stopband: Im K peaks at omega = 0 with zero slope by evenness
        out.omega_ext = 0.0;
    } else {
        auto slope = [&](double w) {
            return 2.0 * w * d_delta_integral(p, w * w, k * k, cfg).d_dw2;
        };
        const double a = gap.lo + 1e-6 * (gap.hi - gap.lo);
        const double b = gap.hi - 1e-6 * (gap.hi - gap.lo);
        const double fa = slope(a), fb = slope(b);
        if (fa * fb > 0.0)
            throw NumericalError("stopband_profile: gap extremum bracket failed");
        out.omega_ext = detail::brent_root(slope, a, b, fa, fb, 1e-13, 1e-11);
    }
    const double d_ext = delta_value(p, out.omega_ext, k, cfg);
    out.im_K_max = floquet_K(d_ext).imag();
    const double m_sign = gap.parity == 0 ? 1.0 : -1.0;
    out.curvature = m_sign * d2_delta_domega2(p, out.omega_ext, k, cfg) /
                    std::sqrt(d_ext * d_ext - 1.0);
    return out;
}

BranchDerivative domega_dK(const MaterialProfile& p, double K, double k, int n,
                           const QuadratureConfig& cfg) {
    BranchDerivative out;
    if (K == 0.0 && k == 0.0 && n == 1) {
        out.origin = true;
        out.value = 1.0 / std::sqrt(p.mean_rho() * p.mean_inv_mu1());
        return out;
    }
    const double omega = branch_omega(p, K, k, n, cfg);
    out.omega = omega;
    const bool cutoff = std::min(std::abs(K), std::abs(K - M_PI)) < 1e-9;
    const int m = K > M_PI / 2 ? 1 : 0;

    if (!cutoff) {
        const double dDdw =
            2.0 * omega * d_delta_integral(p, omega * omega, k * k, cfg).d_dw2;
        out.value = -std::sin(K) / dDdw;
        return out;
    }

    out.at_cutoff = true;
    const double qd = m == 0 ? 1.0 : -1.0;
    auto deviation = [&](double w) {
        const Matricant2 mon = propagate(p, 0.0, 1.0, cplx(w * w), cplx(k * k), cfg);
        Mat2 dev = mon.M;
        dev(0, 0) -= qd;
        dev(1, 1) -= qd;
        return max_abs(dev);
    };
    double w_edge = omega;
    double dev = deviation(w_edge);
    if (dev > tol_zws && dev <= 1e-3) {
        // a tangent root is only located to ~sqrt(root tol); re-refine it as
        // the gap extremum before ruling the double cutoff out
        const ZwsReport r = detect_zws(p, omega, k, cfg, ZwsMode::FixK);
        if (r.confirmed) {
            w_edge = r.omega;
            dev = r.residual_M;
        }
    }
    if (dev <= tol_zws) {
        // gap of zero width: the two branches cross with finite slopes;
        // odd-numbered branches rise through the crossing, even ones fall
        out.zws = true;
        out.omega = w_edge;
        const double d2 = d2_delta_domega2(p, w_edge, k, cfg);
        const double radicand = (m == 0 ? -1.0 : 1.0) * d2;
        if (!(radicand > 0.0))
            throw NumericalError("domega_dK: curvature sign violates the gap-closure form");
        const double sgn = (n % 2 == 1) ? 1.0 : -1.0;
        out.value = sgn / std::sqrt(radicand);
        return out;
    }
    const double dDdw = 2.0 * omega * d_delta_integral(p, omega * omega, k * k, cfg).d_dw2;
    out.value = 0.0;
    out.curvature = (m == 0 ? -1.0 : 1.0) / dDdw;
    return out;
}

double domega_dk(const MaterialProfile& p, double K, double k, int n,
                 const QuadratureConfig& cfg) {
    if (K == 0.0 && k == 0.0 && n == 1)
        return std::sqrt(p.mean_mu2() / p.mean_rho());
    if (k == 0.0) return 0.0;
    const double omega = branch_omega(p, K, k, n, cfg);
    const DerivativeBundle b = d_delta_integral(p, omega * omega, k * k, cfg);
    if (std::abs(b.d_dw2) < 1e-12)
        throw ZwsDegenerate("domega_dk: dDelta/d(omega^2) vanishes (double cutoff)");
    return -(k / omega) * b.d_dk2 / b.d_dw2;
}

BlochFunction bloch_eigenfunction(const MaterialProfile& p, double K, double k, int n,
                                  const std::vector<double>& grid,
                                  const QuadratureConfig& cfg) {
    BlochFunction out;
    out.K = K;
    out.k = k;
    out.n = n;
    out.omega = branch_omega(p, K, k, n, cfg);
    const cplx w2(out.omega * out.omega), q2(k * k);
    const Matricant2 mon = propagate(p, 0.0, 1.0, w2, q2, cfg);
    const double d = 0.5 * (mon.M1() + mon.M4()).real();
    const cplx q = std::exp(cplx(0.0, 1.0) * floquet_K(std::clamp(d, -1.0, 1.0)));
    Vec2 w = bloch_vector(mon.M, q);
    const double nrm = std::sqrt(std::norm(w(0)) + std::norm(w(1)));
    if (nrm == 0.0) throw NumericalError("bloch_eigenfunction: null eigenvector");
    w /= nrm;
    out.qp_residual = (mon.M * w - q * w).norm();

    const auto mats = propagate_grid(p, grid, w2, q2, cfg);
    out.y = grid;
    out.u.reserve(grid.size());
    out.mu1_du.reserve(grid.size());
    const cplx minus_i(0.0, -1.0);
    for (const auto& m : mats) {
        const Vec2 eta = m * w;
        out.u.push_back(eta(0));
        out.mu1_du.push_back(minus_i * eta(1)); // eta_2 = i mu1 u'
    }
    return out;
}

std::vector<double> high_k_limit(const MaterialProfile& p, double K, int n,
                                 const std::vector<double>& k_list,
                                 const QuadratureConfig& cfg) {
    for (size_t i = 0; i + 1 < k_list.size(); ++i)
        if (!(k_list[i + 1] > k_list[i]))
            throw OutOfDomain("high_k_limit: k values must ascend");
    if (k_list.empty()) return {};

    const double c = std::cos(K);
    const double rate = detail::rate_integral(p, false);
    const QuadratureConfig lcfg = detail::loosened(cfg);
    auto tight = [&](double w, double kk) { return delta_value(p, w, kk, cfg) - c; };
    auto loose = [&](double w, double kk) { return delta_value(p, w, kk, lcfg) - c; };

    // walk outward from a predicted root to bracket the continued branch
    auto continue_root = [&](double kk, double guess) {
        double up = std::max(guess, 1e-6), gup = loose(up, kk);
        double dn = up, gdn = gup;
        for (int it = 0; it < 500; ++it) {
            const double wu = up + detail::scan_step(up, rate, detail::kPhaseBudget);
            const double gu = loose(wu, kk);
            if (gup * gu <= 0.0) {
                const double fa = tight(up, kk), fb = tight(wu, kk);
                if (fa * fb <= 0.0)
                    return detail::brent_root([&](double x) { return tight(x, kk); }, up, wu,
                                              fa, fb);
            }
            up = wu;
            gup = gu;
            if (dn > 1e-6) {
                const double wd =
                    std::max(1e-6, dn - detail::scan_step(dn, rate, detail::kPhaseBudget));
                const double gd = loose(wd, kk);
                if (gd * gdn <= 0.0) {
                    const double fa = tight(wd, kk), fb = tight(dn, kk);
                    if (fa * fb <= 0.0)
                        return detail::brent_root([&](double x) { return tight(x, kk); }, wd,
                                                  dn, fa, fb);
                }
                dn = wd;
                gdn = gd;
            }
        }
        throw ScanIncomplete("high_k_limit: lost the branch during continuation");
    };

    std::vector<double> out;
    double k_cur = k_list[0];
    double omega = branch_omega(p, K, k_cur, n, cfg);
    double slope = 0.0;
    out.push_back(k_cur > 0.0 ? omega * omega / (k_cur * k_cur)
                              : std::numeric_limits<double>::infinity());
    for (size_t i = 1; i < k_list.size(); ++i) {
        while (k_cur < k_list[i] - 1e-12) {
            const double dk = std::min(0.1, k_list[i] - k_cur);
            const double next = continue_root(k_cur + dk, omega + slope * dk);
            slope = (next - omega) / dk;
            omega = next;
            k_cur += dk;
        }
        out.push_back(omega * omega / (k_cur * k_cur));
    }
    return out;
}

} // namespace floquet
