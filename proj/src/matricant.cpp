#include "floquet/matricant.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace floquet {

namespace {

constexpr double kEdgeEps = 1e-14;

Mat2 q_of(const Segment& s, double ylocal, cplx omega2, cplx k2) {
    const double rho = s.rho.eval(ylocal);
    const double mu1 = s.mu1.eval(ylocal);
    const double mu2 = s.mu2.eval(ylocal);
    Mat2 q;
    const cplx i{0.0, 1.0};
    q(0, 0) = 0.0;
    q(0, 1) = -i / mu1;
    q(1, 0) = i * (mu2 * k2 - rho * omega2);
    q(1, 1) = 0.0;
    return q;
}

// one Magnus step over [a, a+h] inside a single segment
Mat2 magnus_step(const Segment& s, double a, double h, cplx omega2, cplx k2, Scheme scheme) {
    if (scheme == Scheme::Midpoint)
        return exp_traceless(h * q_of(s, a + 0.5 * h, omega2, k2));
    static const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
    static const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
    const Mat2 A1 = q_of(s, a + c1 * h, omega2, k2);
    const Mat2 A2 = q_of(s, a + c2 * h, omega2, k2);
    const Mat2 omega = 0.5 * h * (A1 + A2) +
                       (std::sqrt(3.0) * h * h / 12.0) * (A2 * A1 - A1 * A2);
    return exp_traceless(omega);
}

Mat2 chunk_fixed(const Segment& s, double a, double b, int n, cplx omega2, cplx k2,
                 Scheme scheme) {
    const double h = (b - a) / n;
    Mat2 m = Mat2::Identity();
    for (int i = 0; i < n; ++i) m = magnus_step(s, a + i * h, h, omega2, k2, scheme) * m;
    return m;
}

// propagator across [a,b] lying within one segment (local coordinates)
Mat2 chunk_propagator(const Segment& s, double a, double b, cplx omega2, cplx k2,
                      const QuadratureConfig& cfg, bool& tol_ok, double& err_est) {
    const bool constant = s.rho.constant() && s.mu1.constant() && s.mu2.constant();
    if (constant) return exp_traceless((b - a) * q_of(s, a, omega2, k2));

    int n = 4;
    Mat2 prev = chunk_fixed(s, a, b, n, omega2, k2, cfg.scheme);
    for (int round = 0; round < cfg.max_subdivision; ++round) {
        n *= 2;
        const Mat2 cur = chunk_fixed(s, a, b, n, omega2, k2, cfg.scheme);
        const double diff = max_abs(Mat2(cur - prev));
        const double tol = cfg.abs_tol * (b - a) + cfg.rel_tol * max_abs(cur);
        if (diff <= tol) {
            err_est += diff;
            return cur;
        }
        prev = cur;
    }
    tol_ok = false;
    err_est += max_abs(prev);
    if (!cfg.allow_partial)
        throw ToleranceNotReached("propagate: step halving exhausted on segment [" +
                                  std::to_string(s.from) + "," + std::to_string(s.to) + ")");
    return prev;
}

} // namespace

Mat2 q_matrix(const MaterialProfile& p, double y, cplx omega2, cplx k2) {
    if (y < 0.0 || y >= 1.0) throw OutOfDomain("q_matrix: y must lie in [0,1)");
    const MaterialPoint pt = p.at(y);
    Mat2 q;
    const cplx i{0.0, 1.0};
    q(0, 0) = 0.0;
    q(0, 1) = -i / pt.mu1;
    q(1, 0) = i * (pt.mu2 * k2 - pt.rho * omega2);
    q(1, 1) = 0.0;
    return q;
}

Matricant2 propagate(const MaterialProfile& p, double y0, double y, cplx omega2, cplx k2,
                     const QuadratureConfig& cfg) {
    if (y < y0) throw OutOfDomain("propagate: requires y0 <= y");
    if (cfg.max_subdivision < 8) throw ConfigError("propagate: max_subdivision must be >= 8");

    Matricant2 out;
    out.omega2 = omega2;
    out.k2 = k2;
    out.y0 = y0;
    out.y = y;

    double pos = y0;
    while (pos < y - kEdgeEps) {
        const double base = std::floor(pos);
        double local = pos - base;
        // land exactly on a segment start when within rounding of a boundary
        const Segment* seg = nullptr;
        for (const auto& s : p.segments()) {
            if (local < s.to - kEdgeEps) { seg = &s; break; }
        }
        if (!seg) { // local ~ 1.0: wrap to next period
            pos = base + 1.0;
            continue;
        }
        const double stop = std::min(y, base + seg->to);
        out.M = chunk_propagator(*seg, local, stop - base, omega2, k2, cfg,
                                 out.tol_ok, out.err_est) * out.M;
        pos = stop;
    }
    return out;
}

std::vector<Mat2> propagate_grid(const MaterialProfile& p, const std::vector<double>& grid,
                                 cplx omega2, cplx k2, const QuadratureConfig& cfg) {
    std::vector<Mat2> out;
    out.reserve(grid.size());
    Mat2 acc = Mat2::Identity();
    double pos = 0.0;
    for (double g : grid) {
        if (g < pos - kEdgeEps || g > 1.0 + kEdgeEps)
            throw OutOfDomain("propagate_grid: grid must ascend within [0,1]");
        if (g > pos + kEdgeEps) {
            acc = propagate(p, pos, g, omega2, k2, cfg).M * acc;
            pos = g;
        }
        out.push_back(acc);
    }
    return out;
}

Matricant2 monodromy(const MaterialProfile& p, double y0, cplx omega2, cplx k2,
                     const QuadratureConfig& cfg, bool via_similarity) {
    if (y0 < 0.0 || y0 >= 1.0) throw OutOfDomain("monodromy: y0 must lie in [0,1)");
    if (!via_similarity || y0 == 0.0) return propagate(p, y0, y0 + 1.0, omega2, k2, cfg);
    const Matricant2 to_y = propagate(p, 0.0, y0, omega2, k2, cfg);
    const Matricant2 full = propagate(p, 0.0, 1.0, omega2, k2, cfg);
    Mat2 inv;
    inv << to_y.M(1, 1), -to_y.M(0, 1), -to_y.M(1, 0), to_y.M(0, 0); // det = 1
    Matricant2 out;
    out.M = to_y.M * full.M * inv;
    out.omega2 = omega2;
    out.k2 = k2;
    out.y0 = y0;
    out.y = y0 + 1.0;
    out.tol_ok = to_y.tol_ok && full.tol_ok;
    out.err_est = to_y.err_est + full.err_est;
    return out;
}

Matricant2 bilayer_monodromy(const MaterialPoint& a, double da, const MaterialPoint& b,
                             double db, double omega, double k) {
    if (std::abs(da + db - 1.0) > 1e-12)
        throw ConfigError("bilayer_monodromy: layer widths must sum to 1");
    auto closed_form = [&]() {
        if (omega == 0.0)
            throw OmegaZero("bilayer_monodromy: closed form singular at omega = 0");
        const cplx i{0.0, 1.0};
        Mat2 m = Mat2::Identity();
        for (const auto& [pt, d] : {std::pair{a, da}, std::pair{b, db}}) {
            // Z = sqrt(rho mu1) sqrt(1 - mu2 k^2 / (rho w^2)), principal branch;
            // complex Z handles the evanescent regime
            const cplx z = std::sqrt(cplx(pt.rho * pt.mu1)) *
                           std::sqrt(cplx(1.0 - pt.mu2 * k * k / (pt.rho * omega * omega)));
            const cplx psi = omega * z * d / pt.mu1;
            Mat2 layer;
            layer(0, 0) = std::cos(psi);
            layer(0, 1) = -i * std::sin(psi) / (omega * z);
            layer(1, 0) = -i * omega * z * std::sin(psi);
            layer(1, 1) = std::cos(psi);
            m = layer * m;
        }
        return m;
    };

    Matricant2 out;
    out.omega2 = cplx(omega * omega);
    out.k2 = cplx(k * k);
    out.y0 = 0.0;
    out.y = 1.0;
    try {
        out.M = closed_form();
    } catch (const OmegaZero&) {
        out = propagate(MaterialProfile::bilayer(a, b, da), 0.0, 1.0, out.omega2, out.k2);
    }
    return out;
}

std::vector<MonodromyRow> m_functions(const MaterialProfile& p, double omega2, double k2,
                                      const std::vector<double>& grid,
                                      const QuadratureConfig& cfg) {
    const Matricant2 full = propagate(p, 0.0, 1.0, omega2, k2, cfg);
    const std::vector<Mat2> to_y = propagate_grid(p, grid, omega2, k2, cfg);
    std::vector<MonodromyRow> out;
    out.reserve(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        Mat2 inv;
        inv << to_y[i](1, 1), -to_y[i](0, 1), -to_y[i](1, 0), to_y[i](0, 0);
        const Mat2 m = to_y[i] * full.M * inv;
        MonodromyRow row;
        row.y = grid[i];
        row.m1 = m(0, 0).real();
        row.m2 = m(0, 1).imag();
        row.m3 = m(1, 0).imag();
        row.m4 = m(1, 1).real();
        out.push_back(row);
    }
    return out;
}

} // namespace floquet
