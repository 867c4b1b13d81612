#include "floquet/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace floquet {

namespace {

// Composite Simpson grid aligned with segment boundaries so that integrands
// with coefficient jumps stay piecewise smooth between nodes. Nodes at an
// interior boundary are duplicated; each copy evaluates its own segment.
struct QuadGrid {
    std::vector<double> y;
    std::vector<double> w;
    std::vector<const Segment*> seg;
};

QuadGrid simpson_grid(const MaterialProfile& p, int target_n) {
    QuadGrid g;
    for (const auto& s : p.segments()) {
        const double len = s.to - s.from;
        int n = std::max(8, (int)std::ceil(target_n * len));
        if (n % 2) ++n;
        const double h = len / n;
        for (int j = 0; j <= n; ++j) {
            g.y.push_back(s.from + len * j / n);
            const double wj = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            g.w.push_back(wj * h / 3.0);
            g.seg.push_back(&s);
        }
    }
    return g;
}

BandClass classify(cplx d) {
    if (std::abs(d.imag()) > eps_cut) return BandClass::Stopband;
    const double x = d.real();
    if (std::abs(x - 1.0) <= eps_cut) return BandClass::CutoffPlus;
    if (std::abs(x + 1.0) <= eps_cut) return BandClass::CutoffMinus;
    return std::abs(x) < 1.0 ? BandClass::Passband : BandClass::Stopband;
}

} // namespace

const char* band_class_name(BandClass c) {
    switch (c) {
    case BandClass::Passband: return "passband";
    case BandClass::CutoffPlus: return "cutoff+";
    case BandClass::CutoffMinus: return "cutoff-";
    case BandClass::Stopband: return "stopband";
    }
    return "?";
}

LyapunovSample delta(const MaterialProfile& p, cplx omega2, cplx k2,
                     const QuadratureConfig& cfg) {
    const Matricant2 m = propagate(p, 0.0, 1.0, omega2, k2, cfg);
    LyapunovSample s;
    s.omega2 = omega2;
    s.k2 = k2;
    s.delta = 0.5 * (m.M1() + m.M4());
    const bool real_args = omega2.imag() == 0.0 && k2.imag() == 0.0;
    s.K = real_args ? floquet_K(s.delta.real()) : floquet_K(s.delta);
    s.classification = classify(s.delta);
    s.origin = omega2 == cplx(0.0) && k2 == cplx(0.0);
    return s;
}

cplx floquet_K(double d) {
    if (d >= -1.0 && d <= 1.0) return cplx(std::acos(d), 0.0);
    if (d > 1.0) return cplx(0.0, std::acosh(d));
    return cplx(M_PI, std::acosh(-d));
}

cplx floquet_K(cplx d) {
    if (d.imag() == 0.0) return floquet_K(d.real());
    cplx K = std::acos(d);
    if (K.imag() < 0.0) K = -K; // cos is even; pick the Im K >= 0 representative
    return K;
}

double delta_small(const MaterialProfile& p, double omega2, double k2) {
    return 1.0 + 0.5 * p.mean_inv_mu1() * (p.mean_mu2() * k2 - p.mean_rho() * omega2);
}

DerivativeBundle d_delta_integral(const MaterialProfile& p, double omega2, double k2,
                                  const QuadratureConfig& cfg) {
    const QuadGrid g = simpson_grid(p, 512);
    const auto rows = m_functions(p, omega2, k2, g.y, cfg);
    DerivativeBundle out;
    out.method = DerivMethod::Integral;
    double iw = 0.0, ik = 0.0;
    for (size_t i = 0; i < g.y.size(); ++i) {
        iw += g.w[i] * g.seg[i]->rho.eval(g.y[i]) * rows[i].m2;
        ik += g.w[i] * g.seg[i]->mu2.eval(g.y[i]) * rows[i].m2;
    }
    out.d_dw2 = 0.5 * iw;
    out.d_dk2 = -0.5 * ik;
    return out;
}

DerivativeBundle d_delta_eigen(const MaterialProfile& p, double omega2, double k2,
                               const QuadratureConfig& cfg) {
    const Matricant2 mon = propagate(p, 0.0, 1.0, omega2, k2, cfg);
    const double d = 0.5 * (mon.M1() + mon.M4()).real();
    if (std::abs(d) > 1.0 + eps_cut)
        throw NotInPassband("d_delta_eigen: |Delta| = " + std::to_string(std::abs(d)) +
                            " exceeds 1");

    DerivativeBundle out;
    out.method = DerivMethod::Eigen;

    const bool at_cutoff = std::abs(std::abs(d) - 1.0) <= eps_cut;
    Vec2 w;
    cplx prefactor; // multiplies int rho|u|^2 for d/dw2; negated for d/dk2
    if (at_cutoff) {
        const double qd = d > 0.0 ? 1.0 : -1.0;
        Mat2 dev = mon.M;
        dev(0, 0) -= qd;
        dev(1, 1) -= qd;
        if (max_abs(dev) <= 1e-9) { // M = +-I: semisimple double eigenvalue
            out.zws_degenerate = true;
            return out;
        }
        // eigenvector choice makes wd+ T wg collapse to conj(M2) or conj(M3)
        if (std::abs(mon.M2()) >= std::abs(mon.M3())) {
            w << mon.M2(), qd - mon.M1();
            prefactor = 1.0 / (cplx(0.0, 2.0) * std::conj(mon.M2()));
        } else {
            w << qd - mon.M4(), mon.M3();
            prefactor = 1.0 / (cplx(0.0, 2.0) * std::conj(mon.M3()));
        }
    } else {
        const cplx q = std::exp(cplx(0.0, 1.0) * floquet_K(d));
        if (std::abs(mon.M2()) >= std::abs(mon.M3()))
            w << mon.M2(), q - mon.M1();
        else
            w << q - mon.M4(), mon.M3();
        const cplx wTw = std::conj(w(0)) * w(1) + std::conj(w(1)) * w(0);
        prefactor = std::sin(floquet_K(d).real()) / wTw;
    }

    const QuadGrid g = simpson_grid(p, 512);
    const auto mats = propagate_grid(p, g.y, omega2, k2, cfg);
    double irho = 0.0, imu2 = 0.0;
    for (size_t i = 0; i < g.y.size(); ++i) {
        const cplx u = mats[i](0, 0) * w(0) + mats[i](0, 1) * w(1);
        const double u2 = std::norm(u);
        irho += g.w[i] * g.seg[i]->rho.eval(g.y[i]) * u2;
        imu2 += g.w[i] * g.seg[i]->mu2.eval(g.y[i]) * u2;
    }
    out.d_dw2 = (prefactor * irho).real();
    out.d_dk2 = -(prefactor * imu2).real();
    return out;
}

DerivativeBundle d_delta_fd(const MaterialProfile& p, double omega2, double k2,
                            double step, const QuadratureConfig& cfg) {
    auto dval = [&](double w2, double q2) {
        return delta(p, cplx(w2), cplx(q2), cfg).delta.real();
    };
    DerivativeBundle out;
    out.method = DerivMethod::FiniteDiff;
    out.d_dw2 = (dval(omega2 + step, k2) - dval(omega2 - step, k2)) / (2.0 * step);
    out.d_dk2 = (dval(omega2, k2 + step) - dval(omega2, k2 - step)) / (2.0 * step);
    return out;
}

namespace {

double d2_on_grid(const MaterialProfile& p, double omega2, double k2, SecondDeriv which,
                  const QuadratureConfig& cfg, int n) {
    // nodes i/n, trapezoid in both directions over the triangle s2 <= s1
    std::vector<double> ys(n + 1);
    for (int i = 0; i <= n; ++i) ys[i] = double(i) / n;
    const auto mats = propagate_grid(p, ys, cplx(omega2), cplx(k2), cfg);
    const Mat2 full = mats[n];

    std::vector<Mat2> inv(n + 1);
    for (int i = 0; i <= n; ++i) {
        inv[i] << mats[i](1, 1), -mats[i](0, 1), -mats[i](1, 0), mats[i](0, 0);
    }
    // left limit at y = 1: the integrand on [0,1] continues the interior
    // values, not the next period's right limit
    std::vector<double> rho(n + 1), mu2(n + 1);
    for (int i = 0; i <= n; ++i) {
        const MaterialPoint pt = p.at(std::min(ys[i], std::nextafter(1.0, 0.0)));
        rho[i] = pt.rho;
        mu2[i] = pt.mu2;
    }

    const double h = 1.0 / n;
    double total = 0.0;
    for (int i1 = 1; i1 <= n; ++i1) { // i1 = 0 has a zero-length inner interval
        const double w1 = (i1 == n) ? 0.5 : 1.0;
        const Mat2 back = full * inv[i1]; // M(1, s1)
        double inner = 0.0;
        for (int i2 = 0; i2 <= i1; ++i2) {
            const double w2 = (i2 == 0 || i2 == i1) ? 0.5 : 1.0;
            const cplx m2_wrap = (mats[i2] * back)(0, 1);  // M2(s2+1, s1)
            const cplx m2_fwd = (mats[i1] * inv[i2])(0, 1); // M2(s1, s2)
            double f;
            switch (which) {
            case SecondDeriv::W2W2: f = -rho[i1] * rho[i2]; break;
            case SecondDeriv::K2K2: f = -mu2[i1] * mu2[i2]; break;
            default: f = 0.5 * (rho[i1] * mu2[i2] + mu2[i1] * rho[i2]); break;
            }
            inner += w2 * f * (m2_wrap * m2_fwd).real();
        }
        total += w1 * inner * h;
    }
    return total * h;
}

} // namespace

double d2_delta(const MaterialProfile& p, double omega2, double k2, SecondDeriv which,
                const QuadratureConfig& cfg, int nodes) {
    if (nodes < 16 || nodes % 2) throw ConfigError("d2_delta: nodes must be even and >= 16");
    const double coarse = d2_on_grid(p, omega2, k2, which, cfg, nodes / 2);
    const double fine = d2_on_grid(p, omega2, k2, which, cfg, nodes);
    return fine + (fine - coarse) / 3.0; // trapezoid is O(h^2): one Richardson step
}

double d2_delta_domega2(const MaterialProfile& p, double omega, double k,
                        const QuadratureConfig& cfg) {
    const double w2 = omega * omega, q2 = k * k;
    const double first = d_delta_integral(p, w2, q2, cfg).d_dw2;
    const double second = d2_delta(p, w2, q2, SecondDeriv::W2W2, cfg);
    return 2.0 * first + 4.0 * w2 * second;
}

} // namespace floquet
