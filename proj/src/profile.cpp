#include "floquet/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace floquet {

namespace {

double poly_eval(const std::vector<double>& c, double y) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * y + *it;
    return v;
}

// definite integral of a polynomial over [a,b]
double poly_integral(const std::vector<double>& c, double a, double b) {
    double va = 0.0, vb = 0.0;
    for (size_t j = c.size(); j-- > 0;) {
        const double cj = c[j] / double(j + 1);
        va = va * a + cj;
        vb = vb * b + cj;
    }
    return vb * b - va * a;
}

// adaptive Simpson with absolute tolerance
template <class F>
double simpson_rec(F&& f, double a, double m, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, lm, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, rm, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-13) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, 48);
}

} // namespace

double Coefficient::eval(double y) const {
    switch (kind) {
    case CoeffKind::Constant:
        return data.empty() ? 0.0 : data[0];
    case CoeffKind::Polynomial:
        return poly_eval(data, y);
    case CoeffKind::Sampled: {
        const size_t n = data.size() / 2;
        if (n == 0) return 0.0;
        if (n == 1 || y <= data[0]) return data[1];
        if (y >= data[2 * (n - 1)]) return data[2 * (n - 1) + 1];
        size_t lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            const size_t mid = (lo + hi) / 2;
            (data[2 * mid] <= y ? lo : hi) = mid;
        }
        const double y0 = data[2 * lo], v0 = data[2 * lo + 1];
        const double y1 = data[2 * hi], v1 = data[2 * hi + 1];
        return v0 + (v1 - v0) * (y - y0) / (y1 - y0);
    }
    }
    return 0.0;
}

bool Coefficient::constant() const {
    if (kind == CoeffKind::Constant) return true;
    if (kind == CoeffKind::Polynomial) {
        for (size_t j = 1; j < data.size(); ++j)
            if (data[j] != 0.0) return false;
        return true;
    }
    return false;
}

MaterialProfile::MaterialProfile(std::vector<Segment> segments, double period)
    : segs_(std::move(segments)), period_scale_(period) {
    if (segs_.empty()) throw ConfigError("profile: no segments");
    if (!(period > 0.0)) throw ConfigError("profile: period must be positive");

    if (period != 1.0) {
        for (auto& s : segs_) {
            s.from /= period;
            s.to /= period;
            for (Coefficient* c : {&s.rho, &s.mu1, &s.mu2}) {
                if (c->kind == CoeffKind::Polynomial) {
                    double p = 1.0;
                    for (auto& cj : c->data) { cj *= p; p *= period; }
                } else if (c->kind == CoeffKind::Sampled) {
                    for (size_t j = 0; j < c->data.size(); j += 2) c->data[j] /= period;
                }
            }
        }
    }

    std::sort(segs_.begin(), segs_.end(),
              [](const Segment& a, const Segment& b) { return a.from < b.from; });
    const double eps = 1e-12;
    if (std::abs(segs_.front().from) > eps || std::abs(segs_.back().to - 1.0) > eps)
        throw ConfigError("profile: segments must cover [0,1) exactly");
    for (size_t i = 0; i < segs_.size(); ++i) {
        if (!(segs_[i].to > segs_[i].from))
            throw ConfigError("profile: empty segment " + std::to_string(i));
        if (i + 1 < segs_.size() && std::abs(segs_[i].to - segs_[i + 1].from) > eps)
            throw ConfigError("profile: gap or overlap after segment " + std::to_string(i));
    }
    segs_.front().from = 0.0;
    segs_.back().to = 1.0;
    for (size_t i = 0; i + 1 < segs_.size(); ++i) {
        segs_[i + 1].from = segs_[i].to;
        breaks_.push_back(segs_[i].to);
    }

    // positivity at 1e4 uniform points plus segment edge limits
    const int N = 10000;
    for (int i = 0; i < N; ++i) {
        const double y = (i + 0.5) / N;
        const MaterialPoint p = at(y);
        static const char* names[3] = {"rho", "mu1", "mu2"};
        const double vals[3] = {p.rho, p.mu1, p.mu2};
        for (int j = 0; j < 3; ++j)
            if (!(vals[j] > 0.0) || !std::isfinite(vals[j]))
                throw ConfigError(std::string("profile: ") + names[j] +
                                  " non-positive at y=" + std::to_string(y));
    }
    for (const auto& s : segs_)
        for (double y : {s.from, std::nexttoward(s.to, s.from)})
            if (!(s.rho.eval(y) > 0.0) || !(s.mu1.eval(y) > 0.0) || !(s.mu2.eval(y) > 0.0))
                throw ConfigError("profile: coefficient non-positive at a segment edge");
}

const Segment& MaterialProfile::segment_at(double y) const {
    // half-open convention: boundary points belong to the right segment
    for (const auto& s : segs_)
        if (y < s.to) return s;
    return segs_.back();
}

MaterialPoint MaterialProfile::at(double y) const {
    y -= std::floor(y);
    const Segment& s = segment_at(y);
    return {s.rho.eval(y), s.mu1.eval(y), s.mu2.eval(y)};
}

void MaterialProfile::compute_means() const {
    if (means_ready_) return;
    double mr = 0, m1 = 0, m2 = 0, mi = 0;
    for (const auto& s : segs_) {
        const Coefficient* cs[3] = {&s.rho, &s.mu1, &s.mu2};
        double* out[3] = {&mr, &m1, &m2};
        for (int j = 0; j < 3; ++j) {
            if (cs[j]->kind == CoeffKind::Constant)
                *out[j] += cs[j]->data[0] * (s.to - s.from);
            else if (cs[j]->kind == CoeffKind::Polynomial)
                *out[j] += poly_integral(cs[j]->data, s.from, s.to);
            else
                *out[j] += adaptive_simpson([&](double y) { return cs[j]->eval(y); },
                                            s.from, s.to);
        }
        if (s.mu1.kind == CoeffKind::Constant)
            mi += (s.to - s.from) / s.mu1.data[0];
        else
            mi += adaptive_simpson([&](double y) { return 1.0 / s.mu1.eval(y); },
                                   s.from, s.to);
    }
    means_[0] = mr; means_[1] = m1; means_[2] = m2; means_[3] = mi;
    means_ready_ = true;
}

double MaterialProfile::mean_rho() const { compute_means(); return means_[0]; }
double MaterialProfile::mean_mu1() const { compute_means(); return means_[1]; }
double MaterialProfile::mean_mu2() const { compute_means(); return means_[2]; }
double MaterialProfile::mean_inv_mu1() const { compute_means(); return means_[3]; }

std::pair<double, double> MaterialProfile::extremum(ProfileExpr expr) const {
    auto value = [&](const MaterialPoint& p) {
        switch (expr) {
        case ProfileExpr::Mu2OverRho: return p.mu2 / p.rho;
        case ProfileExpr::RhoOverMu2: return p.rho / p.mu2;
        case ProfileExpr::Rho: return p.rho;
        case ProfileExpr::Mu1: return p.mu1;
        case ProfileExpr::Mu2: return p.mu2;
        }
        return 0.0;
    };
    auto seg_value = [&](const Segment& s, double y) {
        return value({s.rho.eval(y), s.mu1.eval(y), s.mu2.eval(y)});
    };

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    auto consider = [&](double v) { lo = std::min(lo, v); hi = std::max(hi, v); };

    for (const auto& s : segs_) {
        // closed-interval endpoints (left/right limits at jumps)
        consider(seg_value(s, s.from));
        consider(seg_value(s, s.to));
        // polynomial critical points when the relevant pieces are low degree
        auto add_crit = [&](const Coefficient& c) {
            if (c.kind != CoeffKind::Polynomial || c.data.size() > 4) return;
            // derivative of cubic: quadratic a y^2 + b y + g
            double a = c.data.size() > 3 ? 3 * c.data[3] : 0.0;
            double b = c.data.size() > 2 ? 2 * c.data[2] : 0.0;
            double g = c.data.size() > 1 ? c.data[1] : 0.0;
            double roots[2];
            int nr = 0;
            if (a == 0.0) {
                if (b != 0.0) roots[nr++] = -g / b;
            } else {
                const double disc = b * b - 4 * a * g;
                if (disc >= 0) {
                    roots[nr++] = (-b + std::sqrt(disc)) / (2 * a);
                    roots[nr++] = (-b - std::sqrt(disc)) / (2 * a);
                }
            }
            for (int i = 0; i < nr; ++i)
                if (roots[i] > s.from && roots[i] < s.to) consider(seg_value(s, roots[i]));
        };
        if (expr == ProfileExpr::Rho) add_crit(s.rho);
        if (expr == ProfileExpr::Mu1) add_crit(s.mu1);
        if (expr == ProfileExpr::Mu2) add_crit(s.mu2);

        // dense sample with parabolic refinement for ratios / higher degree
        const int n = 512;
        double prev2 = seg_value(s, s.from), prev1 = prev2;
        for (int i = 1; i <= n; ++i) {
            const double y = s.from + (s.to - s.from) * i / n;
            const double v = seg_value(s, y);
            consider(v);
            // local extremum between samples: one parabolic step
            if (i >= 2) {
                const double d1 = prev1 - prev2, d2 = v - prev1;
                if (d1 * d2 < 0.0) {
                    const double h = (s.to - s.from) / n;
                    const double denom = d2 - d1;
                    if (denom != 0.0) {
                        const double yc = s.from + (s.to - s.from) * (i - 1) / double(n) -
                                          h * (d1 + d2) / (2.0 * denom);
                        if (yc > s.from && yc < s.to) consider(seg_value(s, yc));
                    }
                }
            }
            prev2 = prev1;
            prev1 = v;
        }
    }
    return {lo, hi};
}

bool MaterialProfile::piecewise_constant() const {
    for (const auto& s : segs_)
        if (!s.rho.constant() || !s.mu1.constant() || !s.mu2.constant()) return false;
    return true;
}

std::vector<MaterialPoint> MaterialProfile::layers(std::vector<double>* widths) const {
    if (!piecewise_constant())
        throw ConfigError("profile: layers() requires piecewise-constant coefficients");
    std::vector<MaterialPoint> out;
    if (widths) widths->clear();
    for (const auto& s : segs_) {
        out.push_back({s.rho.eval(s.from), s.mu1.eval(s.from), s.mu2.eval(s.from)});
        if (widths) widths->push_back(s.to - s.from);
    }
    return out;
}

MaterialProfile MaterialProfile::homogeneous(double rho, double mu1, double mu2) {
    Segment s;
    s.from = 0.0; s.to = 1.0;
    s.rho = Coefficient::constant_value(rho);
    s.mu1 = Coefficient::constant_value(mu1);
    s.mu2 = Coefficient::constant_value(mu2);
    return MaterialProfile({s});
}

MaterialProfile MaterialProfile::bilayer(const MaterialPoint& a, const MaterialPoint& b,
                                         double d1, double period) {
    Segment s1, s2;
    s1.from = 0.0; s1.to = d1 * period;
    s1.rho = Coefficient::constant_value(a.rho);
    s1.mu1 = Coefficient::constant_value(a.mu1);
    s1.mu2 = Coefficient::constant_value(a.mu2);
    s2.from = d1 * period; s2.to = period;
    s2.rho = Coefficient::constant_value(b.rho);
    s2.mu1 = Coefficient::constant_value(b.mu1);
    s2.mu2 = Coefficient::constant_value(b.mu2);
    return MaterialProfile({s1, s2}, period);
}

MaterialProfile reduce_monoclinic(const std::vector<MonoclinicSegment>& segments,
                                  double period) {
    // mu1 = c44, mu2 = c55 - c45^2/c44; represented by sampling since the
    // reduction of polynomial input is rational, not polynomial
    std::vector<Segment> out;
    for (const auto& m : segments) {
        Segment s;
        s.from = m.from; s.to = m.to;
        s.rho = m.rho;
        s.mu1 = m.c44;
        const bool all_const = m.c44.constant() && m.c45.constant() && m.c55.constant();
        auto mu2_at = [&](double y) {
            const double c44 = m.c44.eval(y), c45 = m.c45.eval(y), c55 = m.c55.eval(y);
            const double v = c55 - c45 * c45 / c44;
            if (!(c44 > 0.0) || !(v > 0.0))
                throw DegenerateStiffness("monoclinic: c44*c55 - c45^2 <= 0 at y=" +
                                          std::to_string(y));
            return v;
        };
        if (all_const) {
            s.mu2 = Coefficient::constant_value(mu2_at(m.from));
        } else {
            const int n = 256;
            Coefficient c;
            c.kind = CoeffKind::Sampled;
            for (int i = 0; i <= n; ++i) {
                const double y = m.from + (m.to - m.from) * i / n;
                c.data.push_back(y);
                c.data.push_back(mu2_at(y));
            }
            s.mu2 = std::move(c);
        }
        out.push_back(std::move(s));
    }
    return MaterialProfile(std::move(out), period);
}

} // namespace floquet
