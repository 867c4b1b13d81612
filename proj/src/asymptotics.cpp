#include "floquet/asymptotics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "floquet/spectrum.hpp"

namespace floquet {

namespace {

double impedance(const Segment& s, double y, double omega, double k) {
    const double rho = s.rho.eval(y), mu1 = s.mu1.eval(y), mu2 = s.mu2.eval(y);
    return std::sqrt(rho * mu1) * std::sqrt(1.0 - mu2 * k * k / (rho * omega * omega));
}

} // namespace

double wkb_delta(const MaterialProfile& p, double omega, double k) {
    const double fastest = p.extremum(ProfileExpr::Mu2OverRho).second;
    if (!(omega * omega > k * k * fastest))
        throw NotSupersonic("wkb_delta: requires omega^2 > k^2 max(mu2/rho) = " +
                            std::to_string(k * k * fastest));

    const auto& segs = p.segments();
    // Z can only jump across segment boundaries (coefficients are continuous
    // inside a segment); the wrap-around boundary at y = 0 is one candidate.
    double jump = 1.0;
    int jumps = 0;
    for (size_t i = 0; i < segs.size(); ++i) {
        const Segment& left = segs[(i + segs.size() - 1) % segs.size()];
        const Segment& right = segs[i];
        // left limit at the boundary = right end of the previous segment
        const double zl = impedance(left, left.to, omega, k);
        const double zr = impedance(right, right.from, omega, k);
        if (std::abs(zl - zr) > 1e-9 * std::max({zl, zr, 1.0})) {
            ++jumps;
            jump = zl / zr;
        }
    }
    if (jumps > 1)
        throw MultipleJumps("wkb_delta: profile has " + std::to_string(jumps) +
                            " impedance jumps; the zero-order form covers at most one");

    double phase = 0.0; // int Z / mu1 dy, Simpson per segment
    for (const auto& s : segs) {
        const int n = 256;
        const double h = (s.to - s.from) / n;
        double acc = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double y = s.from + h * j;
            acc += impedance(s, y, omega, k) / s.mu1.eval(y) *
                   ((j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0));
        }
        phase += acc * h / 3.0;
    }
    return 0.5 * (std::sqrt(jump) + 1.0 / std::sqrt(jump)) * std::cos(omega * phase);
}

BoundReport bound_upper_envelope(const MaterialProfile& p, cplx omega2, cplx k2,
                                 const QuadratureConfig& cfg) {
    BoundReport rep;
    rep.which = BoundKind::GlobalUpper;
    rep.omega2 = omega2;
    rep.k2 = k2;
    const double mu1_min = p.extremum(ProfileExpr::Mu1).first;
    const double mu2_max = p.extremum(ProfileExpr::Mu2).second;
    const double rho_max = p.extremum(ProfileExpr::Rho).second;
    rep.bound_value =
        std::cosh(std::sqrt((mu2_max * std::abs(k2) + rho_max * std::abs(omega2)) / mu1_min));
    rep.actual_value = std::abs(delta(p, omega2, k2, cfg).delta);
    rep.satisfied = rep.actual_value <= rep.bound_value + 1e-9 * std::max(1.0, rep.bound_value);
    return rep;
}

BoundReport bound_evanescent(const MaterialProfile& p, double omega2, double k2,
                             const QuadratureConfig& cfg) {
    const double mu2_min = p.extremum(ProfileExpr::Mu2).first;
    const double mu1_max = p.extremum(ProfileExpr::Mu1).second;
    const double rho_max = p.extremum(ProfileExpr::Rho).second;
    if (!(mu2_min * k2 >= rho_max * omega2))
        throw PreconditionOutOfRegion(
            "bound_evanescent: requires mu2min k^2 >= rhomax omega^2");
    BoundReport rep;
    rep.which = BoundKind::EvanescentLower;
    rep.omega2 = omega2;
    rep.k2 = k2;
    rep.bound_value = std::cosh(std::sqrt((mu2_min * k2 - rho_max * omega2) / mu1_max));
    rep.actual_value = delta(p, cplx(omega2), cplx(k2), cfg).delta.real();
    rep.satisfied = rep.actual_value >= rep.bound_value - 1e-9 * std::max(1.0, rep.bound_value);
    return rep;
}

std::pair<BoundReport, BoundReport> first_eig_bounds(const MaterialProfile& p, double K,
                                                     double k, const QuadratureConfig& cfg) {
    if (K < -M_PI - 1e-12 || K > M_PI + 1e-12)
        throw OutOfDomain("first_eig_bounds: K must lie in [-pi, pi]");
    const double omega1 = branch_omega(p, std::abs(K), k, 1, cfg);
    const double w2 = omega1 * omega1;

    BoundReport lower;
    lower.which = BoundKind::FirstBranchLower;
    lower.omega2 = w2;
    lower.k2 = k * k;
    lower.bound_value = k * k * p.extremum(ProfileExpr::Mu2OverRho).first;
    lower.actual_value = w2;
    lower.satisfied = w2 >= lower.bound_value - 1e-9 * (1.0 + lower.bound_value);

    BoundReport upper = lower;
    upper.which = BoundKind::FirstBranchUpper;
    upper.bound_value = (p.mean_mu1() * K * K + p.mean_mu2() * k * k) / p.mean_rho();
    upper.satisfied = w2 <= upper.bound_value + 1e-9 * (1.0 + upper.bound_value);
    return {lower, upper};
}

} // namespace floquet
