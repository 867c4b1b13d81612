#pragma once

#include <utility>

#include "floquet/lyapunov.hpp"
#include "floquet/profile.hpp"

namespace floquet {

enum class BoundKind {
    GlobalUpper,      // |Delta| <= cosh sqrt((mu2max|k2| + rhomax|w2|)/mu1min)
    EvanescentLower,  // Delta >= cosh sqrt((mu2min k2 - rhomax w2)/mu1max)
    FirstBranchLower, // omega_1^2 >= k^2 min(mu2/rho)
    FirstBranchUpper, // omega_1^2 <= (<mu1> K^2 + <mu2> k^2) / <rho>
    EdgeBracket       // w sqrt(<rho>/<mu2>) <= k_{1,0} <= w max sqrt(rho/mu2)
};

struct BoundReport {
    cplx omega2{0.0, 0.0}, k2{0.0, 0.0};
    double bound_value = 0.0;
    double actual_value = 0.0;
    bool satisfied = false; // the inequality holds with slack >= -1e-9 (may be tight)
    BoundKind which = BoundKind::GlobalUpper;
};

// Zero-order short-wave approximation of Delta at fixed k:
//   (1/2) ([Z]^{1/2} + [Z]^{-1/2}) cos(omega int_0^1 Z/mu1 dy),
// Z = sqrt(rho mu1) sqrt(1 - mu2 k^2 / rho omega^2), [Z] the relative jump of
// Z at the profile's single discontinuity ([Z] = 1 if Z is continuous).
// Requires the supersonic regime omega^2 > k^2 max(mu2/rho) and at most one
// jump of Z per period (the period edge y = 0 counts as one location).
double wkb_delta(const MaterialProfile& p, double omega, double k);

// Growth envelope, valid for any complex omega^2, k^2.
BoundReport bound_upper_envelope(const MaterialProfile& p, cplx omega2, cplx k2,
                                 const QuadratureConfig& cfg = {});

// Lower bound in the evanescent region mu2min k^2 >= rhomax omega^2.
BoundReport bound_evanescent(const MaterialProfile& p, double omega2, double k2,
                             const QuadratureConfig& cfg = {});

// Two-sided bound of the first branch omega_1(K, k), K in [-pi, pi]. Returns
// {lower, upper}; at K = 0 and K = pi these specialize to the first-cutoff
// bounds at the zone center and zone edge.
std::pair<BoundReport, BoundReport> first_eig_bounds(const MaterialProfile& p, double K,
                                                     double k,
                                                     const QuadratureConfig& cfg = {});

} // namespace floquet
