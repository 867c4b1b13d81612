#pragma once

#include <string>
#include <vector>

#include "floquet/matricant.hpp"
#include "floquet/profile.hpp"

namespace floquet {

// One measured invariant. passed <=> the measurement ran to completion and
// residual <= tolerance. A check that throws reports residual = inf.
struct CheckResult {
    std::string suite;
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

// Structural identities of the propagator: unit determinant, entry
// realness pattern, trace invariance in the base point, m1 m4 + m2 m3 = 1,
// scheme and similarity-path agreement.
std::vector<CheckResult> verify_matricant(const MaterialProfile& p,
                                          const QuadratureConfig& cfg = {});

// Delta -> K round trips, agreement of the three derivative methods at a
// midband point, quadratic origin expansion, second derivative vs finite
// differences.
std::vector<CheckResult> verify_lyapunov(const MaterialProfile& p,
                                         const QuadratureConfig& cfg = {});

// Band-edge residuals, positivity of m2 m3 inside passbands, clamped/free
// cell eigenvalues confined to gap closures, branch-slope consistency.
std::vector<CheckResult> verify_spectrum(const MaterialProfile& p,
                                         const QuadratureConfig& cfg = {});

// Isofrequency slope vs finite differences, even symmetry at k = 0, branch
// edges landing on cutoff curves.
std::vector<CheckResult> verify_isofreq(const MaterialProfile& p,
                                        const QuadratureConfig& cfg = {});

// The cosh envelope bound, the evanescent lower bound in its region, and the
// first-eigenvalue bracket.
std::vector<CheckResult> verify_bounds(const MaterialProfile& p,
                                       const QuadratureConfig& cfg = {});

// Green tensor adjoint identity, Hermitian scalar kernel, quasi-periodicity
// of the resolvent output.
std::vector<CheckResult> verify_green(const MaterialProfile& p,
                                      const QuadratureConfig& cfg = {});

// Every suite above, in order. Backs the `verify` CLI subcommand.
std::vector<CheckResult> verify_all(const MaterialProfile& p,
                                    const QuadratureConfig& cfg = {});

} // namespace floquet
