#pragma once

#include <utility>
#include <vector>

#include "floquet/lyapunov.hpp"
#include "floquet/matricant.hpp"
#include "floquet/profile.hpp"

namespace floquet {

// default confirmation tolerance for zero-width stopbands
inline constexpr double tol_zws = 1e-7;
// tangency window for double-root detection at |Delta| = 1
inline constexpr double tangency_tol = 1e-8;

// Cutoff frequency: root of Delta = (-1)^parity at the scan's fixed k.
struct EdgePoint {
    double omega = 0.0;
    int parity = 0;       // Delta = +1 (parity 0) or -1 (parity 1)
    bool tangent = false; // double root: zero-width-stopband candidate
};

struct GapInterval {
    double lo = 0.0, hi = 0.0;
    int parity = 0; // sign of Delta inside: parity 0 -> Delta > 1, 1 -> Delta < -1
};

struct ZwsReport {
    double omega = 0.0, k = 0.0;
    int sign = 1;              // Delta = +1 or -1 at the candidate
    double residual_M = 0.0;   // max |M(1,0) - sign*I|
    double residual_m2 = 0.0;  // sup_y |m2(y)|
    bool newton_converged = false;
    bool confirmed = false;    // both residuals <= tolerance
};

enum class ZwsMode {
    Free, // refine (omega, k) jointly on Im M2 = Im M3 = 0
    FixK  // refine omega only, at fixed k, on the gap-extremum condition
};

struct StopbandProfile {
    int band = 0; // 1-based stopband index in ascending omega (gap 1 may start at 0)
    double k = 0.0;
    double omega_lo = 0.0, omega_hi = 0.0;
    std::vector<std::pair<double, double>> samples; // (omega, Im K)
    double omega_ext = 0.0; // argmax of Im K
    double im_K_max = 0.0;
    double curvature = 0.0; // d2 Im K / d omega^2 at omega_ext
};

struct BranchDerivative {
    double omega = 0.0; // on-branch frequency the derivative refers to
    double value = 0.0; // d omega / dK (finite slope at a zero-width stopband)
    bool at_cutoff = false;
    double curvature = 0.0; // d2 omega / dK2, set at non-degenerate cutoffs
    bool zws = false;
    bool origin = false; // K = k = 0 on branch 1
};

struct BlochFunction {
    double omega = 0.0, K = 0.0, k = 0.0;
    int n = 1;
    std::vector<double> y;
    std::vector<cplx> u;       // first state component
    std::vector<cplx> mu1_du;  // mu1(y) u'(y)
    double qp_residual = 0.0;  // |eta(1) - e^{iK} eta(0)|
};

// All omega in (0, omega_max] with Delta(omega^2, k^2) = cos K, ascending.
// At K in {0, pi} tangential double roots appear twice in the list.
std::vector<double> floquet_branches(const MaterialProfile& p, double K, double k,
                                     double omega_max, const QuadratureConfig& cfg = {});

// omega on branch n (1-based) at (K, k); scans upward as far as needed.
double branch_omega(const MaterialProfile& p, double K, double k, int n,
                    const QuadratureConfig& cfg = {});

// Cutoffs: merged ascending roots of Delta = +1 and Delta = -1.
std::vector<EdgePoint> band_edges(const MaterialProfile& p, double k, double omega_max,
                                  const QuadratureConfig& cfg = {});

// Stopband intervals below omega_max (|Delta| > 1 inside). For k > 0 the first
// interval starts at omega = 0.
std::vector<GapInterval> stopband_intervals(const MaterialProfile& p, double k,
                                            double omega_max,
                                            const QuadratureConfig& cfg = {});

// Zeros in omega of M2(y0+1, y0) (clamped cell ends) and M3(y0+1, y0) (free
// cell ends). At k = 0 the Neumann list starts with omega = 0.
std::pair<std::vector<double>, std::vector<double>>
dirichlet_neumann(const MaterialProfile& p, double y0, double k, double omega_max,
                  const QuadratureConfig& cfg = {});

// Refine and test a zero-width-stopband candidate. Free mode runs a 2x2 Newton
// on (Im M2, Im M3)(omega, k) from the supplied point; FixK refines omega to
// the gap extremum at fixed k. refine = false evaluates residuals only.
ZwsReport detect_zws(const MaterialProfile& p, double omega, double k,
                     const QuadratureConfig& cfg = {}, ZwsMode mode = ZwsMode::Free,
                     bool refine = true, double tolerance = tol_zws);

// Im K(omega) across stopband `band` (1-based, ascending), with the interior
// extremum and its curvature.
StopbandProfile stopband_profile(const MaterialProfile& p, double k, int band,
                                 const QuadratureConfig& cfg = {});

// d omega_n / dK at (K, k): interior slope -sin K / (dDelta/domega); at K = 0
// or pi the slope is 0 and `curvature` carries (-1)^{m+1}/(dDelta/domega);
// at a zero-width stopband the finite slope uses the second derivative; at the
// spectrum origin the closed form 1/sqrt(<rho><1/mu1>).
BranchDerivative domega_dK(const MaterialProfile& p, double K, double k, int n,
                           const QuadratureConfig& cfg = {});

// d omega_n / dk at (K, k) = -(k/omega) (dDelta/dk2)/(dDelta/dw2);
// origin gives sqrt(<mu2>/<rho>), k = 0 with omega != 0 gives 0.
double domega_dk(const MaterialProfile& p, double K, double k, int n,
                 const QuadratureConfig& cfg = {});

// Bloch wave eta(y) = M(y,0) w on the grid, w the e^{iK} eigenvector of the
// monodromy at omega_n(K, k).
BlochFunction bloch_eigenfunction(const MaterialProfile& p, double K, double k, int n,
                                  const std::vector<double>& grid,
                                  const QuadratureConfig& cfg = {});

// omega_n^2 / k^2 along k_list (fixed K); decreases toward min(mu2/rho).
std::vector<double> high_k_limit(const MaterialProfile& p, double K, int n,
                                 const std::vector<double>& k_list,
                                 const QuadratureConfig& cfg = {});

} // namespace floquet
