#pragma once

#include <utility>
#include <vector>

#include "floquet/lyapunov.hpp"
#include "floquet/profile.hpp"

namespace floquet {

// One real isofrequency branch K_j(k) at fixed omega, K in [0,pi], sampled
// along ascending k with extra points near vertical-tangent edges.
struct IsoBranch {
    int j = 1;
    double omega = 0.0;
    std::vector<std::pair<double, double>> points; // (k, K)
    struct Edge {
        double k = 0.0;
        int m = 0;            // K reaches pi*m here
        bool tangent = false; // double root in k: zero-width stopband crossing
    };
    std::vector<Edge> edges;
    // true for the single branch below the first k=0 zone-edge cutoff; the
    // curve closes onto its k < 0 mirror image
    bool closed = false;
};

// Local behavior of K(k) at fixed omega.
struct IsoSlope {
    enum class Kind {
        Interior,     // k != 0, K != pi*m: finite dK/dk
        VerticalEdge, // k != 0, K = pi*m, simple cutoff: dk/dK = 0
        ZwsEdge,      // k != 0, K = pi*m, double cutoff: finite dK/dk again
        AxisRegular,  // k = 0, K != pi*m: dK/dk = 0
        AxisCutoff,   // k = 0, K = pi*m, simple cutoff: finite one-sided slope
        AxisZws       // k = 0, K = pi*m, double cutoff: slope 0 again
    };
    Kind kind = Kind::Interior;
    double dK_dk = 0.0;   // Interior, ZwsEdge, AxisCutoff
    double d2k_dK2 = 0.0; // VerticalEdge: curvature of the inverse k(K)
    double d2K_dk2 = 0.0; // AxisRegular, AxisZws
    int m = 0;            // cutoff parity at an edge
    int j = 1;            // branch index (sets the sign at a ZwsEdge)
};

struct ConvexityCertificate {
    double omega = 0.0;
    double k10 = 0.0; // least k > 0 with Delta(omega^2, k^2) = 1
    double bracket_lo = 0.0, bracket_hi = 0.0; // a-priori bracket containing k10
    std::vector<double> k; // sample grid in (0, k10)
    std::vector<double> h; // Delta (dD/dk)^2 + (1 - Delta^2) d2D/dk2
    double min_h = 0.0;
    bool lemma_ok = false;   // dD/d(k2) > 0 and d2D/d(k2)^2 > 0 on the grid
    bool bracket_ok = false; // k10 inside [bracket_lo, bracket_hi]
    bool passed = false;     // min_h > 0, i.e. K1''(k) < 0 throughout
};

// All real branches K_j(k) for k in [0, k_max], numbered by increasing k.
// The branch count equals the number of k=0 band openings below omega.
std::vector<IsoBranch> iso_branches(const MaterialProfile& p, double omega, double k_max,
                                    const QuadratureConfig& cfg = {});

// Slope data of K(k) at (omega, k); requires |Delta| <= 1 + eps_cut there.
IsoSlope dK_dk(const MaterialProfile& p, double omega, double k,
               const QuadratureConfig& cfg = {});

// Convexity check of the closed first branch for omega below the first k=0
// zone-edge cutoff. h > 0 on (0, k10) certifies K1'' < 0.
ConvexityCertificate convexity_certificate(const MaterialProfile& p, double omega,
                                           const QuadratureConfig& cfg = {});

// Lyapunov function with every layer exponential replaced by its Taylor sum
// truncated after `terms` terms. Piecewise-constant profiles only.
double truncated_delta(const MaterialProfile& p, double omega, double k, int terms);

// First branch K_1(k) recomputed from truncated_delta. Reproduces truncation
// artifacts (spurious concavity) that the exact engine provably excludes.
IsoBranch truncated_series_isofreq(const MaterialProfile& p, double omega, int terms,
                                   const QuadratureConfig& cfg = {});

} // namespace floquet
