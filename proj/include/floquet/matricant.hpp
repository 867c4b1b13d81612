#pragma once

#include <vector>

#include "floquet/profile.hpp"
#include "floquet/types.hpp"

namespace floquet {

// Transfer-matrix scheme for smooth segments. Constant segments always use the
// exact slab exponential regardless of this choice.
enum class Scheme { Midpoint, Magnus4 };

struct QuadratureConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_subdivision = 20; // step-halving rounds per smooth chunk, >= 8
    Scheme scheme = Scheme::Magnus4;
    bool allow_partial = false; // flag instead of throwing on tolerance failure
};

// Propagator M(y, y0) of the first-order system eta' = Q eta, det M = 1.
struct Matricant2 {
    Mat2 M = Mat2::Identity();
    cplx omega2{0.0, 0.0};
    cplx k2{0.0, 0.0};
    double y0 = 0.0;
    double y = 0.0;
    bool tol_ok = true;
    double err_est = 0.0;

    cplx M1() const { return M(0, 0); }
    cplx M2() const { return M(0, 1); }
    cplx M3() const { return M(1, 0); }
    cplx M4() const { return M(1, 1); }
    cplx det() const { return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0); }
};

// Periodic monodromy entries at base point y: M(y+1, y) = [[m1, i m2],[i m3, m4]],
// all of m1..m4 real for real arguments. m1*m4 + m2*m3 = 1.
struct MonodromyRow {
    double y = 0.0;
    double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
};

// System matrix i*[[0, -1/mu1],[mu2 k^2 - rho w^2, 0]] at height y. Traceless.
Mat2 q_matrix(const MaterialProfile& p, double y, cplx omega2, cplx k2);

// M(y, y0), y0 <= y, coefficients extended periodically beyond [0,1).
Matricant2 propagate(const MaterialProfile& p, double y0, double y, cplx omega2,
                     cplx k2, const QuadratureConfig& cfg = {});

// M(y_i, 0) at each ascending grid point in [0,1]; one cumulative pass.
std::vector<Mat2> propagate_grid(const MaterialProfile& p, const std::vector<double>& grid,
                                 cplx omega2, cplx k2, const QuadratureConfig& cfg = {});

// M(y0+1, y0). via_similarity=true uses M(y0,0) M(1,0) M(y0,0)^-1 instead of a
// direct period pass; both paths agree to quadrature tolerance.
Matricant2 monodromy(const MaterialProfile& p, double y0, cplx omega2, cplx k2,
                     const QuadratureConfig& cfg = {}, bool via_similarity = false);

// Closed-form monodromy of a two-layer unit cell, layer a on [0, da) then layer b.
// Requires da + db = 1. At omega = 0 the closed form is singular and the result
// falls back to the exact slab product.
Matricant2 bilayer_monodromy(const MaterialPoint& a, double da, const MaterialPoint& b,
                             double db, double omega, double k);

// m1..m4 at each grid point from one period pass plus similarity transport.
std::vector<MonodromyRow> m_functions(const MaterialProfile& p, double omega2, double k2,
                                      const std::vector<double>& grid,
                                      const QuadratureConfig& cfg = {});

} // namespace floquet
