#include "floquet/greenfn.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace floquet {

namespace {

// inverse of a det-1 propagator
Mat2 adjugate(const Mat2& A) {
    Mat2 B;
    B << A(1, 1), -A(0, 1), -A(1, 0), A(0, 0);
    return B;
}

// [M(1,0) - e^{iK} I]^{-1}. Frobenius condition estimate guards the spectral
// set Delta(omega^2, k^2) = cos K where the shift is singular.
Mat2 shifted_inverse(const Mat2& period, double K) {
    const cplx q = std::polar(1.0, K);
    Mat2 A = period;
    A(0, 0) -= q;
    A(1, 1) -= q;
    const cplx det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    const double nrm2 = A.squaredNorm();
    // written so NaN / det = 0 both fail the test
    if (!(nrm2 < resolvent_cond_max * std::abs(det)))
        throw OnSpectrum("resolvent at K = " + std::to_string(K) +
                         " is singular to working precision (point lies on the spectrum)");
    Mat2 inv;
    inv << A(1, 1), -A(0, 1), -A(1, 0), A(0, 0);
    return inv / det;
}

} // namespace

Mat2 green_tensor(const MaterialProfile& p, double y, double s, double K, cplx omega2,
                  cplx k2, const QuadratureConfig& cfg) {
    if (!(y >= 0.0 && y <= 1.0 && s >= 0.0 && s <= 1.0))
        throw OutOfDomain("green_tensor arguments must lie in the unit cell [0, 1]");
    const Mat2 period = propagate(p, 0.0, 1.0, omega2, k2, cfg).M;
    const Mat2 R = shifted_inverse(period, K);
    const Mat2 My = propagate(p, 0.0, y, omega2, k2, cfg).M;
    const Mat2 Bs = adjugate(propagate(p, 0.0, s, omega2, k2, cfg).M); // M(0, s)
    Mat2 G = -My * R * (period * Bs);
    if (y >= s) // H(0) = 1: the jump at y = s belongs to the upper triangle
        G += My * Bs;
    return G;
}

std::vector<cplx> resolvent_apply(const MaterialProfile& p, double K, ResolventMode mode,
                                  cplx omega2, cplx k2, const std::vector<cplx>& g,
                                  const QuadratureConfig& cfg) {
    const std::size_t n = g.size();
    if (n < 2)
        throw OutOfDomain("resolvent_apply needs at least two forcing samples");
    std::vector<double> grid(n);
    const double h = 1.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        grid[i] = static_cast<double>(i) * h;
    grid.back() = 1.0;

    const std::vector<Mat2> A = propagate_grid(p, grid, omega2, k2, cfg); // M(y_i, 0)
    const Mat2& period = A.back();
    const Mat2 C = shifted_inverse(period, K) * period;

    // forcing enters the state system as (0, -i rho g) for the omega^2 family
    // and (0, +i mu2 g) for the k^2 family
    const cplx unit = (mode == ResolventMode::OmegaSquared) ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
    std::vector<Vec2> prefix(n); // trapezoid partial sums of M(0, y_j) gamma(y_j)
    Vec2 run = Vec2::Zero();
    for (std::size_t j = 0; j < n; ++j) {
        // at() wraps y = 1 to the start of the cell; the closing trapezoid
        // node needs the left limit when the coefficients jump there
        const double yj = (j + 1 == n) ? std::nextafter(1.0, 0.0) : grid[j];
        const MaterialPoint mp = p.at(yj);
        const double weight = (j == 0 || j == n - 1) ? 0.5 * h : h;
        const cplx g2 = unit * (mode == ResolventMode::OmegaSquared ? mp.rho : mp.mu2) * g[j];
        const Mat2 Bj = adjugate(A[j]);
        run += weight * Vec2(Bj(0, 1) * g2, Bj(1, 1) * g2);
        prefix[j] = run;
    }
    const Vec2 total = run;

    // u(y_i) = first state component of  A_i [ prefix_i - C total ]
    std::vector<cplx> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 v = prefix[i] - C * total;
        u[i] = A[i].row(0) * v;
    }
    return u;
}

} // namespace floquet
