#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <Eigen/Dense>

namespace floquet {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

// Input / precondition problems. CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Convergence / conditioning problems. CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// argument outside the domain an operation is defined on
struct OutOfDomain : ConfigError { using ConfigError::ConfigError; };
// monoclinic stiffness with c44*c55 - c45^2 <= 0
struct DegenerateStiffness : ConfigError { using ConfigError::ConfigError; };
// derivative formulas requested where |Delta| > 1 + eps_cut
struct NotInPassband : ConfigError { using ConfigError::ConfigError; };
// closed-form layer formulas need piecewise-constant coefficients
struct NotPiecewiseConstant : ConfigError { using ConfigError::ConfigError; };
// short-wave asymptotics need omega^2 > k^2 max(mu2/rho)
struct NotSupersonic : ConfigError { using ConfigError::ConfigError; };
// short-wave asymptotics support at most one impedance discontinuity
struct MultipleJumps : ConfigError { using ConfigError::ConfigError; };
// lower-bound certificate requested outside its validity region
struct PreconditionOutOfRegion : ConfigError { using ConfigError::ConfigError; };
// isofrequency analysis restricted to omega below the first k=0 stopband
struct OmegaTooHigh : ConfigError { using ConfigError::ConfigError; };
// Green function requested at a spectral point (Delta = cos K)
struct OnSpectrum : ConfigError { using ConfigError::ConfigError; };

// step-halving exhausted without meeting the tolerance
struct ToleranceNotReached : NumericalError { using NumericalError::NumericalError; };
// closed-form bilayer propagator singular at omega = 0
struct OmegaZero : NumericalError { using NumericalError::NumericalError; };
// monodromy is +-identity: first derivatives vanish identically
struct ZwsDegenerate : NumericalError { using NumericalError::NumericalError; };
// branch-marching step control could not certify capture of all roots
struct ScanIncomplete : NumericalError { using NumericalError::NumericalError; };
// Newton refinement failed to converge
struct NewtonDiverged : NumericalError { using NumericalError::NumericalError; };

// exp(A) for traceless 2x2 A: exp(A) = cos(theta) I + sinc(theta) A where
// theta^2 = det A. Exact (no series truncation) away from theta ~ 0; the
// small-theta branch evaluates cos and sinc by series to avoid cancellation.
// Preserves det = 1 to roundoff.
inline Mat2 exp_traceless(const Mat2& A) {
    const cplx t2 = A.determinant(); // theta^2
    cplx c, s;
    if (std::abs(t2) < 1e-12) {
        // cos(theta) = 1 - t2/2 + t2^2/24 - ..., sinc(theta) = 1 - t2/6 + t2^2/120 - ...
        c = 1.0 - t2 / 2.0 + t2 * t2 / 24.0;
        s = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    } else {
        const cplx theta = std::sqrt(t2);
        c = std::cos(theta);
        s = std::sin(theta) / theta;
    }
    Mat2 E = s * A;
    E(0, 0) += c;
    E(1, 1) += c;
    return E;
}

inline double max_abs(const Mat2& A) {
    return A.cwiseAbs().maxCoeff();
}

} // namespace floquet
