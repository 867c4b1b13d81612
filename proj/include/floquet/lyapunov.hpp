#pragma once

#include <optional>

#include "floquet/matricant.hpp"
#include "floquet/profile.hpp"
#include "floquet/types.hpp"

namespace floquet {

// classification band half-width around |Delta| = 1
inline constexpr double eps_cut = 1e-9;
// realness / structure tolerance for real arguments
inline constexpr double eps_sym = 1e-9;

enum class BandClass { Passband, CutoffPlus, CutoffMinus, Stopband };

struct LyapunovSample {
    cplx omega2{0.0, 0.0};
    cplx k2{0.0, 0.0};
    cplx delta{0.0, 0.0};
    BandClass classification = BandClass::Passband;
    cplx K{0.0, 0.0}; // Re K in [0,pi], Im K >= 0
    // true at omega = k = 0 exactly: Delta = 1 there but the point is the
    // dispersion origin, not a band edge of stopband pairing
    bool origin = false;
};

enum class DerivMethod { Integral, Eigen, FiniteDiff };

struct DerivativeBundle {
    double d_dw2 = 0.0; // d Delta / d(omega^2)
    double d_dk2 = 0.0; // d Delta / d(k^2)
    std::optional<double> d2_dw2w2, d2_dk2k2, d2_dw2k2;
    DerivMethod method = DerivMethod::Integral;
    // monodromy was +-identity: first derivatives vanish identically and are
    // returned as exact zeros
    bool zws_degenerate = false;
};

enum class SecondDeriv { W2W2, K2K2, W2K2 };

const char* band_class_name(BandClass c);

// Delta = tr M(1,0) / 2 with Floquet parameter and band classification.
LyapunovSample delta(const MaterialProfile& p, cplx omega2, cplx k2,
                     const QuadratureConfig& cfg = {});

// Map Delta to K with cos K = Delta: |Delta|<=1 -> arccos in [0,pi];
// Delta>1 -> i arccosh; Delta<-1 -> pi + i arccosh(-Delta).
cplx floquet_K(double delta_value);
cplx floquet_K(cplx delta_value); // complex Delta: acos branch with Im K >= 0

// Quadratic origin expansion 1 + <1/mu1>(<mu2> k^2 - <rho> w^2)/2.
double delta_small(const MaterialProfile& p, double omega2, double k2);

// First derivatives by the monodromy off-diagonal integrals
// dDelta/dw2 = (1/2) int rho m2, dDelta/dk2 = -(1/2) int mu2 m2;
// valid in passbands and stopbands alike.
DerivativeBundle d_delta_integral(const MaterialProfile& p, double omega2, double k2,
                                  const QuadratureConfig& cfg = {});

// First derivatives from the Bloch eigenvector w and eigenfunction u(y):
// passband      dDelta/dw2 = sin K / (w+ T w) * int rho |u|^2,
// cutoff        dDelta/dw2 = 1 / (2i wd+ T wg) * int rho |u|^2,
// with wd+ T wg reduced to conj(M2) or conj(M3) by the eigenvector choice.
// Requires |Delta| <= 1 + eps_cut; returns exact zeros with flag at M = +-I.
DerivativeBundle d_delta_eigen(const MaterialProfile& p, double omega2, double k2,
                               const QuadratureConfig& cfg = {});

// Central finite differences of delta (step on omega^2 / k^2).
DerivativeBundle d_delta_fd(const MaterialProfile& p, double omega2, double k2,
                            double step = 1e-6, const QuadratureConfig& cfg = {});

// Second derivatives by the iterated-kernel double integral
//   d2/dw2dw2 = - intint rho(s1) rho(s2) M2(s2+1,s1) M2(s1,s2),
//   d2/dk2dk2 = - intint mu2 mu2 (same kernel),
//   d2/dw2dk2 = +1/2 intint [rho(s1)mu2(s2)+mu2(s1)rho(s2)] (same kernel),
// over 0 <= s2 <= s1 <= 1, on an N-node tensor grid with Richardson step.
double d2_delta(const MaterialProfile& p, double omega2, double k2, SecondDeriv which,
                const QuadratureConfig& cfg = {}, int nodes = 256);

// Full second derivative in omega at fixed k:
// d2Delta/dw2 = 2 dDelta/d(w2) + 4 w^2 d2Delta/d(w2)^2.
double d2_delta_domega2(const MaterialProfile& p, double omega, double k,
                        const QuadratureConfig& cfg = {});

} // namespace floquet
