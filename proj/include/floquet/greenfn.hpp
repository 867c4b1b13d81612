#pragma once

#include <vector>

#include "floquet/matricant.hpp"
#include "floquet/profile.hpp"

namespace floquet {

// condition-number ceiling for [M(1,0) - e^{iK} I]; beyond it the requested
// point is treated as on the spectrum
inline constexpr double resolvent_cond_max = 1e12;

// Which spectral family the resolvent refers to. The omega^2 family forces
// the state equation with (0, -i rho g); the k^2 family with (0, +i mu2 g).
enum class ResolventMode { OmegaSquared, KSquared };

// Quasi-periodic Green tensor of the first-order system at Floquet
// parameter K:
//   G(y,s) = M(y,s) H(y-s) - M(y,0) [M(1,0) - e^{iK} I]^{-1} M(1,s),
// H the Heaviside step with H(0) = 1. Requires e^{iK} off the monodromy
// spectrum, i.e. Delta != cos K.
Mat2 green_tensor(const MaterialProfile& p, double y, double s, double K, cplx omega2,
                  cplx k2, const QuadratureConfig& cfg = {});

// u(y) = [resolvent g](y) on the uniform grid carrying g (trapezoid weights in
// the kernel quadrature). g must hold at least two samples; g[i] sits at
// y = i/(n-1).
std::vector<cplx> resolvent_apply(const MaterialProfile& p, double K, ResolventMode mode,
                                  cplx omega2, cplx k2, const std::vector<cplx>& g,
                                  const QuadratureConfig& cfg = {});

} // namespace floquet
