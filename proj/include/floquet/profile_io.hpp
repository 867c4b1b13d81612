#pragma once

#include <iosfwd>
#include <string>

#include "floquet/profile.hpp"

namespace floquet {

// Parse a profile description in JSON form.
//
// {
//   "period": 2.0,                 // optional, default 1
//   "segments": [
//     { "from": 0.0, "to": 1.0,
//       "rho": {"kind": "constant",   "data": [1.0]},
//       "mu1": {"kind": "polynomial", "data": [0.5, 3.25]},
//       "mu2": {"kind": "sampled",    "data": [0.0, 1.0, 0.5, 2.0, 1.0, 1.0]} },
//     ...
//   ]
// }
//
// A segment may instead carry "monoclinic": {"c44":..., "c45":..., "c55":...,
// "rho":...} (coefficient specs), in which case the effective mu1/mu2 are
// derived from the stiffness entries. Mixing plain and monoclinic segments in
// one file is rejected. Errors name the offending field, e.g. "segments[1].mu2".
MaterialProfile parse_profile(const std::string& text);
MaterialProfile load_profile(const std::string& path);

// Serialize back to the same schema (unit period; period_scale recorded).
std::string profile_to_json(const MaterialProfile& p);

} // namespace floquet
