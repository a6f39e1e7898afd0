#ifndef RSDESIGN_CCD_HPP
#define RSDESIGN_CCD_HPP

#include "rsdesign/model.hpp"

namespace rsdesign {

/// Runs in a CCD without center points: 2^q (or 2^(q-1)) factorial points
/// plus 2q axial points.
int ccd_core_runs(int q, bool half_fraction);

/// Central composite design inscribed in the sphere of radius rho.
/// Factorial points sit at +-rho/sqrt(q); the half fraction uses
/// x_q = x_1 x_2 ... x_(q-1). Axial points sit at +-rho on each axis, and
/// center points fill the design up to `runs`.
/// Throws std::invalid_argument when runs < ccd_core_runs(q, half_fraction).
Design central_composite(int q, int runs, double rho, bool half_fraction);

}  // namespace rsdesign

#endif  // RSDESIGN_CCD_HPP
