#pragma once

#include "chromainv/column.hpp"

#include <span>
#include <vector>

namespace chromainv {

/// Knot derivatives for a shape-preserving piecewise cubic Hermite
/// interpolant.
///
/// Derivatives start from the local cubic (four-point Lagrange) estimate,
/// so cubic data is reproduced exactly. On intervals where the data is
/// locally monotone the Fritsch-Carlson test is applied and offending
/// derivatives are pulled back into the monotone region, which rules out
/// overshoot on monotone stretches such as flat baselines and peak flanks.
std::vector<double> hermite_slopes(std::span<const double> x, std::span<const double> y);

/// Evaluates the interpolant at xq. Points outside [x.front(), x.back()]
/// evaluate to 0. Throws ValidationError unless x is strictly increasing
/// and x, y have equal length >= 2.
std::vector<double> hermite_interpolate(std::span<const double> x, std::span<const double> y,
                                        std::span<const double> xq);

/// Resamples a chromatogram onto target_grid.
Chromatogram regrid(const Chromatogram& series, std::span<const double> target_grid);

} // namespace chromainv
