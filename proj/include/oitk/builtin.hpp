#pragma once

#include <string>
#include <vector>

#include "oitk/grid.hpp"

namespace oitk {

// 1 - 0.8 cos(x') cos(2y') with x', y' rescaled to a 2*pi period.
ScalarField cosine_intensity(const Grid& g);

// Anti-aliased letter strokes with values in [0, 1], blurred by a periodic
// Gaussian of width blur (in units of the shorter period).
ScalarField glyph_J(const Grid& g, double blur = 6.0 / 256.0);
ScalarField glyph_V(const Grid& g, double blur = 6.0 / 256.0);

// Periodic Gaussian smoothing with standard deviation s (domain units).
ScalarField gaussian_blur(const ScalarField& f, double s);

// Unnormalized intensity of "cosine", "uniform", "J" or "V".
ScalarField builtin_intensity(const std::string& name, const Grid& g);

// Builtin intensity plus floor, normalized. A positive floor is added before
// normalization and makes the density strict.
Density builtin_density(const std::string& name, const Grid& g, double floor);

std::vector<std::string> builtin_names();

}  // namespace oitk
