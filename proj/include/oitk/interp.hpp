#pragma once

#include "oitk/grid.hpp"

namespace oitk {

// Periodic Catmull-Rom bicubic interpolation at an arbitrary point.
double interpolate(const ScalarField& f, double x, double y);

// Same, with the result clamped to the range of the four surrounding nodes.
double interpolate_bounded(const ScalarField& f, double x, double y);

// g(x) = f(x + d(x)) at every grid node.
ScalarField sample_displaced(const ScalarField& f, const VectorField& d);
ScalarField sample_displaced_bounded(const ScalarField& f, const VectorField& d);
// g(x) = f(x + s*d(x)).
ScalarField sample_displaced(const ScalarField& f, const VectorField& d, double s);

}  // namespace oitk
