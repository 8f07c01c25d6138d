#pragma once

#include <utility>
#include <vector>

#include "oitk/grid.hpp"

namespace oitk {

enum class Direction { Forward, Inverse };

// Discrete diffeomorphism phi(x) = x + fwd(x) with phi^{-1}(x) = x + inv(x).
// inv_jac tracks |D phi^{-1}|.
struct Warp {
    VectorField fwd;
    VectorField inv;
    ScalarField inv_jac;

    const Grid& grid() const { return fwd.grid(); }

    // Swaps the roles of phi and phi^{-1}; inv_jac is recomputed.
    Warp inverse() const;
};

Warp identity_warp(const Grid& g);

// Constant displacement by (a, b); the inverse shifts by (-a, -b).
Warp translation_warp(const Grid& g, double a, double b);

// f(phi(x)) for Forward, f(phi^{-1}(x)) for Inverse.
ScalarField pullback(const Warp& w, const ScalarField& f, Direction dir);

struct ExpStepOptions {
    // Guard: eps * |v|_inf must stay below guard_factor * min(dx, dy).
    double guard_factor = 1.0;
    bool midpoint = false;
};

// Increment psi = id + eps v and psi^{-1} = id - eps v, or the two-substep
// midpoint variant. Throws SolverError when the guard fails.
Warp exp_step(const VectorField& v, double eps, const ExpStepOptions& opts = {});

// outer o inner. The inverse is inner^{-1} o outer^{-1}.
Warp compose(const Warp& outer, const Warp& inner, bool recompute_jacobian = true);

// Spectral det(I + D disp).
ScalarField jacobian_det(const Warp& w, Direction dir);
ScalarField jacobian_det(const VectorField& disp);

struct PushforwardResult {
    Density density;
    double renormalization = 1.0;
};

// phi_* mu with intensity inv_jac * (I o phi^{-1}), renormalized to vol(M).
PushforwardResult pushforward_density(const Warp& w, const Density& mu);

// phi^* mu with intensity |D phi| * (I o phi), renormalized to vol(M).
PushforwardResult pullback_density(const Warp& w, const Density& mu);

struct Point {
    double x;
    double y;
};

// phi(p) wrapped into the fundamental domain.
std::vector<Point> transform_points(const Warp& w, const std::vector<Point>& pts);

double wrap_coordinate(double v, double L);

// sup |phi(phi^{-1}(x)) - x| over grid nodes.
double consistency_error(const Warp& w);

// Largest displacement difference between two warps in the given direction.
double sup_displacement_difference(const Warp& a, const Warp& b, Direction dir);

}  // namespace oitk
