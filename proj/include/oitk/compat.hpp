#pragma once

#include "oitk/lifting.hpp"

namespace oitk {

// Conformal metric h = I g on T^2; its volume form is I vol.
struct ConformalMetric {
    ScalarField I;

    const Grid& grid() const { return I.grid(); }
};

ConformalMetric make_conformal_metric(const Density& mu);

VectorField conformal_gradient(const ConformalMetric& m, const ScalarField& f);
ScalarField conformal_laplacian(const ConformalMetric& m, const ScalarField& f);
// General-dimension form (1/I^{n/2}) div(I^{n/2 - 1} grad f) evaluated at n.
ScalarField conformal_laplacian_general(const ConformalMetric& m, const ScalarField& f, int n);

// Solves Delta_h f = rhs - (I-weighted mean of rhs); the projected mean is
// reported as the discarded value.
PoissonResult conformal_poisson_solve(const ConformalMetric& m, const ScalarField& rhs);

LiftOperators conformal_lift_operators(const ConformalMetric& m);

// Lift of a path starting at a strictly positive mu(0) with respect to the
// conformal metric built from mu(0).
LiftResult lift_path_conformal(const DensityPath& path, int N, double t_end = 1.0, const LiftOptions& opts = {});

// chi with chi_* vol = mu; the flat compatible metric is h = chi_* g, whose
// volume form is mu.
Warp build_flat_metric(const Density& mu, int N, const LiftOptions& opts = {});

// Laplacian of chi_* g applied to F: (Delta (F o chi)) o chi^{-1}.
ScalarField flat_metric_laplacian(const Warp& chi, const ScalarField& F);

// Lift of a path starting at mu(0) with respect to chi_* g, where chi is the
// flat-metric warp of mu(0): chi o Lambda o chi^{-1} with Lambda the flat lift
// of the pulled-back path chi^* mu(t), which starts at vol.
LiftResult lift_path_flat_metric(const DensityPath& path, const Warp& chi, int N, double t_end = 1.0,
                                 const LiftOptions& opts = {});

enum class MetricKind { Conformal, Flat };

// Warp R with R_* mu0 = mu1, built from the two half geodesics at the
// Fisher-Rao midpoint.
Warp symmetric_match(const Density& mu0, const Density& mu1, int N, MetricKind kind = MetricKind::Conformal,
                     const LiftOptions& opts = {});

}  // namespace oitk
