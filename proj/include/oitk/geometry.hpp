#pragma once

#include "oitk/grid.hpp"

namespace oitk {

// W-images of two densities and the angle between them on the sphere of
// radius sqrt(vol(M)).
struct GeodesicPair {
    ScalarField f0;
    ScalarField f1;
    double theta = 0.0;
};

ScalarField w_map(const Density& mu);
Density w_unmap(const ScalarField& f);

GeodesicPair geodesic_pair(const Density& mu0, const Density& mu1);

double fisher_rao_distance(const Density& mu0, const Density& mu1);

// Point at time t on the Fisher-Rao geodesic from mu0 to mu1.
Density fisher_rao_geodesic(const GeodesicPair& pair, double t);
Density fisher_rao_geodesic(const Density& mu0, const Density& mu1, double t);

// Analytic d/dt log mu(t) along the geodesic.
ScalarField geodesic_log_derivative(const GeodesicPair& pair, double t);
ScalarField geodesic_log_derivative(const Density& mu0, const Density& mu1, double t);

// L2 distance of square roots (not probability normalized).
double hellinger_distance(const Density& mu0, const Density& mu1);

// Divergences between the probability densities p_i = I_i / vol(M).
struct Divergences {
    double tv = 0.0;
    double kl = 0.0;
    double chi2 = 0.0;
};

// Requires mu1 > 0 everywhere.
Divergences auxiliary_divergences(const Density& mu0, const Density& mu1);

// Total variation 0.5 * int |p0 - p1|; defined for closure densities too.
double total_variation(const Density& mu0, const Density& mu1);

// Distances rescaled to unit total mass: d / sqrt(vol(M)).
double fisher_rao_distance_prob(const Density& mu0, const Density& mu1);
double hellinger_distance_prob(const Density& mu0, const Density& mu1);

}  // namespace oitk
