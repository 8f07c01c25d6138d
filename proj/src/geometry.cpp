#include "oitk/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oitk/error.hpp"

namespace oitk {

namespace {

constexpr double kThetaZero = 1e-12;
constexpr double kAntipodalMargin = 1e-8;

double clamp_unit(double a) { return std::clamp(a, -1.0, 1.0); }

void check_antipodal(double theta) {
    if (theta >= M_PI - kAntipodalMargin) throw InvalidArgument("antipodal densities: no unique geodesic");
}

// Angle between two W-images. Near zero the chord length is used, which is
// exact for identical inputs and well conditioned for small angles.
double sphere_angle(const ScalarField& f0, const ScalarField& f1) {
    const Grid& g = f0.grid();
    double vol = g.total_volume();
    double c = inner(f0, f1) / vol;
    if (c < 0.5) return std::acos(clamp_unit(c));
    double d2 = 0.0;
    for (std::size_t k = 0; k < f0.size(); ++k) {
        double e = f0[k] - f1[k];
        d2 += e * e;
    }
    d2 *= g.cell_area();
    return 2.0 * std::asin(std::min(1.0, 0.5 * std::sqrt(d2 / vol)));
}

}  // namespace

ScalarField w_map(const Density& mu) {
    return apply(mu.intensity, [](double a) {
        if (a < 0.0) throw InvalidArgument("w_map: negative intensity");
        return std::sqrt(a);
    });
}

Density w_unmap(const ScalarField& f) {
    if (f.min() < 0.0) throw InvalidArgument("w_unmap: negative values");
    double vol = f.grid().total_volume();
    double n2 = inner(f, f);
    if (std::abs(n2 - vol) > 1e-6 * vol) throw InvalidArgument("w_unmap: squared norm differs from total volume");
    return normalize_density(f * f, f.min() > 0.0);
}

GeodesicPair geodesic_pair(const Density& mu0, const Density& mu1) {
    require_same_grid(mu0.grid(), mu1.grid(), "geodesic_pair");
    GeodesicPair p{w_map(mu0), w_map(mu1), 0.0};
    p.theta = sphere_angle(p.f0, p.f1);
    return p;
}

double fisher_rao_distance(const Density& mu0, const Density& mu1) {
    require_same_grid(mu0.grid(), mu1.grid(), "fisher_rao_distance");
    return std::sqrt(mu0.grid().total_volume()) * sphere_angle(w_map(mu0), w_map(mu1));
}

Density fisher_rao_geodesic(const GeodesicPair& pair, double t) {
    if (t < 0.0 || t > 1.0) throw InvalidArgument("fisher_rao_geodesic: t outside [0,1]");
    double th = pair.theta;
    check_antipodal(th);
    const Grid& g = pair.f0.grid();
    if (th < kThetaZero) return Density{pair.f0 * pair.f0, pair.f0.min() > 0.0};
    if (t == 0.0) return Density{pair.f0 * pair.f0, pair.f0.min() > 0.0};
    if (t == 1.0) return Density{pair.f1 * pair.f1, pair.f1.min() > 0.0};
    double a = std::sin((1.0 - t) * th) / std::sin(th);
    double b = std::sin(t * th) / std::sin(th);
    ScalarField I(g);
    for (std::size_t k = 0; k < I.size(); ++k) {
        double w = a * pair.f0[k] + b * pair.f1[k];
        I[k] = w * w;
    }
    bool strict = I.min() > 0.0;
    return normalize_density(I, strict);
}

Density fisher_rao_geodesic(const Density& mu0, const Density& mu1, double t) {
    return fisher_rao_geodesic(geodesic_pair(mu0, mu1), t);
}

ScalarField geodesic_log_derivative(const GeodesicPair& pair, double t) {
    double th = pair.theta;
    check_antipodal(th);
    const Grid& g = pair.f0.grid();
    if (th < kThetaZero) return ScalarField(g, 0.0);
    double s0 = std::sin((1.0 - t) * th), s1 = std::sin(t * th);
    double c0 = std::cos((1.0 - t) * th), c1 = std::cos(t * th);
    ScalarField h(g);
    for (std::size_t k = 0; k < h.size(); ++k) {
        double den = s0 * pair.f0[k] + s1 * pair.f1[k];
        if (!(std::abs(den) >= 1e-12)) throw InvalidArgument("geodesic_log_derivative: vanishing denominator");
        h[k] = 2.0 * th * (c1 * pair.f1[k] - c0 * pair.f0[k]) / den;
    }
    return h;
}

ScalarField geodesic_log_derivative(const Density& mu0, const Density& mu1, double t) {
    return geodesic_log_derivative(geodesic_pair(mu0, mu1), t);
}

double hellinger_distance(const Density& mu0, const Density& mu1) {
    require_same_grid(mu0.grid(), mu1.grid(), "hellinger_distance");
    double s = 0.0;
    for (std::size_t k = 0; k < mu0.intensity.size(); ++k) {
        double d = std::sqrt(mu0.intensity[k]) - std::sqrt(mu1.intensity[k]);
        s += d * d;
    }
    return std::sqrt(s * mu0.grid().cell_area());
}

double total_variation(const Density& mu0, const Density& mu1) {
    require_same_grid(mu0.grid(), mu1.grid(), "total_variation");
    double vol = mu0.grid().total_volume();
    double s = 0.0;
    for (std::size_t k = 0; k < mu0.intensity.size(); ++k) s += std::abs(mu0.intensity[k] - mu1.intensity[k]);
    return 0.5 * s * mu0.grid().cell_area() / vol;
}

Divergences auxiliary_divergences(const Density& mu0, const Density& mu1) {
    require_same_grid(mu0.grid(), mu1.grid(), "auxiliary_divergences");
    if (!(mu1.intensity.min() > 0.0))
        throw InvalidArgument("auxiliary_divergences: KL and chi2 need a strictly positive second density");
    const Grid& g = mu0.grid();
    double vol = g.total_volume();
    Divergences d;
    d.tv = total_variation(mu0, mu1);
    for (std::size_t k = 0; k < mu0.intensity.size(); ++k) {
        double p = mu0.intensity[k] / vol, q = mu1.intensity[k] / vol;
        if (p > 0.0) d.kl += p * std::log(p / q);
        d.chi2 += (p - q) * (p - q) / q;
    }
    d.kl *= g.cell_area();
    d.chi2 *= g.cell_area();
    return d;
}

double fisher_rao_distance_prob(const Density& mu0, const Density& mu1) {
    return fisher_rao_distance(mu0, mu1) / std::sqrt(mu0.grid().total_volume());
}

double hellinger_distance_prob(const Density& mu0, const Density& mu1) {
    return hellinger_distance(mu0, mu1) / std::sqrt(mu0.grid().total_volume());
}

}  // namespace oitk
