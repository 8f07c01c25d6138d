#include "oitk/lifting.hpp"

#include <cmath>

#include "oitk/error.hpp"
#include "oitk/spectral.hpp"

namespace oitk {

GeodesicPath::GeodesicPath(const Density& mu0, const Density& mu1) : pair_(geodesic_pair(mu0, mu1)) {}

Density GeodesicPath::density(double t) const { return fisher_rao_geodesic(pair_, t); }

ScalarField GeodesicPath::log_derivative(double t) const { return geodesic_log_derivative(pair_, t); }

LiftOperators flat_lift_operators() {
    return LiftOperators{[](const ScalarField& rhs) { return solve_poisson_diag(rhs); },
                         [](const ScalarField& f) { return gradient(f); },
                         [](const VectorField& v) {
                             ScalarField d = divergence(v);
                             return inner(d, d);
                         }};
}

double matching_residual(const Warp& lift, const Density& mu0, const Density& mu1) {
    ScalarField pulled = jacobian_det(lift, Direction::Forward) * pullback(lift, mu0.intensity, Direction::Forward);
    return l2_norm(pulled - mu1.intensity) / l2_norm(mu1.intensity);
}

LiftResult lift_path(const DensityPath& path, int N, double t_end, const LiftOptions& opts,
                     const LiftOperators& ops) {
    if (N < 1) throw InvalidArgument("lift_path: N must be at least 1");
    if (!(t_end >= 0.0 && t_end <= 1.0)) throw InvalidArgument("lift_path: end time outside [0,1]");
    const Grid& g = path.grid();
    Density mu0 = path.density(0.0);
    Density target = path.density(t_end);
    const double eps = 1.0 / N;
    int full = static_cast<int>(std::floor(t_end * N + 1e-12));
    double rest = t_end - full * eps;
    if (rest < 1e-14) rest = 0.0;

    LiftResult res;
    res.end_time = t_end;
    Warp w = identity_warp(g);
    auto record_distance = [&](const Warp& cur) {
        if (!opts.track_path) return;
        ScalarField jac = jacobian_det(cur, Direction::Forward);
        ScalarField I = jac * pullback(cur, mu0.intensity, Direction::Forward);
        double m = integrate(I);
        I *= g.total_volume() / m;
        res.path_distance_trace.push_back(fisher_rao_distance(Density{I, false}, target));
    };
    record_distance(w);

    int total = full + (rest > 0.0 ? 1 : 0);
    for (int k = 0; k < total; ++k) {
        double t = k * eps;
        double step = (k < full) ? eps : rest;
        ScalarField rhs = pullback(w, path.log_derivative(t), Direction::Inverse);
        PoissonResult pr = ops.poisson(rhs);
        VectorField v = ops.gradient(pr.solution);
        double dn = std::sqrt(ops.velocity_energy(v));
        res.velocity_norm_trace.push_back(dn);
        res.mass_defect_trace.push_back(pr.discarded_mean);
        res.path_energy += step * dn * dn / 4.0;
        Warp inc = exp_step(v, step, opts.step);
        w = compose(inc, w, false);
        record_distance(w);
    }
    w.inv_jac = jacobian_det(w, Direction::Inverse);
    res.steps = total;
    res.residual = matching_residual(w, mu0, target);
    res.warp = std::move(w);
    return res;
}

namespace {

void require_strict(const Density& mu, const char* what) {
    if (!(mu.intensity.min() > 0.0)) throw InvalidArgument(std::string(what) + ": target must be strictly positive");
}

}  // namespace

LiftResult solve_oit(const Density& mu1, int N, const LiftOptions& opts) {
    require_strict(mu1, "solve_oit");
    GeodesicPath path(uniform_density(mu1.grid()), mu1);
    return lift_path(path, N, 1.0, opts);
}

LiftResult solve_inexact_compatible(const Density& mu1, double sigma, int N, const LiftOptions& opts) {
    require_strict(mu1, "solve_inexact_compatible");
    if (!(sigma > 0.0)) throw InvalidArgument("solve_inexact_compatible: sigma must be positive");
    GeodesicPath path(uniform_density(mu1.grid()), mu1);
    return lift_path(path, N, 1.0 / (1.0 + sigma), opts);
}

}  // namespace oitk
