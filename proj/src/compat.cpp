#include "oitk/compat.hpp"

#include <cmath>

#include "oitk/error.hpp"
#include "oitk/spectral.hpp"

namespace oitk {

namespace {

void require_positive(const ScalarField& I, const char* what) {
    if (!(I.min() > 0.0)) throw InvalidArgument(std::string(what) + ": density must be strictly positive");
}

ScalarField reciprocal(const ScalarField& f) {
    return apply(f, [](double a) { return 1.0 / a; });
}

}  // namespace

ConformalMetric make_conformal_metric(const Density& mu) {
    require_positive(mu.intensity, "make_conformal_metric");
    return ConformalMetric{mu.intensity};
}

VectorField conformal_gradient(const ConformalMetric& m, const ScalarField& f) {
    VectorField g = gradient(f);
    ScalarField r = reciprocal(m.I);
    return VectorField(g.x * r, g.y * r);
}

ScalarField conformal_laplacian(const ConformalMetric& m, const ScalarField& f) {
    return laplacian(f) * reciprocal(m.I);
}

ScalarField conformal_laplacian_general(const ConformalMetric& m, const ScalarField& f, int n) {
    double a = 0.5 * n;
    ScalarField inner_w = apply(m.I, [a](double v) { return std::pow(v, a - 1.0); });
    ScalarField outer_w = apply(m.I, [a](double v) { return std::pow(v, -a); });
    VectorField g = gradient(f);
    return divergence(VectorField(g.x * inner_w, g.y * inner_w)) * outer_w;
}

PoissonResult conformal_poisson_solve(const ConformalMetric& m, const ScalarField& rhs) {
    require_same_grid(m.grid(), rhs.grid(), "conformal_poisson_solve");
    double vol = rhs.grid().total_volume();
    double wmean = inner(rhs, m.I) / vol;
    ScalarField projected = rhs;
    projected += -wmean;
    PoissonResult pr = solve_poisson_diag(projected * m.I);
    pr.discarded_mean = wmean;
    return pr;
}

LiftOperators conformal_lift_operators(const ConformalMetric& m) {
    return LiftOperators{[m](const ScalarField& rhs) { return conformal_poisson_solve(m, rhs); },
                         [m](const ScalarField& f) { return conformal_gradient(m, f); },
                         [m](const VectorField& v) {
                             // div_mu v = div(I v) / I; energy int (div_mu v)^2 I.
                             ScalarField d = divergence(VectorField(v.x * m.I, v.y * m.I));
                             return inner(d * d, reciprocal(m.I));
                         }};
}

LiftResult lift_path_conformal(const DensityPath& path, int N, double t_end, const LiftOptions& opts) {
    Density mu0 = path.density(0.0);
    return lift_path(path, N, t_end, opts, conformal_lift_operators(make_conformal_metric(mu0)));
}

Warp build_flat_metric(const Density& mu, int N, const LiftOptions& opts) {
    require_positive(mu.intensity, "build_flat_metric");
    return solve_oit(mu, N, opts).warp.inverse();
}

ScalarField flat_metric_laplacian(const Warp& chi, const ScalarField& F) {
    ScalarField flat = pullback(chi, F, Direction::Forward);
    return pullback(chi, laplacian(flat), Direction::Inverse);
}

namespace {

// chi^* mu(t) with log-derivative (mu'/mu) o chi.
class PulledPath : public DensityPath {
public:
    PulledPath(const DensityPath& base, const Warp& chi) : base_(base), chi_(chi) {}
    const Grid& grid() const override { return base_.grid(); }
    Density density(double t) const override { return pullback_density(chi_, base_.density(t)).density; }
    ScalarField log_derivative(double t) const override {
        return pullback(chi_, base_.log_derivative(t), Direction::Forward);
    }

private:
    const DensityPath& base_;
    const Warp& chi_;
};

}  // namespace

LiftResult lift_path_flat_metric(const DensityPath& path, const Warp& chi, int N, double t_end,
                                 const LiftOptions& opts) {
    PulledPath pulled(path, chi);
    LiftResult inner_lift = lift_path(pulled, N, t_end, opts);
    Warp conj = compose(chi, compose(inner_lift.warp, chi.inverse(), false), false);
    conj.inv_jac = jacobian_det(conj, Direction::Inverse);
    LiftResult res = std::move(inner_lift);
    res.warp = std::move(conj);
    res.residual = matching_residual(res.warp, path.density(0.0), path.density(t_end));
    res.path_distance_trace.clear();
    return res;
}

Warp symmetric_match(const Density& mu0, const Density& mu1, int N, MetricKind kind, const LiftOptions& opts) {
    require_same_grid(mu0.grid(), mu1.grid(), "symmetric_match");
    require_positive(mu0.intensity, "symmetric_match");
    require_positive(mu1.intensity, "symmetric_match");
    GeodesicPair pair = geodesic_pair(mu0, mu1);
    if (pair.theta < 1e-12) return identity_warp(mu0.grid());
    Density mid = fisher_rao_geodesic(pair, 0.5);
    GeodesicPath to1(mid, mu1), to0(mid, mu0);
    Warp phi, psi;
    if (kind == MetricKind::Conformal) {
        phi = lift_path_conformal(to1, N, 1.0, opts).warp;
        psi = lift_path_conformal(to0, N, 1.0, opts).warp;
    } else {
        Warp chi = build_flat_metric(mid, N, opts);
        phi = lift_path_flat_metric(to1, chi, N, 1.0, opts).warp;
        psi = lift_path_flat_metric(to0, chi, N, 1.0, opts).warp;
    }
    return compose(phi.inverse(), psi);
}

}  // namespace oitk
