#include "oitk/warp.hpp"

#include <cmath>
#include <sstream>

#include "oitk/error.hpp"
#include "oitk/interp.hpp"
#include "oitk/spectral.hpp"

namespace oitk {

Warp Warp::inverse() const {
    Warp w{inv, fwd, ScalarField()};
    w.inv_jac = jacobian_det(w, Direction::Inverse);
    return w;
}

Warp identity_warp(const Grid& g) { return Warp{VectorField(g), VectorField(g), ScalarField(g, 1.0)}; }

Warp translation_warp(const Grid& g, double a, double b) {
    return Warp{VectorField(g, a, b), VectorField(g, -a, -b), ScalarField(g, 1.0)};
}

ScalarField pullback(const Warp& w, const ScalarField& f, Direction dir) {
    require_same_grid(w.grid(), f.grid(), "pullback");
    return sample_displaced(f, dir == Direction::Forward ? w.fwd : w.inv);
}

Warp exp_step(const VectorField& v, double eps, const ExpStepOptions& opts) {
    const Grid& g = v.grid();
    double reach = eps * sup_norm(v);
    double limit = opts.guard_factor * g.min_spacing();
    if (!(reach < limit)) {
        std::ostringstream os;
        os << "step guard: eps*|v|_inf = " << reach << " exceeds " << limit;
        throw SolverError(os.str());
    }
    if (!opts.midpoint) {
        return Warp{eps * v, -eps * v, ScalarField(g, 1.0)};
    }
    // psi(x) = x + eps v(x + eps/2 v(x)), psi^{-1}(x) = x - eps v(x - eps/2 v(x)).
    VectorField half = (0.5 * eps) * v;
    VectorField fwd(eps * sample_displaced(v.x, half), eps * sample_displaced(v.y, half));
    VectorField back = -0.5 * eps * v;
    VectorField inv(-eps * sample_displaced(v.x, back), -eps * sample_displaced(v.y, back));
    return Warp{std::move(fwd), std::move(inv), ScalarField(g, 1.0)};
}

Warp compose(const Warp& outer, const Warp& inner, bool recompute_jacobian) {
    require_same_grid(outer.grid(), inner.grid(), "compose");
    VectorField fwd = inner.fwd;
    fwd.x += sample_displaced(outer.fwd.x, inner.fwd);
    fwd.y += sample_displaced(outer.fwd.y, inner.fwd);
    VectorField inv = outer.inv;
    inv.x += sample_displaced(inner.inv.x, outer.inv);
    inv.y += sample_displaced(inner.inv.y, outer.inv);
    Warp w{std::move(fwd), std::move(inv), ScalarField()};
    w.inv_jac = recompute_jacobian ? jacobian_det(w, Direction::Inverse) : ScalarField(w.grid(), 1.0);
    return w;
}

ScalarField jacobian_det(const VectorField& disp) {
    VectorField gx = gradient(disp.x);
    VectorField gy = gradient(disp.y);
    ScalarField out(disp.grid());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = (1.0 + gx.x[k]) * (1.0 + gy.y[k]) - gx.y[k] * gy.x[k];
    return out;
}

ScalarField jacobian_det(const Warp& w, Direction dir) {
    return jacobian_det(dir == Direction::Forward ? w.fwd : w.inv);
}

PushforwardResult pushforward_density(const Warp& w, const Density& mu) {
    require_same_grid(w.grid(), mu.grid(), "pushforward_density");
    ScalarField I = w.inv_jac * pullback(w, mu.intensity, Direction::Inverse);
    double vol = mu.grid().total_volume();
    double factor = vol / integrate(I);
    I *= factor;
    return PushforwardResult{Density{std::move(I), mu.strict}, factor};
}

PushforwardResult pullback_density(const Warp& w, const Density& mu) {
    require_same_grid(w.grid(), mu.grid(), "pullback_density");
    ScalarField I = jacobian_det(w, Direction::Forward) * pullback(w, mu.intensity, Direction::Forward);
    double vol = mu.grid().total_volume();
    double factor = vol / integrate(I);
    I *= factor;
    return PushforwardResult{Density{std::move(I), mu.strict}, factor};
}

double wrap_coordinate(double v, double L) {
    double r = std::fmod(v, L);
    if (r < 0.0) r += L;
    if (r >= L) r -= L;
    return r;
}

std::vector<Point> transform_points(const Warp& w, const std::vector<Point>& pts) {
    const Grid& g = w.grid();
    std::vector<Point> out(pts.size());
    long n = static_cast<long>(pts.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) {
        const Point& p = pts[k];
        double dx = interpolate(w.fwd.x, p.x, p.y);
        double dy = interpolate(w.fwd.y, p.x, p.y);
        out[k] = Point{wrap_coordinate(p.x + dx, g.Lx), wrap_coordinate(p.y + dy, g.Ly)};
    }
    return out;
}

double consistency_error(const Warp& w) {
    // phi(phi^{-1}(x)) - x = inv(x) + fwd(x + inv(x)).
    ScalarField ex = w.inv.x + sample_displaced(w.fwd.x, w.inv);
    ScalarField ey = w.inv.y + sample_displaced(w.fwd.y, w.inv);
    return sup_norm(VectorField(std::move(ex), std::move(ey)));
}

double sup_displacement_difference(const Warp& a, const Warp& b, Direction dir) {
    const VectorField& da = dir == Direction::Forward ? a.fwd : a.inv;
    const VectorField& db = dir == Direction::Forward ? b.fwd : b.inv;
    return sup_norm(da - db);
}

}  // namespace oitk
