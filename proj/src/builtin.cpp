#include "oitk/builtin.hpp"

#include <algorithm>
#include <cmath>

#include "oitk/error.hpp"
#include "oitk/spectral.hpp"

namespace oitk {

namespace {

struct Segment {
    double ax, ay, bx, by;
};

double segment_distance(double px, double py, const Segment& s) {
    double vx = s.bx - s.ax, vy = s.by - s.ay;
    double t = std::clamp(((px - s.ax) * vx + (py - s.ay) * vy) / (vx * vx + vy * vy), 0.0, 1.0);
    return std::hypot(px - s.ax - t * vx, py - s.ay - t * vy);
}

// Strokes live in the unit square with y pointing up.
ScalarField render(const Grid& g, const std::vector<Segment>& segs, double blur) {
    const double half_width = 0.06;
    double aa = 1.5 / std::min(g.nx, g.ny);
    ScalarField img(g);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            double u = static_cast<double>(i) / g.nx, w = static_cast<double>(j) / g.ny;
            double d = 1e9;
            for (const Segment& s : segs) d = std::min(d, segment_distance(u, w, s));
            img(i, j) = std::clamp((half_width - d) / aa + 0.5, 0.0, 1.0);
        }
    }
    if (blur > 0.0) img = gaussian_blur(img, blur * std::min(g.Lx, g.Ly));
    return apply(img, [](double a) { return std::max(a, 0.0); });
}

}  // namespace

ScalarField cosine_intensity(const Grid& g) {
    double sx = 2.0 * M_PI / g.Lx, sy = 2.0 * M_PI / g.Ly;
    return ScalarField::from_function(
        g, [=](double x, double y) { return 1.0 - 0.8 * std::cos(sx * x) * std::cos(2.0 * sy * y); });
}

ScalarField gaussian_blur(const ScalarField& f, double s) {
    const SpectralPlan& p = spectral_plan(f.grid());
    auto F = p.forward(f);
    int nc = p.nyc();
    for (int i = 0; i < f.grid().nx; ++i) {
        for (int j = 0; j < nc; ++j) {
            double k2 = p.kx()[i] * p.kx()[i] + p.ky()[j] * p.ky()[j];
            F[static_cast<std::size_t>(i) * nc + j] *= std::exp(-0.5 * s * s * k2);
        }
    }
    return p.inverse(std::move(F));
}

ScalarField glyph_J(const Grid& g, double blur) {
    std::vector<Segment> segs;
    segs.push_back({0.62, 0.8, 0.62, 0.38});
    segs.push_back({0.45, 0.8, 0.75, 0.8});
    const double cx = 0.47, cy = 0.38, r = 0.15;
    const int pieces = 40;
    for (int k = 0; k < pieces; ++k) {
        double a0 = M_PI * k / pieces, a1 = M_PI * (k + 1) / pieces;
        segs.push_back({cx + r * std::cos(a0), cy - r * std::sin(a0), cx + r * std::cos(a1), cy - r * std::sin(a1)});
    }
    return render(g, segs, blur);
}

ScalarField glyph_V(const Grid& g, double blur) {
    std::vector<Segment> segs{{0.3, 0.8, 0.5, 0.2}, {0.5, 0.2, 0.7, 0.8}};
    return render(g, segs, blur);
}

ScalarField builtin_intensity(const std::string& name, const Grid& g) {
    if (name == "cosine") return cosine_intensity(g);
    if (name == "uniform") return ScalarField(g, 1.0);
    if (name == "J") return glyph_J(g);
    if (name == "V") return glyph_V(g);
    throw InputError("unknown builtin density: " + name);
}

Density builtin_density(const std::string& name, const Grid& g, double floor) {
    if (floor < 0.0) throw InvalidArgument("builtin_density: negative floor");
    ScalarField raw = builtin_intensity(name, g);
    raw += floor;
    bool strict = raw.min() > 0.0;
    return normalize_density(raw, strict);
}

std::vector<std::string> builtin_names() { return {"cosine", "uniform", "J", "V"}; }

}  // namespace oitk
