#include "oitk/interp.hpp"

#include <algorithm>
#include <cmath>

namespace oitk {

namespace {

inline int wrap(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

inline void cr_weights(double t, double w[4]) {
    double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
    w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
    w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
}

struct Stencil {
    int ix[4];
    int iy[4];
    double wx[4];
    double wy[4];
};

// (u, v) in index units.
inline Stencil stencil_index(const Grid& g, double u, double v) {
    Stencil s;
    double fu = std::floor(u), fv = std::floor(v);
    int i0 = static_cast<int>(fu), j0 = static_cast<int>(fv);
    cr_weights(u - fu, s.wx);
    cr_weights(v - fv, s.wy);
    for (int a = 0; a < 4; ++a) {
        s.ix[a] = wrap(i0 - 1 + a, g.nx);
        s.iy[a] = wrap(j0 - 1 + a, g.ny);
    }
    return s;
}

inline Stencil stencil(const Grid& g, double x, double y) { return stencil_index(g, x / g.dx(), y / g.dy()); }

// Weighted sum of differences from the nearest-lower node, so that constant
// data is reproduced exactly.
inline double eval(const ScalarField& f, const Stencil& s) {
    const double* d = f.data();
    int ny = f.grid().ny;
    double base = d[static_cast<std::size_t>(s.ix[1]) * ny + s.iy[1]];
    double acc = 0.0;
    for (int a = 0; a < 4; ++a) {
        const double* row = d + static_cast<std::size_t>(s.ix[a]) * ny;
        double r = s.wy[0] * (row[s.iy[0]] - base) + s.wy[1] * (row[s.iy[1]] - base) +
                   s.wy[2] * (row[s.iy[2]] - base) + s.wy[3] * (row[s.iy[3]] - base);
        acc += s.wx[a] * r;
    }
    return base + acc;
}

inline double eval_bounded(const ScalarField& f, const Stencil& s) {
    double v = eval(f, s);
    double c00 = f(s.ix[1], s.iy[1]), c10 = f(s.ix[2], s.iy[1]);
    double c01 = f(s.ix[1], s.iy[2]), c11 = f(s.ix[2], s.iy[2]);
    double lo = std::min(std::min(c00, c10), std::min(c01, c11));
    double hi = std::max(std::max(c00, c10), std::max(c01, c11));
    return std::clamp(v, lo, hi);
}

template <bool Bounded>
ScalarField sample_impl(const ScalarField& f, const VectorField& d, double scale) {
    const Grid& g = f.grid();
    require_same_grid(g, d.grid(), "sample_displaced");
    ScalarField out(g);
    const double sx = scale / g.dx(), sy = scale / g.dy();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            std::size_t k = g.index(i, j);
            Stencil s = stencil_index(g, i + sx * d.x[k], j + sy * d.y[k]);
            out[k] = Bounded ? eval_bounded(f, s) : eval(f, s);
        }
    }
    return out;
}

}  // namespace

double interpolate(const ScalarField& f, double x, double y) { return eval(f, stencil(f.grid(), x, y)); }

double interpolate_bounded(const ScalarField& f, double x, double y) {
    return eval_bounded(f, stencil(f.grid(), x, y));
}

ScalarField sample_displaced(const ScalarField& f, const VectorField& d) { return sample_impl<false>(f, d, 1.0); }

ScalarField sample_displaced_bounded(const ScalarField& f, const VectorField& d) {
    return sample_impl<true>(f, d, 1.0);
}

ScalarField sample_displaced(const ScalarField& f, const VectorField& d, double s) {
    return sample_impl<false>(f, d, s);
}

}  // namespace oitk
