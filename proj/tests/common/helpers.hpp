#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oitk/grid.hpp"
#include "oitk/oracle1d.hpp"

namespace testutil {

inline oitk::Grid torus(int n) { return oitk::make_grid(n, n, 2.0 * M_PI, 2.0 * M_PI); }

// Random trigonometric polynomial with integer frequencies |m|, |l| <= kmax
// (scaled to the grid periods) and coefficients in [-amp, amp].
// cos or sin of 2 pi (m i / nx + l j / ny) with the phase reduced exactly in
// integer arithmetic, so samples carry only the rounding of one trig call.
inline double exact_phase_trig(const oitk::Grid& g, int m, int l, int i, int j, bool sine) {
    long long period = static_cast<long long>(g.nx) * g.ny;
    long long r = (static_cast<long long>(m) * i * g.ny + static_cast<long long>(l) * j * g.nx) % period;
    if (r < 0) r += period;
    double ph = 2.0 * M_PI * static_cast<double>(r) / static_cast<double>(period);
    return sine ? std::sin(ph) : std::cos(ph);
}

inline oitk::ScalarField trig_mode(const oitk::Grid& g, int m, int l, bool sine) {
    oitk::ScalarField f(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) f(i, j) = exact_phase_trig(g, m, l, i, j, sine);
    return f;
}

inline oitk::ScalarField random_trig(const oitk::Grid& g, std::mt19937_64& rng, int kmax, double amp) {
    std::uniform_real_distribution<double> u(-amp, amp);
    int w = 2 * kmax + 1;
    std::vector<double> cx((kmax + 1) * g.nx), sx((kmax + 1) * g.nx), cy(w * g.ny), sy(w * g.ny);
    for (int m = 0; m <= kmax; ++m)
        for (int i = 0; i < g.nx; ++i) {
            cx[m * g.nx + i] = exact_phase_trig(g, m, 0, i, 0, false);
            sx[m * g.nx + i] = exact_phase_trig(g, m, 0, i, 0, true);
        }
    for (int l = -kmax; l <= kmax; ++l)
        for (int j = 0; j < g.ny; ++j) {
            cy[(l + kmax) * g.ny + j] = exact_phase_trig(g, 0, l, 0, j, false);
            sy[(l + kmax) * g.ny + j] = exact_phase_trig(g, 0, l, 0, j, true);
        }
    oitk::ScalarField f(g);
    for (int m = 0; m <= kmax; ++m) {
        for (int l = -kmax; l <= kmax; ++l) {
            if (m == 0 && l <= 0) continue;
            double a = u(rng), b = u(rng);
            const double* px = &cx[m * g.nx];
            const double* qx = &sx[m * g.nx];
            const double* py = &cy[(l + kmax) * g.ny];
            const double* qy = &sy[(l + kmax) * g.ny];
            for (int i = 0; i < g.nx; ++i)
                for (int j = 0; j < g.ny; ++j) {
                    double c = px[i] * py[j] - qx[i] * qy[j];
                    double s = qx[i] * py[j] + px[i] * qy[j];
                    f(i, j) += a * c + b * s;
                }
        }
    }
    return f;
}

// Strictly positive density exp(trig polynomial), normalized.
inline oitk::Density random_density(const oitk::Grid& g, std::mt19937_64& rng, int kmax = 2, double amp = 0.3) {
    oitk::ScalarField f = random_trig(g, rng, kmax, amp);
    return oitk::normalize_density(oitk::apply(f, [](double a) { return std::exp(a); }), true);
}

inline double max_abs_diff(const oitk::ScalarField& a, const oitk::ScalarField& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

inline double max_abs_diff(const oitk::VectorField& a, const oitk::VectorField& b) {
    return std::max(max_abs_diff(a.x, b.x), max_abs_diff(a.y, b.y));
}

// Sup distance between a y-independent 2-D map x -> x + disp(x, 0) and the
// closest member C1^{-1}(C0(x) + s) of the oracle's one-parameter family of
// monotone transport maps.
inline double oracle_sup_error(const oitk::oracle1d::TransportMap1D& phi, const oitk::ScalarField& disp) {
    const oitk::Grid& g = disp.grid();
    auto sup_err = [&](double shift) {
        double worst = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            double ex = phi.c1().inverse(phi.c0().value(g.x(i)) + shift);
            worst = std::max(worst, std::abs(g.x(i) + disp(i, 0) - ex));
        }
        return worst;
    };
    double s0 = phi.c1().value(disp(0, 0)) - phi.c0().value(0.0);
    double lo = s0 - 0.1 * g.Lx, hi = s0 + 0.1 * g.Lx;
    for (int it = 0; it < 100; ++it) {
        double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (sup_err(m1) < sup_err(m2)) hi = m2;
        else lo = m1;
    }
    return sup_err(0.5 * (lo + hi));
}

inline std::vector<double> row0(const oitk::ScalarField& f) {
    std::vector<double> r(f.grid().nx);
    for (int i = 0; i < f.grid().nx; ++i) r[i] = f(i, 0);
    return r;
}

}  // namespace testutil
