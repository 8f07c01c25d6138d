#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "analytic.hpp"
#include "oitk/flow.hpp"
#include "oitk/geometry.hpp"
#include "oitk/spectral.hpp"

namespace testutil {

struct GradientCheck {
    std::vector<double> rel_errors;
    double max_rel_error = 0.0;
};

// Compares the momentum pairing <m, u> of the flow gradient with a central
// difference of the energy along eta_e = id + e u. The state carries
// transported densities nu = phi_* vol and P = phi_* mu0 on an identity warp;
// the perturbed energy is evaluated analytically through the invariance
// d(eta_* a, b) = d(a, eta^* b), so no interpolation enters the oracle.
inline GradientCheck check_flow_gradient(const oitk::Grid& g, std::uint64_t seed, int ndirs, double sigma,
                                         double h = 1e-5) {
    using namespace oitk;
    std::mt19937_64 rng(seed);
    ExpDensity nu(TrigPoly::random(rng, 2, 0.25), g), P(TrigPoly::random(rng, 2, 0.3), g),
        I1(TrigPoly::random(rng, 2, 0.3), g);
    FlowState s;
    s.warp = identity_warp(g);
    s.J = nu.sample(g);
    s.W0 = apply(P.sample(g) * apply(s.J, [](double a) { return 1.0 / a; }), [](double a) { return std::sqrt(a); });
    s.W1 = apply(I1.sample(g), [](double a) { return std::sqrt(a); });
    s.gradW1 = gradient(s.W1);
    FlowParams p;
    p.sigma = sigma;
    VelocityDiagnostics diag;
    gradient_velocity(s, p, &diag);
    const double vol = g.total_volume();
    GradientCheck out;
    for (int d = 0; d < ndirs; ++d) {
        TrigPoly ux = TrigPoly::random(rng, 2, 1.0), uy = TrigPoly::random(rng, 2, 1.0);
        VectorField u(ux.sample(g), uy.sample(g));
        double analytic = inner(diag.momentum, u);
        auto E = [&](double e) {
            double xv = 0.0, xm = 0.0;
            for (int i = 0; i < g.nx; ++i)
                for (int j = 0; j < g.ny; ++j) {
                    double x = g.x(i), y = g.y(j);
                    double det = (1 + e * ux.dx(x, y)) * (1 + e * uy.dy(x, y)) - e * e * ux.dy(x, y) * uy.dx(x, y);
                    xv += std::sqrt(nu(x, y) * det);
                    xm += std::sqrt(P(x, y) * det * I1(x + e * ux(x, y), y + e * uy(x, y)));
                }
            xv *= g.cell_area();
            xm *= g.cell_area();
            double tv = std::acos(std::min(1.0, xv / vol)), tm = std::acos(std::min(1.0, xm / vol));
            return sigma * vol * tv * tv + vol * tm * tm;
        };
        double fd = (E(h) - E(-h)) / (2 * h);
        double rel = std::abs(analytic - fd) / std::abs(fd);
        out.rel_errors.push_back(rel);
        out.max_rel_error = std::max(out.max_rel_error, rel);
    }
    return out;
}

}  // namespace testutil
