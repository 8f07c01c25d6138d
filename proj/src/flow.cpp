#include "oitk/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oitk/error.hpp"
#include "oitk/geometry.hpp"
#include "oitk/interp.hpp"

namespace oitk {

namespace {

constexpr double kSqrtFloor = 1e-12;
constexpr double kEnergySlack = 1e-10;

ScalarField clamped_sqrt(const ScalarField& J, int* clamped) {
    int n = 0;
    ScalarField out(J.grid());
    for (std::size_t k = 0; k < J.size(); ++k) {
        double v = J[k];
        if (v < kSqrtFloor) {
            v = kSqrtFloor;
            ++n;
        }
        out[k] = std::sqrt(v);
    }
    if (clamped) *clamped = n;
    return out;
}

double sq_angle_distance(double x, double vol) {
    double th = std::acos(std::clamp(x / vol, -1.0, 1.0));
    return vol * th * th;
}

}  // namespace

FlowState make_flow_state(const Density& mu0, const Density& mu1) {
    require_same_grid(mu0.grid(), mu1.grid(), "make_flow_state");
    const Grid& g = mu0.grid();
    FlowState s;
    s.warp = identity_warp(g);
    s.J = ScalarField(g, 1.0);
    s.W0 = w_map(mu0);
    s.W1 = w_map(mu1);
    s.gradW1 = gradient(s.W1);
    return s;
}

double c_factor(double x, double total_volume) {
    if (x < -1e-12 || x > total_volume * (1.0 + 1e-12) + 1e-12)
        throw InvalidArgument("c_factor: argument outside [0, vol]");
    if (total_volume - x <= 1e-8) return 1.0;
    double r = std::clamp(x / total_volume, 0.0, 1.0);
    return std::acos(r) / std::sqrt((1.0 - r) * (1.0 + r));
}

ScalarField transported_root(const FlowState& s) {
    return pullback(s.warp, s.W0, Direction::Inverse) * clamped_sqrt(s.J, nullptr);
}

EnergySplit energy(const FlowState& s, double sigma) {
    const Grid& g = s.J.grid();
    double vol = g.total_volume();
    ScalarField sJ = clamped_sqrt(s.J, nullptr);
    ScalarField f = pullback(s.warp, s.W0, Direction::Inverse) * sJ;
    EnergySplit e;
    e.volume_term = sq_angle_distance(integrate(sJ), vol);
    e.mismatch_term = sq_angle_distance(inner(f, s.W1), vol);
    e.total = sigma * e.volume_term + e.mismatch_term;
    return e;
}

EnergySplit energy(const FlowState& s, const Density& mu0, const Density& mu1, double sigma) {
    require_same_grid(mu0.grid(), s.J.grid(), "energy");
    require_same_grid(mu1.grid(), s.J.grid(), "energy");
    return energy(s, sigma);
}

namespace {

VectorField velocity_from(const ScalarField& sJ, const ScalarField& f, const ScalarField& W1, const VectorField& gW1,
                          const FlowParams& p, VelocityDiagnostics* diag) {
    const Grid& g = sJ.grid();
    double vol = g.total_volume();
    double a = 1.0, b = 1.0;
    if (!p.infinite_volume) {
        a = c_factor(std::min(integrate(sJ), vol), vol);
        b = c_factor(std::clamp(inner(f, W1), 0.0, vol), vol);
    }
    VectorField gs = gradient(sJ);
    VectorField gf = gradient(f);
    VectorField m(g);
    for (std::size_t k = 0; k < m.size(); ++k) {
        m.x[k] = p.sigma * a * gs.x[k] + b * (W1[k] * gf.x[k] - f[k] * gW1.x[k]);
        m.y[k] = p.sigma * a * gs.y[k] + b * (W1[k] * gf.y[k] - f[k] * gW1.y[k]);
    }
    VectorField v = -1.0 * inertia_inverse(m, InertiaConfig{p.lambda});
    if (diag) {
        diag->momentum = std::move(m);
        diag->a = a;
        diag->b = b;
    }
    return v;
}

void check_params(const FlowParams& p) {
    if (!(p.sigma > 0.0)) throw InvalidArgument("flow: sigma must be positive");
    if (!(p.eps > 0.0)) throw InvalidArgument("flow: eps must be positive");
    if (p.max_iter < 1) throw InvalidArgument("flow: max_iter must be at least 1");
    if (!(p.rel_tol >= 0.0)) throw InvalidArgument("flow: rel_tol must be nonnegative");
    if (!(p.lambda > 0.0)) throw InvalidArgument("flow: lambda must be positive");
}

}  // namespace

VectorField gradient_velocity(const FlowState& s, const FlowParams& p, VelocityDiagnostics* diag) {
    check_params(p);
    if (!(s.J.min() > 0.0)) throw SolverError("gradient_velocity: J is not positive");
    int clamped = 0;
    ScalarField sJ = clamped_sqrt(s.J, &clamped);
    ScalarField f = pullback(s.warp, s.W0, Direction::Inverse) * sJ;
    VectorField v = velocity_from(sJ, f, s.W1, s.gradW1, p, diag);
    if (diag) diag->clamped_cells = clamped;
    return v;
}

VectorField gradient_velocity(const FlowState& s, const Density& mu0, const Density& mu1, const FlowParams& p) {
    require_same_grid(mu0.grid(), s.J.grid(), "gradient_velocity");
    require_same_grid(mu1.grid(), s.J.grid(), "gradient_velocity");
    return gradient_velocity(s, p);
}

FlowState flow_step(const FlowState& s, const VectorField& v, double eps, const FlowParams& p) {
    ExpStepOptions opts;
    opts.guard_factor = p.guard_factor;
    Warp inc = exp_step(v, eps, opts);
    FlowState out = s;
    out.warp = compose(inc, s.warp, false);
    ScalarField dv = divergence(v);
    const VectorField& back = inc.inv;
    auto transport = [&](const ScalarField& f) {
        return p.bounded_transport ? sample_displaced_bounded(f, back) : sample_displaced(f, back);
    };
    if (p.strang) {
        ScalarField half = apply(dv, [eps](double d) { return std::exp(-0.5 * eps * d); });
        out.J = transport(s.J * half) * half;
    } else {
        out.J = transport(s.J) * apply(dv, [eps](double d) { return std::exp(-eps * d); });
    }
    out.warp.inv_jac = out.J;
    out.k = s.k + 1;
    return out;
}

FlowResult run_flow(const Density& mu0, const Density& mu1, const FlowParams& p, const FlowCallback& cb) {
    check_params(p);
    require_same_grid(mu0.grid(), mu1.grid(), "run_flow");
    const Grid& g = mu0.grid();
    FlowState s = make_flow_state(mu0, mu1);
    FlowReport rep;
    EnergySplit e0 = energy(s, p.sigma);
    s.energy_trace.push_back(e0.total);
    rep.initial_energy = e0.total;
    double step = p.physical_step(g);
    bool halved = false;
    rep.stop_reason = "max_iter";
    if (cb) cb(s);
    for (int it = 0; it < p.max_iter; ++it) {
        VelocityDiagnostics diag;
        VectorField v = gradient_velocity(s, p, &diag);
        rep.clamped_cells = std::max(rep.clamped_cells, diag.clamped_cells);
        double prev = s.energy_trace.back();
        FlowState next;
        EnergySplit e;
        for (;;) {
            bool ok = true;
            std::string why;
            try {
                next = flow_step(s, v, step, p);
                if (!(next.J.min() > 0.0)) {
                    ok = false;
                    why = "J folded (min J <= 0)";
                } else {
                    e = energy(next, p.sigma);
                    if (!(e.total <= prev + kEnergySlack)) {
                        ok = false;
                        std::ostringstream os;
                        os << "energy increased from " << prev << " to " << e.total;
                        why = os.str();
                    }
                }
            } catch (const SolverError& err) {
                ok = false;
                why = err.what();
            }
            if (ok) break;
            if (halved) {
                std::ostringstream os;
                os << "run_flow: iteration " << it + 1 << ": " << why;
                throw SolverError(os.str());
            }
            halved = true;
            step *= 0.5;
            ++rep.step_halvings;
        }
        s = std::move(next);
        s.energy_trace.push_back(e.total);
        rep.energy_splits.push_back(e);
        if (cb) cb(s);
        if (std::abs(e.total - prev) <= p.rel_tol * rep.initial_energy) {
            rep.stop_reason = "rel_tol";
            break;
        }
    }
    rep.iterations = s.k;
    rep.final_energy = energy(s, p.sigma);
    rep.min_J = s.J.min();
    rep.jacobian_consistency = sup_norm(s.J - jacobian_det(s.warp, Direction::Inverse));
    rep.warp_consistency = consistency_error(s.warp);
    rep.applied_step = step;
    return FlowResult{std::move(s), std::move(rep)};
}

TwoComponentRhs two_component_rhs(const ScalarField& J, const ScalarField& P, const Density& mu1,
                                  const FlowParams& p) {
    check_params(p);
    require_same_grid(J.grid(), P.grid(), "two_component_rhs");
    require_same_grid(J.grid(), mu1.grid(), "two_component_rhs");
    if (!(J.min() > 0.0) || P.min() < 0.0) throw InvalidArgument("two_component_rhs: degenerate fields");
    ScalarField sJ = clamped_sqrt(J, nullptr);
    ScalarField f = apply(P, [](double a) { return std::sqrt(a); });
    ScalarField W1 = w_map(mu1);
    VectorField v = velocity_from(sJ, f, W1, gradient(W1), p, nullptr);
    TwoComponentRhs r;
    r.Jdot = -1.0 * divergence(VectorField(J * v.x, J * v.y));
    r.Pdot = -1.0 * divergence(VectorField(P * v.x, P * v.y));
    return r;
}

}  // namespace oitk
