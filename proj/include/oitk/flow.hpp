#pragma once

#include <functional>
#include <string>
#include <vector>

#include "oitk/spectral.hpp"
#include "oitk/warp.hpp"

namespace oitk {

struct FlowParams {
    double sigma = 0.05;
    // Step size in unit-mass time; the applied step is eps / vol(M) unless
    // unit_mass_time is false.
    double eps = 0.2;
    int max_iter = 400;
    double rel_tol = 1e-6;
    double lambda = 1.0;
    bool infinite_volume = false;
    bool strang = false;
    bool unit_mass_time = true;
    // Transport J with the cubic interpolant clamped to the local node range.
    bool bounded_transport = true;
    double guard_factor = 1.0;

    double physical_step(const Grid& g) const { return unit_mass_time ? eps / g.total_volume() : eps; }
};

// phi_k and phi_k^{-1}, the tracked J_k = |D phi_k^{-1}|, and the cached data
// of the source and target.
struct FlowState {
    Warp warp;
    ScalarField J;
    ScalarField W0;
    ScalarField W1;
    VectorField gradW1;
    int k = 0;
    std::vector<double> energy_trace;
};

FlowState make_flow_state(const Density& mu0, const Density& mu1);

// theta / sin(theta) with theta = arccos(x / vol), for x in [0, vol].
double c_factor(double x, double total_volume);

struct EnergySplit {
    double total = 0.0;
    double volume_term = 0.0;
    double mismatch_term = 0.0;
};

// W(phi_* mu0) = (W0 o phi^{-1}) sqrt(J).
ScalarField transported_root(const FlowState& s);

EnergySplit energy(const FlowState& s, double sigma);
EnergySplit energy(const FlowState& s, const Density& mu0, const Density& mu1, double sigma);

struct VelocityDiagnostics {
    VectorField momentum;
    double a = 1.0;
    double b = 1.0;
    int clamped_cells = 0;
};

// v = -A^{-1} m for the G^I gradient of the energy.
VectorField gradient_velocity(const FlowState& s, const FlowParams& p, VelocityDiagnostics* diag = nullptr);
VectorField gradient_velocity(const FlowState& s, const Density& mu0, const Density& mu1, const FlowParams& p);

// One explicit step with the applied step size eps.
FlowState flow_step(const FlowState& s, const VectorField& v, double eps, const FlowParams& p);

struct FlowReport {
    int iterations = 0;
    double initial_energy = 0.0;
    EnergySplit final_energy;
    double min_J = 0.0;
    // sup |J - jacobian_det(phi^{-1})|.
    double jacobian_consistency = 0.0;
    double warp_consistency = 0.0;
    int clamped_cells = 0;
    int step_halvings = 0;
    double applied_step = 0.0;
    std::string stop_reason;
    // k = 1..iterations.
    std::vector<EnergySplit> energy_splits;
};

struct FlowResult {
    FlowState state;
    FlowReport report;
};

using FlowCallback = std::function<void(const FlowState&)>;

FlowResult run_flow(const Density& mu0, const Density& mu1, const FlowParams& p, const FlowCallback& cb = {});

struct TwoComponentRhs {
    ScalarField Jdot;
    ScalarField Pdot;
};

// Eulerian right-hand side of the descended flow for J = |D phi^{-1}| and the
// transported source intensity P.
TwoComponentRhs two_component_rhs(const ScalarField& J, const ScalarField& P, const Density& mu1,
                                  const FlowParams& p);

}  // namespace oitk
