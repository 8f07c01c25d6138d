#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "oitk/geometry.hpp"
#include "oitk/spectral.hpp"
#include "oitk/warp.hpp"

namespace oitk {

// A smooth path of densities t -> mu(t) with access to mu'(t)/mu(t).
class DensityPath {
public:
    virtual ~DensityPath() = default;
    virtual const Grid& grid() const = 0;
    virtual Density density(double t) const = 0;
    virtual ScalarField log_derivative(double t) const = 0;
};

class GeodesicPath : public DensityPath {
public:
    GeodesicPath(const Density& mu0, const Density& mu1);
    const Grid& grid() const override { return pair_.f0.grid(); }
    Density density(double t) const override;
    ScalarField log_derivative(double t) const override;
    const GeodesicPair& pair() const { return pair_; }

private:
    GeodesicPair pair_;
};

// The path mu(t) = mu(0) for all t.
class ConstantPath : public DensityPath {
public:
    explicit ConstantPath(const Density& mu) : mu_(mu) {}
    const Grid& grid() const override { return mu_.grid(); }
    Density density(double) const override { return mu_; }
    ScalarField log_derivative(double) const override { return ScalarField(mu_.grid(), 0.0); }

private:
    Density mu_;
};

// Poisson solve and gradient of a background metric compatible with mu(0).
struct LiftOperators {
    std::function<PoissonResult(const ScalarField&)> poisson;
    std::function<VectorField(const ScalarField&)> gradient;
    // int (div_mu0 v)^2 mu0, the squared divergence-metric norm of v.
    std::function<double(const VectorField&)> velocity_energy;
};

LiftOperators flat_lift_operators();

struct LiftOptions {
    ExpStepOptions step;
    // Record distances from phi_k^* mu(0) to the path endpoint at each step.
    bool track_path = false;
};

// phi is the lift at the end time: phi^* mu(0) = mu(t_end). The matching
// solution in the transport direction is warp.inverse().
struct LiftResult {
    Warp warp;
    double residual = 0.0;
    int steps = 0;
    double end_time = 1.0;
    // Per step: divergence-metric norm of v_k (||div v_k||_{L2} when flat).
    std::vector<double> velocity_norm_trace;
    // Per step: mean of the Poisson right-hand side that was projected away.
    std::vector<double> mass_defect_trace;
    // Per step (if tracked): d_F(phi_k^* mu(0), mu(t_end)), k = 0..steps.
    std::vector<double> path_distance_trace;
    // sum_k eps_k ||div v_k||^2 / 4, comparable to d_F(mu(0), mu(t_end))^2.
    double path_energy = 0.0;
};

// Lifts path on [0, t_end] with step 1/N; the last step may be fractional.
LiftResult lift_path(const DensityPath& path, int N, double t_end = 1.0, const LiftOptions& opts = {},
                     const LiftOperators& ops = flat_lift_operators());

// ||  |D phi| (I0 o phi) - I1 || / ||I1||.
double matching_residual(const Warp& lift, const Density& mu0, const Density& mu1);

LiftResult solve_oit(const Density& mu1, int N, const LiftOptions& opts = {});

LiftResult solve_inexact_compatible(const Density& mu1, double sigma, int N, const LiftOptions& opts = {});

}  // namespace oitk
