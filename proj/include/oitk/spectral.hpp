#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "oitk/grid.hpp"

namespace oitk {

// Fourier diagonalization of flat-torus operators for one grid. Plans are
// shared per resolution and all methods are safe to call concurrently.
class SpectralPlan {
public:
    explicit SpectralPlan(const Grid& g);
    ~SpectralPlan();
    SpectralPlan(const SpectralPlan&) = delete;
    SpectralPlan& operator=(const SpectralPlan&) = delete;

    const Grid& grid() const { return grid_; }
    int nyc() const { return grid_.ny / 2 + 1; }

    // Angular wavenumbers 2*pi*m/L for the full x axis and the half y axis.
    const std::vector<double>& kx() const { return kx_; }
    const std::vector<double>& ky() const { return ky_; }
    // Same, with the Nyquist entry zeroed (used by odd derivatives).
    const std::vector<double>& kx_odd() const { return kx_odd_; }
    const std::vector<double>& ky_odd() const { return ky_odd_; }

    std::vector<std::complex<double>> forward(const ScalarField& f) const;
    // Unnormalized inverse followed by division by nx*ny.
    ScalarField inverse(std::vector<std::complex<double>> spec) const;

private:
    Grid grid_;
    std::vector<double> kx_, ky_, kx_odd_, ky_odd_;
    void* fwd_plan_ = nullptr;
    void* inv_plan_ = nullptr;
};

// Cached plan for a grid; lives for the process lifetime.
const SpectralPlan& spectral_plan(const Grid& g);

struct InertiaConfig {
    double lambda = 1.0;
};

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& v);

struct PoissonResult {
    ScalarField solution;
    double discarded_mean = 0.0;
};

// Solves laplacian(f) = rhs - mean(rhs) with mean(f) = 0.
PoissonResult solve_poisson_diag(const ScalarField& rhs);
ScalarField solve_poisson(const ScalarField& rhs);

// Projection onto constant vector fields (the harmonic fields of flat T^2).
VectorField harmonic_mean_part(const VectorField& v);

// A u = -Delta u + lambda * harmonic(u) with Delta the componentwise flat
// Laplacian. A is symmetric positive definite.
VectorField inertia_apply(const VectorField& u, const InertiaConfig& cfg);
VectorField inertia_inverse(const VectorField& m, const InertiaConfig& cfg);

// Pointwise Euclidean product u.v as a field.
ScalarField dot(const VectorField& u, const VectorField& v);

}  // namespace oitk
