#include "oitk/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "oitk/error.hpp"

namespace oitk {

namespace {

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

struct FftwBuffer {
    explicit FftwBuffer(std::size_t bytes) : p(fftw_malloc(bytes)) {
        if (!p) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(p); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    void* p;
};

double wavenumber(int idx, int n, double L) {
    int m = idx <= n / 2 ? idx : idx - n;
    return 2.0 * M_PI * m / L;
}

using Spec = std::vector<std::complex<double>>;

}  // namespace

SpectralPlan::SpectralPlan(const Grid& g) : grid_(g) {
    kx_.resize(g.nx);
    kx_odd_.resize(g.nx);
    for (int i = 0; i < g.nx; ++i) {
        kx_[i] = wavenumber(i, g.nx, g.Lx);
        kx_odd_[i] = (i == g.nx / 2) ? 0.0 : kx_[i];
    }
    int nc = nyc();
    ky_.resize(nc);
    ky_odd_.resize(nc);
    for (int j = 0; j < nc; ++j) {
        ky_[j] = wavenumber(j, g.ny, g.Ly);
        ky_odd_[j] = (j == g.ny / 2) ? 0.0 : ky_[j];
    }
    std::lock_guard<std::mutex> lock(fftw_mutex());
    FftwBuffer real(sizeof(double) * g.size());
    FftwBuffer cplx(sizeof(fftw_complex) * static_cast<std::size_t>(g.nx) * nc);
    fwd_plan_ = fftw_plan_dft_r2c_2d(g.nx, g.ny, static_cast<double*>(real.p),
                                     static_cast<fftw_complex*>(cplx.p), FFTW_ESTIMATE);
    inv_plan_ = fftw_plan_dft_c2r_2d(g.nx, g.ny, static_cast<fftw_complex*>(cplx.p),
                                     static_cast<double*>(real.p), FFTW_ESTIMATE);
    if (!fwd_plan_ || !inv_plan_) throw Error("FFTW plan creation failed");
}

SpectralPlan::~SpectralPlan() {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    if (fwd_plan_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_plan_));
    if (inv_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inv_plan_));
}

Spec SpectralPlan::forward(const ScalarField& f) const {
    require_same_grid(f.grid(), grid_, "SpectralPlan::forward");
    std::size_t nspec = static_cast<std::size_t>(grid_.nx) * nyc();
    FftwBuffer real(sizeof(double) * grid_.size());
    FftwBuffer cplx(sizeof(fftw_complex) * nspec);
    std::copy(f.data(), f.data() + f.size(), static_cast<double*>(real.p));
    fftw_execute_dft_r2c(static_cast<fftw_plan>(fwd_plan_), static_cast<double*>(real.p),
                         static_cast<fftw_complex*>(cplx.p));
    const auto* c = static_cast<const std::complex<double>*>(cplx.p);
    return Spec(c, c + nspec);
}

ScalarField SpectralPlan::inverse(Spec spec) const {
    std::size_t nspec = static_cast<std::size_t>(grid_.nx) * nyc();
    if (spec.size() != nspec) throw InvalidArgument("SpectralPlan::inverse: wrong spectrum size");
    FftwBuffer real(sizeof(double) * grid_.size());
    FftwBuffer cplx(sizeof(fftw_complex) * nspec);
    std::copy(spec.begin(), spec.end(), static_cast<std::complex<double>*>(cplx.p));
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inv_plan_), static_cast<fftw_complex*>(cplx.p),
                         static_cast<double*>(real.p));
    ScalarField out(grid_);
    const double* r = static_cast<const double*>(real.p);
    double scale = 1.0 / static_cast<double>(grid_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = r[k] * scale;
    return out;
}

const SpectralPlan& spectral_plan(const Grid& g) {
    static std::mutex cache_mutex;
    static std::map<std::tuple<int, int, double, double>, std::unique_ptr<SpectralPlan>> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto key = std::make_tuple(g.nx, g.ny, g.Lx, g.Ly);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<SpectralPlan>(g)).first;
    return *it->second;
}

namespace {

const std::complex<double> I_UNIT(0.0, 1.0);

template <class F>
void for_modes(const SpectralPlan& p, F&& f) {
    int nx = p.grid().nx, nc = p.nyc();
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nc; ++j) f(static_cast<std::size_t>(i) * nc + j, i, j);
}

}  // namespace

VectorField gradient(const ScalarField& f) {
    const SpectralPlan& p = spectral_plan(f.grid());
    Spec F = p.forward(f);
    Spec Gx(F.size()), Gy(F.size());
    for_modes(p, [&](std::size_t k, int i, int j) {
        Gx[k] = I_UNIT * p.kx_odd()[i] * F[k];
        Gy[k] = I_UNIT * p.ky_odd()[j] * F[k];
    });
    return VectorField(p.inverse(std::move(Gx)), p.inverse(std::move(Gy)));
}

ScalarField divergence(const VectorField& v) {
    const SpectralPlan& p = spectral_plan(v.grid());
    Spec Fx = p.forward(v.x);
    Spec Fy = p.forward(v.y);
    Spec D(Fx.size());
    for_modes(p, [&](std::size_t k, int i, int j) {
        D[k] = I_UNIT * (p.kx_odd()[i] * Fx[k] + p.ky_odd()[j] * Fy[k]);
    });
    return p.inverse(std::move(D));
}

ScalarField laplacian(const ScalarField& f) {
    const SpectralPlan& p = spectral_plan(f.grid());
    Spec F = p.forward(f);
    for_modes(p, [&](std::size_t k, int i, int j) {
        double kx = p.kx()[i], ky = p.ky()[j];
        F[k] *= -(kx * kx + ky * ky);
    });
    return p.inverse(std::move(F));
}

VectorField laplacian(const VectorField& v) { return VectorField(laplacian(v.x), laplacian(v.y)); }

PoissonResult solve_poisson_diag(const ScalarField& rhs) {
    const SpectralPlan& p = spectral_plan(rhs.grid());
    Spec F = p.forward(rhs);
    double discarded = F[0].real() / static_cast<double>(rhs.size());
    for_modes(p, [&](std::size_t k, int i, int j) {
        if (k == 0) {
            F[k] = 0.0;
            return;
        }
        double kx = p.kx()[i], ky = p.ky()[j];
        F[k] /= -(kx * kx + ky * ky);
    });
    return PoissonResult{p.inverse(std::move(F)), discarded};
}

ScalarField solve_poisson(const ScalarField& rhs) { return solve_poisson_diag(rhs).solution; }

VectorField harmonic_mean_part(const VectorField& v) {
    return VectorField(v.grid(), mean(v.x), mean(v.y));
}

namespace {

void check_lambda(const InertiaConfig& cfg) {
    if (!(cfg.lambda > 0.0)) throw InvalidArgument("inertia lambda must be positive");
}

}  // namespace

VectorField inertia_apply(const VectorField& u, const InertiaConfig& cfg) {
    check_lambda(cfg);
    VectorField h = harmonic_mean_part(u);
    VectorField out(-1.0 * laplacian(u.x), -1.0 * laplacian(u.y));
    out += cfg.lambda * h;
    return out;
}

VectorField inertia_inverse(const VectorField& m, const InertiaConfig& cfg) {
    check_lambda(cfg);
    VectorField h = harmonic_mean_part(m);
    VectorField out(-1.0 * solve_poisson(m.x), -1.0 * solve_poisson(m.y));
    out += (1.0 / cfg.lambda) * h;
    return out;
}

ScalarField dot(const VectorField& u, const VectorField& v) { return u.x * v.x + u.y * v.y; }

}  // namespace oitk
