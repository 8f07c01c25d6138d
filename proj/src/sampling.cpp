#include "oitk/sampling.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "oitk/error.hpp"
#include "oitk/lifting.hpp"

namespace oitk {

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
    std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double CounterRng::uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

SampleBatch draw_uniform(std::size_t n, std::uint64_t seed, const Grid& g) {
    if (n < 1) throw InvalidArgument("draw_uniform: n must be at least 1");
    CounterRng rng(seed);
    SampleBatch b;
    b.seed = seed;
    b.n = n;
    b.points.resize(n);
    long count = static_cast<long>(n);
#pragma omp parallel for schedule(static)
    for (long k = 0; k < count; ++k) {
        std::uint64_t c = 2 * static_cast<std::uint64_t>(k);
        b.points[k] = Point{wrap_coordinate(rng.uniform(c) * g.Lx, g.Lx), wrap_coordinate(rng.uniform(c + 1) * g.Ly, g.Ly)};
    }
    return b;
}

SampleBatch transport_samples(const Warp& oit_map, std::size_t n, std::uint64_t seed) {
    SampleBatch b = draw_uniform(n, seed, oit_map.grid());
    b.points = transform_points(oit_map, b.points);
    return b;
}

SampleBatch sample_density(const Density& mu1, std::size_t n, std::uint64_t seed, int N_lift) {
    if (!(mu1.intensity.min() > 0.0)) throw InvalidArgument("sample_density: target must be strictly positive");
    Warp oit_map = solve_oit(mu1, N_lift).warp.inverse();
    return transport_samples(oit_map, n, seed);
}

std::vector<double> bin_masses(const Density& mu, int bins_x, int bins_y) {
    const Grid& g = mu.grid();
    if (bins_x < 1 || bins_y < 1 || g.nx % bins_x != 0 || g.ny % bins_y != 0)
        throw InvalidArgument("bin_masses: bins must divide the grid");
    int mx = g.nx / bins_x, my = g.ny / bins_y;
    std::vector<double> out(static_cast<std::size_t>(bins_x) * bins_y, 0.0);
    double scale = g.cell_area() / g.total_volume();
    for (int bx = 0; bx < bins_x; ++bx) {
        for (int by = 0; by < bins_y; ++by) {
            double s = 0.0;
            for (int a = 0; a <= mx; ++a) {
                double wa = (a == 0 || a == mx) ? 0.5 : 1.0;
                int i = (bx * mx + a) % g.nx;
                for (int c = 0; c <= my; ++c) {
                    double wc = (c == 0 || c == my) ? 0.5 : 1.0;
                    int j = (by * my + c) % g.ny;
                    s += wa * wc * mu.intensity(i, j);
                }
            }
            out[static_cast<std::size_t>(bx) * bins_y + by] = s * scale;
        }
    }
    return out;
}

Chi2Result chi2_gof(const SampleBatch& batch, const Density& mu1, int bins_x, int bins_y) {
    const Grid& g = mu1.grid();
    std::vector<double> mass = bin_masses(mu1, bins_x, bins_y);
    std::vector<double> counts(mass.size(), 0.0);
    for (const Point& p : batch.points) {
        int bx = std::min(static_cast<int>(p.x / g.Lx * bins_x), bins_x - 1);
        int by = std::min(static_cast<int>(p.y / g.Ly * bins_y), bins_y - 1);
        counts[static_cast<std::size_t>(bx) * bins_y + by] += 1.0;
    }
    double n = static_cast<double>(batch.points.size());
    Chi2Result r;
    r.min_expected = n;
    for (std::size_t k = 0; k < mass.size(); ++k) {
        double e = n * mass[k];
        r.min_expected = std::min(r.min_expected, e);
        if (e < 5.0) throw InvalidArgument("chi2_gof: expected count below 5 in some bin");
        r.stat += (counts[k] - e) * (counts[k] - e) / e;
    }
    r.dof = static_cast<int>(mass.size()) - 1;
    return r;
}

double chi2_quantile(int dof, double p) {
    boost::math::chi_squared dist(dof);
    return boost::math::quantile(dist, p);
}

}  // namespace oitk
