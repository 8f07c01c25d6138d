#pragma once

#include <cstdint>
#include <vector>

#include "oitk/warp.hpp"

namespace oitk {

struct SampleBatch {
    std::vector<Point> points;
    std::uint64_t seed = 0;
    std::size_t n = 0;
};

// Stateless generator: the value at (seed, counter) is a splitmix64 hash, so
// any range of a stream can be produced independently.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
    std::uint64_t bits(std::uint64_t counter) const;
    // Uniform in [0, 1) with 53 random bits.
    double uniform(std::uint64_t counter) const;

private:
    std::uint64_t seed_;
};

SampleBatch draw_uniform(std::size_t n, std::uint64_t seed, const Grid& g);

// Transports a uniform batch through an OIT map psi with psi_* vol = mu1.
SampleBatch transport_samples(const Warp& oit_map, std::size_t n, std::uint64_t seed);

// Solves the OIT problem for mu1 with N_lift steps, then transports.
SampleBatch sample_density(const Density& mu1, std::size_t n, std::uint64_t seed, int N_lift);

struct Chi2Result {
    double stat = 0.0;
    int dof = 0;
    double min_expected = 0.0;
};

// Pearson statistic of the batch against bin masses of mu1 / vol(M) on a
// bins_x x bins_y partition; the grid must divide evenly into the bins.
Chi2Result chi2_gof(const SampleBatch& batch, const Density& mu1, int bins_x, int bins_y);

// Bin masses (summing to 1) by periodic trapezoid quadrature.
std::vector<double> bin_masses(const Density& mu, int bins_x, int bins_y);

// Quantile of the chi-squared distribution at cumulative probability p.
double chi2_quantile(int dof, double p);

}  // namespace oitk
