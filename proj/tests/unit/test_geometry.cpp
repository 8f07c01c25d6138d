#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "oitk/error.hpp"
#include "oitk/geometry.hpp"
#include "oitk/warp.hpp"

using namespace oitk;
using testutil::max_abs_diff;

namespace {

Density cos_density(const Grid& g) {
    return make_density(ScalarField::from_function(g, [](double x, double y) { return 1 - 0.8 * std::cos(x) * std::cos(2 * y); }), true);
}

// Independent evaluation of the distance with an explicit node loop.
double fr_reference(const Density& a, const Density& b) {
    const Grid& g = a.grid();
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) s += std::sqrt(a.intensity(i, j) * b.intensity(i, j));
    double c = s * g.dx() * g.dy() / g.total_volume();
    c = std::min(1.0, std::max(-1.0, c));
    return std::sqrt(g.total_volume()) * std::acos(c);
}

}  // namespace

TEST_CASE("w_map examples and sphere property") {
    Grid g = testutil::torus(32);
    CHECK(max_abs_diff(w_map(uniform_density(g)), ScalarField(g, 1.0)) < 1e-15);
    CHECK(max_abs_diff(w_map(normalize_density(ScalarField(g, 4.0), true)), ScalarField(g, 1.0)) < 1e-15);
    Density c = cos_density(g);
    ScalarField f = w_map(c);
    CHECK(max_abs_diff(f * f, c.intensity) < 1e-14);
    std::mt19937_64 rng(10);
    for (int k = 0; k < 20; ++k) {
        Density d = testutil::random_density(g, rng, 3, 0.8);
        ScalarField w = w_map(d);
        CHECK(std::abs(inner(w, w) - g.total_volume()) < 1e-10 * g.total_volume());
    }
}

TEST_CASE("w_unmap round trip and errors") {
    Grid g = testutil::torus(32);
    CHECK(max_abs_diff(w_unmap(ScalarField(g, 1.0)).intensity, ScalarField(g, 1.0)) < 1e-15);
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        Density d = testutil::random_density(g, rng, 3, 0.6);
        CHECK(max_abs_diff(w_unmap(w_map(d)).intensity, d.intensity) < 1e-12);
    }
    CHECK_THROWS_AS(w_unmap(ScalarField(g, std::sqrt(1.01))), InvalidArgument);
    ScalarField neg(g, 1.0);
    neg[0] = -1e-3;
    CHECK_THROWS_AS(w_unmap(neg), InvalidArgument);
}

TEST_CASE("fisher_rao_distance examples") {
    Grid g = testutil::torus(32);
    std::mt19937_64 rng(12);
    Density a = testutil::random_density(g, rng), b = testutil::random_density(g, rng);
    CHECK(fisher_rao_distance(a, a) == 0.0);
    CHECK(fisher_rao_distance(a, b) == fisher_rao_distance(b, a));
    ScalarField left = ScalarField::from_function(g, [](double x, double) { return x < M_PI ? 1.0 : 0.0; });
    ScalarField right = ScalarField::from_function(g, [](double x, double) { return x < M_PI ? 0.0 : 1.0; });
    Density l = normalize_density(left, false), r = normalize_density(right, false);
    CHECK(fisher_rao_distance(l, r) == doctest::Approx(std::sqrt(g.total_volume()) * M_PI / 2).epsilon(1e-14));
    CHECK_THROWS_AS(fisher_rao_distance(a, uniform_density(testutil::torus(16))), InvalidArgument);
}

TEST_CASE("fisher_rao_distance agrees with an independent quadrature") {
    Grid g = make_grid(32, 24, 3.0, 2.0);
    std::mt19937_64 rng(13);
    for (int k = 0; k < 20; ++k) {
        Density a = testutil::random_density(g, rng, 2, 0.7), b = testutil::random_density(g, rng, 2, 0.7);
        CHECK(std::abs(fisher_rao_distance(a, b) - fr_reference(a, b)) < 1e-10);
    }
}

TEST_CASE("fisher_rao_geodesic endpoints, constant path and equidistance") {
    Grid g = testutil::torus(32);
    std::mt19937_64 rng(14);
    Density a = testutil::random_density(g, rng, 2, 0.5), b = testutil::random_density(g, rng, 2, 0.5);
    CHECK(max_abs_diff(fisher_rao_geodesic(a, b, 0.0).intensity, a.intensity) < 1e-12);
    CHECK(max_abs_diff(fisher_rao_geodesic(a, b, 1.0).intensity, b.intensity) < 1e-12);
    for (double t : {0.0, 0.3, 0.8, 1.0}) CHECK(max_abs_diff(fisher_rao_geodesic(a, a, t).intensity, a.intensity) < 1e-12);
    Density m = fisher_rao_geodesic(a, b, 0.5);
    double d = fisher_rao_distance(a, b);
    CHECK(std::abs(fisher_rao_distance(a, m) - d / 2) < 1e-8);
    CHECK(std::abs(fisher_rao_distance(m, b) - d / 2) < 1e-8);
    for (int k = 0; k <= 10; ++k) {
        Density mt = fisher_rao_geodesic(a, b, 0.1 * k);
        CHECK(std::abs(integrate(mt.intensity) - g.total_volume()) < 1e-10 * g.total_volume());
    }
}

TEST_CASE("fisher_rao_geodesic rejects antipodal pairs and handles disjoint supports") {
    Grid g = testutil::torus(16);
    ScalarField one(g, 1.0);
    GeodesicPair antipodal{one, -1.0 * one, M_PI};
    CHECK_THROWS_AS(fisher_rao_geodesic(antipodal, 0.5), InvalidArgument);
    ScalarField left = ScalarField::from_function(g, [](double x, double) { return x < M_PI ? 1.0 : 0.0; });
    ScalarField right = ScalarField::from_function(g, [](double x, double) { return x < M_PI ? 0.0 : 1.0; });
    Density mid = fisher_rao_geodesic(normalize_density(left, false), normalize_density(right, false), 0.5);
    CHECK(std::abs(integrate(mid.intensity) - g.total_volume()) < 1e-12);
}

TEST_CASE("geodesic_log_derivative matches finite differences and conserves mass") {
    Grid g = testutil::torus(32);
    std::mt19937_64 rng(15);
    Density a = testutil::random_density(g, rng, 2, 0.5), b = testutil::random_density(g, rng, 2, 0.5);
    CHECK(sup_norm(geodesic_log_derivative(a, a, 0.4)) < 1e-12);
    const double h = 1e-5;
    for (double t : {0.1, 0.5, 0.9}) {
        ScalarField ld = geodesic_log_derivative(a, b, t);
        ScalarField p = fisher_rao_geodesic(a, b, t + h).intensity, q = fisher_rao_geodesic(a, b, t - h).intensity;
        ScalarField fd(g);
        for (std::size_t k = 0; k < fd.size(); ++k) fd[k] = (std::log(p[k]) - std::log(q[k])) / (2 * h);
        CHECK(max_abs_diff(ld, fd) < 1e-6);
        CHECK(std::abs(inner(ld, fisher_rao_geodesic(a, b, t).intensity)) < 1e-10);
    }
}

TEST_CASE("hellinger distance examples and chord identity") {
    Grid g = testutil::torus(32);
    std::mt19937_64 rng(16);
    Density a = testutil::random_density(g, rng);
    CHECK(hellinger_distance(a, a) == 0.0);
    for (int k = 0; k < 100; ++k) {
        Density p = testutil::random_density(g, rng, 2, 0.6), q = testutil::random_density(g, rng, 2, 0.6);
        double fr = fisher_rao_distance(p, q), he = hellinger_distance(p, q);
        CHECK(he <= fr + 1e-14);
        double theta = geodesic_pair(p, q).theta;
        CHECK(std::abs(2 * std::sqrt(g.total_volume()) * std::sin(theta / 2) - he) < 1e-10);
    }
}

TEST_CASE("auxiliary divergences examples") {
    Grid g = testutil::torus(32);
    std::mt19937_64 rng(17);
    Density a = testutil::random_density(g, rng);
    Divergences z = auxiliary_divergences(a, a);
    CHECK(z.tv == 0.0);
    CHECK(std::abs(z.kl) < 1e-15);
    CHECK(z.chi2 == 0.0);
    for (int k = 0; k < 100; ++k) {
        Density p = testutil::random_density(g, rng, 3, 1.0), q = testutil::random_density(g, rng, 3, 1.0);
        Divergences dv = auxiliary_divergences(p, q);
        CHECK(dv.kl >= 0.0);
        CHECK(dv.chi2 >= 0.0);
    }
    ScalarField holes(g, 1.0);
    holes[4] = 0.0;
    CHECK_THROWS_AS(auxiliary_divergences(a, normalize_density(holes, false)), InvalidArgument);
}

TEST_CASE("distance inequalities on probability-normalized random strict pairs") {
    Grid g = make_grid(32, 32, 2 * M_PI, 3.0);
    std::mt19937_64 rng(18);
    for (int k = 0; k < 100; ++k) {
        Density p = testutil::random_density(g, rng, 2, 0.3), q = testutil::random_density(g, rng, 2, 0.3);
        double fr = fisher_rao_distance_prob(p, q), he = hellinger_distance_prob(p, q);
        Divergences dv = auxiliary_divergences(p, q);
        CHECK(he <= fr + 1e-14);
        CHECK(fr <= M_PI / 2 * he + 1e-14);
        CHECK(dv.tv <= he + 1e-14);
        CHECK(he <= std::sqrt(dv.tv) + 1e-14);
        CHECK(he * he <= 2 * dv.tv + 1e-14);
        CHECK(he <= std::sqrt(dv.kl) + 1e-14);
        CHECK(he <= std::sqrt(dv.chi2) + 1e-14);
        CHECK(dv.tv <= fr + 1e-14);
        CHECK(fr <= std::sqrt(M_PI / 2 * dv.tv) + 1e-14);
        CHECK(fr <= std::sqrt(M_PI / 2 * dv.kl) + 1e-14);
        CHECK(fr <= std::sqrt(M_PI / 2 * dv.chi2) + 1e-14);
        CHECK(fr == doctest::Approx(geodesic_pair(p, q).theta).epsilon(1e-12));
    }
}

TEST_CASE("kl and chi2 bounds on the fisher-rao distance hold for high contrast pairs") {
    Grid g = testutil::torus(32);
    std::mt19937_64 rng(19);
    for (int k = 0; k < 100; ++k) {
        Density p = testutil::random_density(g, rng, 3, 1.5), q = testutil::random_density(g, rng, 3, 1.5);
        double fr = fisher_rao_distance_prob(p, q);
        Divergences dv = auxiliary_divergences(p, q);
        CHECK(fr <= std::sqrt(M_PI / 2 * dv.kl) + 1e-14);
        CHECK(fr <= std::sqrt(M_PI / 2 * dv.chi2) + 1e-14);
        CHECK(hellinger_distance_prob(p, q) * hellinger_distance_prob(p, q) <= 2 * dv.tv + 1e-14);
    }
}

TEST_CASE("disjoint supports: hellinger exceeds sqrt(tv) while h^2 <= 2 tv holds") {
    Grid g = testutil::torus(16);
    ScalarField left = ScalarField::from_function(g, [](double x, double) { return x < M_PI ? 1.0 : 0.0; });
    ScalarField right = ScalarField::from_function(g, [](double x, double) { return x < M_PI ? 0.0 : 1.0; });
    Density l = normalize_density(left, false), r = normalize_density(right, false);
    double he = hellinger_distance_prob(l, r), tv = total_variation(l, r);
    CHECK(tv == doctest::Approx(1.0));
    CHECK(he == doctest::Approx(std::sqrt(2.0)));
    CHECK(he > std::sqrt(tv));
    CHECK(he * he <= 2 * tv + 1e-14);
    CHECK(fisher_rao_distance_prob(l, r) == doctest::Approx(M_PI / 2));
    CHECK(fisher_rao_distance_prob(l, r) > std::sqrt(M_PI / 2 * tv));
}

namespace {

// Smooth non-volume-preserving warp x -> x + a sin(x) + b, with the inverse
// solved by Newton iteration at every node.
Warp stretch_warp(const Grid& g, double a, double b) {
    Warp w = identity_warp(g);
    for (int i = 0; i < g.nx; ++i) {
        double x = g.x(i), z = x;
        for (int it = 0; it < 60; ++it) z -= (z + a * std::sin(z) + b - x) / (1 + a * std::cos(z));
        for (int j = 0; j < g.ny; ++j) {
            w.fwd.x(i, j) = a * std::sin(x) + b;
            w.inv.x(i, j) = z - x;
            w.inv_jac(i, j) = 1.0 / (1 + a * std::cos(z));
        }
    }
    return w;
}

}  // namespace

TEST_CASE("fisher-rao distance is invariant under warps up to discretization error") {
    std::vector<double> errs;
    for (int n : {32, 64, 128}) {
        Grid g = testutil::torus(n);
        auto f0 = [](double x, double y) { return std::exp(0.6 * std::sin(x) * std::cos(y) + 0.3 * std::cos(2 * x)); };
        auto f1 = [](double x, double y) { return std::exp(0.5 * std::cos(x + y) - 0.4 * std::sin(2 * y)); };
        Density a = normalize_density(ScalarField::from_function(g, f0), true);
        Density b = normalize_density(ScalarField::from_function(g, f1), true);
        Warp w = stretch_warp(g, 0.5, 0.3);
        double d0 = fisher_rao_distance(a, b);
        double d1 = fisher_rao_distance(pushforward_density(w, a).density, pushforward_density(w, b).density);
        errs.push_back(std::abs(d1 - d0));
    }
    MESSAGE("invariance errors " << errs[0] << " " << errs[1] << " " << errs[2]);
    CHECK(std::log2(errs[0] / errs[1]) >= 1.8);
    CHECK(std::log2(errs[1] / errs[2]) >= 1.8);
}
