#pragma once

#include <vector>

namespace oitk::oracle1d {

// Positive samples on a periodic grid of n points over [0, L), mass L.
struct Density1D {
    std::vector<double> values;
    double L = 0.0;

    int n() const { return static_cast<int>(values.size()); }
    double h() const { return L / n(); }
};

// Rescales samples (trapezoid mass) to mass L.
Density1D normalize(std::vector<double> raw, double L);

// Cumulative integral C(x) = int_0^x I as a monotone cubic Hermite curve,
// extended to all x by C(x + L) = C(x) + L.
class Cumulative {
public:
    explicit Cumulative(const Density1D& d);

    double value(double x) const;
    double derivative(double x) const;
    // Solves value(x) = c; exact at node values.
    double inverse(double c) const;
    // C at the node x_k = k h.
    double node(int k) const { return C_[k]; }
    // Number of intervals where the node slopes had to be limited.
    int limited_intervals() const { return limited_; }

private:
    int locate(double x, double& t) const;
    double L_ = 0.0;
    double h_ = 0.0;
    std::vector<double> C_;
    std::vector<double> d_;
    int limited_ = 0;
};

// Monotone degree-one circle map phi with phi_* mu0 = mu1 and phi(0) = 0,
// i.e. C1(phi(x)) = C0(x).
class TransportMap1D {
public:
    TransportMap1D(const Density1D& I0, const Density1D& I1);

    double operator()(double x) const;
    double inverse(double y) const;
    double derivative(double x) const;
    // phi at the grid nodes x_k = k h (unwrapped).
    std::vector<double> node_values() const;

    const Cumulative& c0() const { return c0_; }
    const Cumulative& c1() const { return c1_; }

private:
    Density1D I0_;
    Cumulative c0_;
    Cumulative c1_;
};

TransportMap1D cdf_transport_1d(const Density1D& I0, const Density1D& I1);

// Band-limited evaluation of periodic samples at an arbitrary point.
double trig_interpolate(const std::vector<double>& samples, double L, double x);

// sup_k | |D phi^{-1}|(y_k) * I0(phi^{-1}(y_k)) - I1(y_k) | over the nodes of I1.
double matching_residual(const TransportMap1D& phi, const Density1D& I0, const Density1D& I1);

Density1D fisher_rao_geodesic_1d(const Density1D& I0, const Density1D& I1, double t);

}  // namespace oitk::oracle1d
