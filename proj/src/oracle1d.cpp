#include "oitk/oracle1d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oitk/error.hpp"

namespace oitk::oracle1d {

namespace {

int wrap(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

void require_strict(const Density1D& d, const char* what) {
    if (d.n() < 4 || !(d.L > 0.0)) throw InvalidArgument(std::string(what) + ": bad 1-D density");
    for (double v : d.values)
        if (!(v > 0.0)) throw InvalidArgument(std::string(what) + ": density must be strictly positive");
}

}  // namespace

Density1D normalize(std::vector<double> raw, double L) {
    double s = 0.0;
    for (double v : raw) {
        if (v < 0.0) throw InvalidArgument("oracle1d::normalize: negative sample");
        s += v;
    }
    double mass = s * L / raw.size();
    if (!(mass > 0.0)) throw InvalidArgument("oracle1d::normalize: zero mass");
    for (double& v : raw) v *= L / mass;
    return Density1D{std::move(raw), L};
}

Cumulative::Cumulative(const Density1D& d) : L_(d.L), h_(d.h()) {
    require_strict(d, "Cumulative");
    int n = d.n();
    const auto& I = d.values;
    C_.assign(n + 1, 0.0);
    for (int k = 0; k < n; ++k) {
        double cell = h_ * (-I[wrap(k - 1, n)] + 13.0 * I[k] + 13.0 * I[wrap(k + 1, n)] - I[wrap(k + 2, n)]) / 24.0;
        C_[k + 1] = C_[k] + cell;
    }
    if (std::abs(C_[n] - L_) > 1e-10 * L_) throw InvalidArgument("Cumulative: density mass differs from L");
    // Spread the rounding defect so that C(L) = L exactly.
    double defect = (L_ - C_[n]) / n;
    for (int k = 1; k <= n; ++k) C_[k] += defect * k;
    d_.assign(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) d_[k] = I[wrap(k, n)];
    // Fritsch-Carlson: keep each interval's Hermite cubic monotone.
    for (int k = 0; k < n; ++k) {
        double delta = (C_[k + 1] - C_[k]) / h_;
        if (!(delta > 0.0)) throw InvalidArgument("Cumulative: non-increasing cumulative integral");
        double a = d_[k] / delta, b = d_[k + 1] / delta;
        double r = a * a + b * b;
        if (r > 9.0) {
            double tau = 3.0 / std::sqrt(r);
            d_[k] = tau * a * delta;
            d_[k + 1] = tau * b * delta;
            ++limited_;
        }
    }
}

int Cumulative::locate(double x, double& t) const {
    int n = static_cast<int>(C_.size()) - 1;
    double u = x / h_;
    int k = static_cast<int>(std::floor(u));
    k = std::clamp(k, 0, n - 1);
    t = u - k;
    return k;
}

double Cumulative::value(double x) const {
    double turns = std::floor(x / L_);
    double xr = x - turns * L_;
    double t;
    int k = locate(xr, t);
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return turns * L_ + h00 * C_[k] + h10 * h_ * d_[k] + h01 * C_[k + 1] + h11 * h_ * d_[k + 1];
}

double Cumulative::derivative(double x) const {
    double xr = x - std::floor(x / L_) * L_;
    double t;
    int k = locate(xr, t);
    double t2 = t * t;
    double dh00 = 6 * t2 - 6 * t, dh10 = 3 * t2 - 4 * t + 1, dh01 = -6 * t2 + 6 * t, dh11 = 3 * t2 - 2 * t;
    return (dh00 * C_[k] + dh01 * C_[k + 1]) / h_ + dh10 * d_[k] + dh11 * d_[k + 1];
}

double Cumulative::inverse(double c) const {
    double turns = std::floor(c / L_);
    double cr = c - turns * L_;
    int n = static_cast<int>(C_.size()) - 1;
    auto it = std::upper_bound(C_.begin(), C_.end(), cr);
    int k = std::clamp(static_cast<int>(it - C_.begin()) - 1, 0, n - 1);
    if (cr == C_[k]) return turns * L_ + k * h_;
    double lo = k * h_, hi = (k + 1) * h_;
    double x = lo + h_ * (cr - C_[k]) / (C_[k + 1] - C_[k]);
    for (int iter = 0; iter < 100; ++iter) {
        double f = value(x) - cr;
        if (f > 0.0) hi = x; else lo = x;
        if (std::abs(f) <= 1e-15 * L_) break;
        double df = derivative(x);
        double xn = x - f / df;
        if (!(xn > lo && xn < hi) || !(df > 0.0)) xn = 0.5 * (lo + hi);
        if (hi - lo <= 1e-16 * L_) {
            x = xn;
            break;
        }
        x = xn;
    }
    return turns * L_ + x;
}

TransportMap1D::TransportMap1D(const Density1D& I0, const Density1D& I1) : I0_(I0), c0_(I0), c1_(I1) {
    if (std::abs(I0.L - I1.L) > 0.0) throw InvalidArgument("cdf_transport_1d: period mismatch");
}

double TransportMap1D::operator()(double x) const { return c1_.inverse(c0_.value(x)); }

double TransportMap1D::inverse(double y) const { return c0_.inverse(c1_.value(y)); }

double TransportMap1D::derivative(double x) const { return c0_.derivative(x) / c1_.derivative((*this)(x)); }

std::vector<double> TransportMap1D::node_values() const {
    std::vector<double> out(I0_.n());
    for (int k = 0; k < I0_.n(); ++k) out[k] = c1_.inverse(c0_.node(k));
    return out;
}

TransportMap1D cdf_transport_1d(const Density1D& I0, const Density1D& I1) {
    require_strict(I0, "cdf_transport_1d");
    require_strict(I1, "cdf_transport_1d");
    return TransportMap1D(I0, I1);
}

double trig_interpolate(const std::vector<double>& samples, double L, double x) {
    int n = static_cast<int>(samples.size());
    // Direct DFT coefficients; the Nyquist term uses the cosine only.
    double s = 0.0;
    for (double v : samples) s += v;
    double result = s / n;
    double w = 2.0 * M_PI / L;
    for (int m = 1; m <= n / 2; ++m) {
        double a = 0.0, b = 0.0;
        for (int k = 0; k < n; ++k) {
            double ang = 2.0 * M_PI * m * k / n;
            a += samples[k] * std::cos(ang);
            b += samples[k] * std::sin(ang);
        }
        double factor = (m == n / 2) ? 1.0 / n : 2.0 / n;
        result += factor * (a * std::cos(w * m * x) + b * std::sin(w * m * x));
    }
    return result;
}

double matching_residual(const TransportMap1D& phi, const Density1D& I0, const Density1D& I1) {
    int n = I1.n();
    // Fourier coefficients of I0 once, then evaluate at each preimage.
    int m0 = I0.n();
    int nm = m0 / 2;
    std::vector<double> a(nm + 1, 0.0), b(nm + 1, 0.0);
    for (int m = 0; m <= nm; ++m) {
        for (int k = 0; k < m0; ++k) {
            double ang = 2.0 * M_PI * static_cast<double>(m) * k / m0;
            a[m] += I0.values[k] * std::cos(ang);
            b[m] += I0.values[k] * std::sin(ang);
        }
    }
    double w = 2.0 * M_PI / I0.L;
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        double y = k * I1.h();
        double z = phi.inverse(y);
        double i0z = a[0] / m0;
        for (int m = 1; m <= nm; ++m) {
            double factor = (m == nm) ? 1.0 / m0 : 2.0 / m0;
            i0z += factor * (a[m] * std::cos(w * m * z) + b[m] * std::sin(w * m * z));
        }
        double dinv = phi.c1().derivative(y) / phi.c0().derivative(z);
        worst = std::max(worst, std::abs(dinv * i0z - I1.values[k]));
    }
    return worst;
}

Density1D fisher_rao_geodesic_1d(const Density1D& I0, const Density1D& I1, double t) {
    if (I0.n() != I1.n() || I0.L != I1.L) throw InvalidArgument("fisher_rao_geodesic_1d: grid mismatch");
    int n = I0.n();
    double h = I0.h();
    std::vector<double> f0(n), f1(n);
    double ip = 0.0;
    for (int k = 0; k < n; ++k) {
        f0[k] = std::sqrt(I0.values[k]);
        f1[k] = std::sqrt(I1.values[k]);
        ip += f0[k] * f1[k];
    }
    ip *= h;
    double theta = std::acos(std::clamp(ip / I0.L, -1.0, 1.0));
    if (theta >= M_PI - 1e-8) throw InvalidArgument("fisher_rao_geodesic_1d: antipodal densities");
    if (theta < 1e-12 || t == 0.0) return I0;
    if (t == 1.0) return I1;
    double ca = std::sin((1.0 - t) * theta) / std::sin(theta), cb = std::sin(t * theta) / std::sin(theta);
    std::vector<double> out(n);
    for (int k = 0; k < n; ++k) {
        double v = ca * f0[k] + cb * f1[k];
        out[k] = v * v;
    }
    return normalize(std::move(out), I0.L);
}

}  // namespace oitk::oracle1d
