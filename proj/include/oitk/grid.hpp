#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace oitk {

// Periodic rectangular grid on [0, Lx) x [0, Ly). Samples sit at (i*dx, j*dy)
// and are stored x-major: index = i*ny + j.
struct Grid {
    int nx = 0;
    int ny = 0;
    double Lx = 0.0;
    double Ly = 0.0;

    double dx() const { return Lx / nx; }
    double dy() const { return Ly / ny; }
    double total_volume() const { return Lx * Ly; }
    double cell_area() const { return dx() * dy(); }
    double min_spacing() const;
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * ny + j; }
    double x(int i) const { return i * dx(); }
    double y(int j) const { return j * dy(); }

    bool operator==(const Grid& o) const;
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

Grid make_grid(int nx, int ny, double Lx, double Ly);

// Throws InvalidArgument when the grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0);
    ScalarField(const Grid& g, std::vector<double> values);

    static ScalarField from_function(const Grid& g, const std::function<double(double, double)>& f);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }
    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    double& operator[](std::size_t k) { return v_[k]; }
    double operator[](std::size_t k) const { return v_[k]; }
    double& operator()(int i, int j) { return v_[grid_.index(i, j)]; }
    double operator()(int i, int j) const { return v_[grid_.index(i, j)]; }

    double min() const;
    double max() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(const ScalarField& o);
    ScalarField& operator*=(double s);
    ScalarField& operator+=(double s);

private:
    Grid grid_;
    std::vector<double> v_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
ScalarField operator*(ScalarField a, double s);

// Pointwise map.
ScalarField apply(const ScalarField& f, const std::function<double(double)>& op);

struct VectorField {
    ScalarField x;
    ScalarField y;

    VectorField() = default;
    explicit VectorField(const Grid& g, double fx = 0.0, double fy = 0.0) : x(g, fx), y(g, fy) {}
    VectorField(ScalarField vx, ScalarField vy);

    const Grid& grid() const { return x.grid(); }
    std::size_t size() const { return x.size(); }

    static VectorField from_function(const Grid& g,
                                     const std::function<double(double, double)>& fx,
                                     const std::function<double(double, double)>& fy);

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

// Midpoint quadrature sum f(i,j) dx dy. The sum is taken serially so results
// do not depend on the thread count.
double integrate(const ScalarField& f);
double mean(const ScalarField& f);
double inner(const ScalarField& f, const ScalarField& g);
double inner(const VectorField& u, const VectorField& v);
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& v);
double sup_norm(const ScalarField& f);
// Largest pointwise Euclidean length.
double sup_norm(const VectorField& v);

// Density mu = I vol with integrate(I) = total_volume.
struct Density {
    ScalarField intensity;
    bool strict = true;

    const Grid& grid() const { return intensity.grid(); }
};

// Rescales raw >= 0 to mass total_volume.
Density normalize_density(const ScalarField& raw, bool strict);

// Wraps an intensity that already carries mass total_volume. Validates the
// invariants without rescaling beyond rounding.
Density make_density(const ScalarField& intensity, bool strict);

Density uniform_density(const Grid& g);

}  // namespace oitk
