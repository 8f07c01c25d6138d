#include "oitk/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oitk/error.hpp"

namespace oitk {

double Grid::min_spacing() const { return std::min(dx(), dy()); }

bool Grid::operator==(const Grid& o) const {
    return nx == o.nx && ny == o.ny && Lx == o.Lx && Ly == o.Ly;
}

Grid make_grid(int nx, int ny, double Lx, double Ly) {
    if (nx < 4 || ny < 4 || nx % 2 != 0 || ny % 2 != 0) {
        std::ostringstream os;
        os << "grid resolution must be even and at least 4, got " << nx << "x" << ny;
        throw InvalidArgument(os.str());
    }
    if (!(Lx > 0.0) || !(Ly > 0.0) || !std::isfinite(Lx) || !std::isfinite(Ly)) {
        throw InvalidArgument("grid period lengths must be positive and finite");
    }
    return Grid{nx, ny, Lx, Ly};
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
    if (a != b) throw InvalidArgument(std::string(what) + ": grid mismatch");
}

ScalarField::ScalarField(const Grid& g, double fill) : grid_(g), v_(g.size(), fill) {}

ScalarField::ScalarField(const Grid& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
    if (v_.size() != g.size()) throw InvalidArgument("ScalarField: value count does not match grid");
}

ScalarField ScalarField::from_function(const Grid& g, const std::function<double(double, double)>& f) {
    ScalarField out(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) out(i, j) = f(g.x(i), g.y(j));
    return out;
}

double ScalarField::min() const { return *std::min_element(v_.begin(), v_.end()); }
double ScalarField::max() const { return *std::max_element(v_.begin(), v_.end()); }

bool ScalarField::all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double a) { return std::isfinite(a); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField +=");
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField -=");
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField *=");
    for (std::size_t k = 0; k < v_.size(); ++k) v_[k] *= o.v_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& a : v_) a *= s;
    return *this;
}

ScalarField& ScalarField::operator+=(double s) {
    for (double& a : v_) a += s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }
ScalarField operator*(ScalarField a, double s) { return a *= s; }

ScalarField apply(const ScalarField& f, const std::function<double(double)>& op) {
    ScalarField out(f.grid());
    for (std::size_t k = 0; k < f.size(); ++k) out[k] = op(f[k]);
    return out;
}

VectorField::VectorField(ScalarField vx, ScalarField vy) : x(std::move(vx)), y(std::move(vy)) {
    require_same_grid(x.grid(), y.grid(), "VectorField");
}

VectorField VectorField::from_function(const Grid& g,
                                       const std::function<double(double, double)>& fx,
                                       const std::function<double(double, double)>& fy) {
    return VectorField(ScalarField::from_function(g, fx), ScalarField::from_function(g, fy));
}

VectorField& VectorField::operator+=(const VectorField& o) {
    x += o.x;
    y += o.y;
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    x -= o.x;
    y -= o.y;
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

double integrate(const ScalarField& f) {
    double s = 0.0;
    for (double a : f.values()) s += a;
    return s * f.grid().cell_area();
}

double mean(const ScalarField& f) { return integrate(f) / f.grid().total_volume(); }

double inner(const ScalarField& f, const ScalarField& g) {
    require_same_grid(f.grid(), g.grid(), "inner");
    double s = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) s += f[k] * g[k];
    return s * f.grid().cell_area();
}

double inner(const VectorField& u, const VectorField& v) { return inner(u.x, v.x) + inner(u.y, v.y); }

double l2_norm(const ScalarField& f) { return std::sqrt(inner(f, f)); }
double l2_norm(const VectorField& v) { return std::sqrt(inner(v, v)); }

double sup_norm(const ScalarField& f) {
    double m = 0.0;
    for (double a : f.values()) m = std::max(m, std::abs(a));
    return m;
}

double sup_norm(const VectorField& v) {
    double m = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) m = std::max(m, std::hypot(v.x[k], v.y[k]));
    return m;
}

namespace {

void check_finite(const ScalarField& f, const char* what) {
    if (!f.all_finite()) throw InputError(std::string(what) + ": non-finite values");
}

}  // namespace

Density normalize_density(const ScalarField& raw, bool strict) {
    check_finite(raw, "normalize_density");
    double lo = raw.min();
    if (lo < 0.0) throw InputError("normalize_density: negative values");
    if (strict && lo <= 0.0) throw InputError("normalize_density: strict density requested but zeros present");
    double mass = integrate(raw);
    if (!(mass > 0.0)) throw InputError("normalize_density: all-zero input");
    double factor = raw.grid().total_volume() / mass;
    // Inputs already at mass vol(M) are returned untouched so that
    // normalization is idempotent bit for bit.
    if (std::abs(factor - 1.0) <= 1e-13) return Density{raw, strict};
    return Density{raw * factor, strict};
}

Density make_density(const ScalarField& intensity, bool strict) {
    check_finite(intensity, "make_density");
    double lo = intensity.min();
    if (lo < 0.0) throw InputError("make_density: negative values");
    if (strict && lo <= 0.0) throw InputError("make_density: strict density has zeros");
    double vol = intensity.grid().total_volume();
    double mass = integrate(intensity);
    if (std::abs(mass - vol) > 1e-10 * vol) throw InputError("make_density: mass differs from total volume");
    return Density{intensity, strict};
}

Density uniform_density(const Grid& g) { return Density{ScalarField(g, 1.0), true}; }

}  // namespace oitk
