#include "smlab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace smlab {

void GridSpec::validate() const {
    if (n_points < 16) throw std::invalid_argument("GridSpec: n_points must be >= 16");
    if (!(half_width > 0.0)) throw std::invalid_argument("GridSpec: half_width must be > 0");
}

void ComplexField::validate() const {
    grid.validate();
    if (static_cast<int>(values.size()) != grid.n_points)
        throw std::invalid_argument("ComplexField: values length does not match grid");
}

double ComplexField::max_abs() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
}

ComplexField make_field(const GridSpec& g, const std::function<cplx(double)>& fn,
                        double time_tag) {
    g.validate();
    ComplexField f(g, time_tag);
    for (int j = 0; j < g.n_points; ++j) f.values[j] = fn(g.node(j));
    return f;
}

ComplexField gradient(const ComplexField& f) {
    f.validate();
    const int n = f.size();
    if (n < 3) throw std::invalid_argument("gradient: need at least 3 nodes");
    const double dx = f.grid.dx();
    ComplexField g(f.grid, f.time_tag);
    const auto& v = f.values;
    g.values[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx);
    for (int j = 1; j < n - 1; ++j) g.values[j] = (v[j + 1] - v[j - 1]) / (2.0 * dx);
    g.values[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dx);
    return g;
}

ComplexField laplacian(const ComplexField& f) {
    f.validate();
    const int n = f.size();
    if (n < 4) throw std::invalid_argument("laplacian: need at least 4 nodes");
    const double dx2 = f.grid.dx() * f.grid.dx();
    ComplexField g(f.grid, f.time_tag);
    const auto& v = f.values;
    g.values[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / dx2;
    for (int j = 1; j < n - 1; ++j) g.values[j] = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / dx2;
    g.values[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / dx2;
    return g;
}

cplx quad(const ComplexField& f) {
    f.validate();
    const int n = f.size();
    cplx s = 0.5 * (f.values[0] + f.values[n - 1]);
    for (int j = 1; j < n - 1; ++j) s += f.values[j];
    return s * f.grid.dx();
}

cplx interp(const ComplexField& f, double x) {
    f.validate();
    if (std::isnan(x)) throw std::invalid_argument("interp: NaN position");
    const double L = f.grid.half_width;
    if (x < -L || x > L) {
        if (f.grid.boundary == Boundary::DirichletZero) return cplx{0.0, 0.0};
        return x < 0.0 ? f.values.front() : f.values.back();
    }
    const double dx = f.grid.dx();
    const double s = (x + L) / dx;
    int j = static_cast<int>(s);
    if (j >= f.size() - 1) return f.values.back();
    const double w = s - j;
    // snap rounding residue so querying a node returns the nodal value
    if (w < 1e-9) return f.values[j];
    if (w > 1.0 - 1e-9) return f.values[j + 1];
    return (1.0 - w) * f.values[j] + w * f.values[j + 1];
}

double interp_real(const std::vector<double>& v, const GridSpec& g, double x) {
    const double L = g.half_width;
    if (x < -L) return v.front();
    if (x > L) return v.back();
    const double s = (x + L) / g.dx();
    int j = static_cast<int>(s);
    if (j >= static_cast<int>(v.size()) - 1) return v.back();
    const double w = s - j;
    return (1.0 - w) * v[j] + w * v[j + 1];
}

double l2_norm(const ComplexField& f) {
    f.validate();
    const int n = f.size();
    double s = 0.5 * (std::norm(f.values[0]) + std::norm(f.values[n - 1]));
    for (int j = 1; j < n - 1; ++j) s += std::norm(f.values[j]);
    return std::sqrt(s * f.grid.dx());
}

double l2_distance(const ComplexField& a, const ComplexField& b) {
    require_same_grid(a, b);
    const int n = a.size();
    auto d2 = [&](int j) { return std::norm(a.values[j] - b.values[j]); };
    double s = 0.5 * (d2(0) + d2(n - 1));
    for (int j = 1; j < n - 1; ++j) s += d2(j);
    return std::sqrt(s * a.grid.dx());
}

void require_same_grid(const ComplexField& a, const ComplexField& b) {
    a.validate();
    b.validate();
    if (!a.grid.same_lattice(b.grid))
        throw std::invalid_argument("grid mismatch between fields");
}

}  // namespace smlab
