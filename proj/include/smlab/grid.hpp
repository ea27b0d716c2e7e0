#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace smlab {

using cplx = std::complex<double>;

enum class Boundary { DirichletZero, ClampDrift };

// Uniform lattice on [-L, L]; x_j = -L + j*dx with dx = 2L/(N-1).
struct GridSpec {
    double half_width = 12.0;
    int n_points = 1024;
    Boundary boundary = Boundary::ClampDrift;

    double dx() const { return 2.0 * half_width / (n_points - 1); }
    double node(int j) const { return -half_width + j * dx(); }
    bool same_lattice(const GridSpec& o) const {
        return half_width == o.half_width && n_points == o.n_points;
    }
    void validate() const;  // N >= 16, L > 0
};

// Complex samples on a grid at one instant.  Also used for real-valued
// fields (heat solutions, densities) with zero imaginary part.
struct ComplexField {
    GridSpec grid;
    std::vector<cplx> values;
    double time_tag = 0.0;

    ComplexField() = default;
    ComplexField(GridSpec g, double t = 0.0)
        : grid(g), values(g.n_points, cplx{0.0, 0.0}), time_tag(t) {}

    int size() const { return static_cast<int>(values.size()); }
    void validate() const;  // values length == grid.n_points
    double max_abs() const;
};

// Sample a function of x onto a grid.
ComplexField make_field(const GridSpec& g, const std::function<cplx(double)>& fn,
                        double time_tag = 0.0);

// First derivative: central differences inside, one-sided second order at
// the two edge nodes.  Exact for polynomials up to degree 2.
ComplexField gradient(const ComplexField& f);

// Second derivative: 3-point stencil inside, 4-point one-sided at edges.
ComplexField laplacian(const ComplexField& f);

// Trapezoid quadrature over the grid.
cplx quad(const ComplexField& f);

// Linear interpolation at x.  ClampDrift maps |x| > L to the nearest node
// value; DirichletZero returns 0 outside the domain.  NaN input throws.
cplx interp(const ComplexField& f, double x);
double interp_real(const std::vector<double>& v, const GridSpec& g, double x);

double l2_norm(const ComplexField& f);
double l2_distance(const ComplexField& a, const ComplexField& b);

void require_same_grid(const ComplexField& a, const ComplexField& b);

}  // namespace smlab
