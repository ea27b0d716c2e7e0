#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "smlab/grid.hpp"

using namespace smlab;

namespace {
const GridSpec g{12.0, 1024, Boundary::ClampDrift};
constexpr double kPi = 3.14159265358979323846;
}  // namespace

TEST_CASE("lattice geometry is reproducible from (L, N)") {
    CHECK(g.dx() == doctest::Approx(24.0 / 1023.0).epsilon(1e-15));
    CHECK(g.node(0) == -12.0);
    CHECK(g.node(1023) == doctest::Approx(12.0).epsilon(1e-15));
    GridSpec bad{12.0, 8, Boundary::ClampDrift};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS((GridSpec{-1.0, 64, Boundary::ClampDrift}.validate()),
                    std::invalid_argument);
}

TEST_CASE("gradient annihilates constants and is exact for linear fields") {
    const auto c = make_field(g, [](double) { return cplx{2.5, -1.0}; });
    const auto dc = gradient(c);
    for (const auto& v : dc.values) CHECK(std::abs(v) <= 1e-13);

    const auto lin = make_field(g, [](double x) { return cplx{x, 0.0}; });
    const auto dl = gradient(lin);
    for (int j = 1; j < g.n_points - 1; ++j)
        CHECK(std::abs(dl.values[j] - 1.0) <= 1e-12);
}

TEST_CASE("gradient of a Gaussian meets the second-order error bound") {
    const auto f = make_field(g, [](double x) { return cplx{std::exp(-x * x / 2), 0.0}; });
    const auto df = gradient(f);
    // exact derivative and third-derivative bound from the closed forms
    double max_err = 0.0, max_f3 = 0.0;
    for (int j = 1; j < g.n_points - 1; ++j) {
        const double x = g.node(j);
        const double exact = -x * std::exp(-x * x / 2);
        max_err = std::max(max_err, std::abs(df.values[j].real() - exact));
        const double f3 = (3 * x - x * x * x) * std::exp(-x * x / 2);
        max_f3 = std::max(max_f3, std::abs(f3));
    }
    const double bound = max_f3 / 6.0 * g.dx() * g.dx();
    CHECK(max_err <= bound * 1.05 + 1e-14);
}

TEST_CASE("laplacian is exact for quadratics and second order on a Gaussian") {
    // coarser lattice keeps the x^2 cancellation residue under the bound
    const GridSpec gq{12.0, 256, Boundary::ClampDrift};
    const auto q = make_field(gq, [](double x) { return cplx{x * x, 0.0}; });
    const auto lq = laplacian(q);
    for (int j = 1; j < gq.n_points - 1; ++j)
        CHECK(std::abs(lq.values[j] - 2.0) <= 1e-10);

    const auto f = make_field(g, [](double x) { return cplx{std::exp(-x * x / 2), 0.0}; });
    const auto lf = laplacian(f);
    double max_err = 0.0, max_f4 = 0.0;
    for (int j = 1; j < g.n_points - 1; ++j) {
        const double x = g.node(j);
        const double exact = (x * x - 1.0) * std::exp(-x * x / 2);
        max_err = std::max(max_err, std::abs(lf.values[j].real() - exact));
        const double x2 = x * x;
        max_f4 = std::max(max_f4, std::abs((x2 * x2 - 6 * x2 + 3) * std::exp(-x2 / 2)));
    }
    CHECK(max_err <= max_f4 / 12.0 * g.dx() * g.dx() * 1.05 + 1e-13);
}

TEST_CASE("laplacian agrees with twice-applied gradient at interior nodes") {
    const auto f = make_field(g, [](double x) { return cplx{std::exp(-x * x / 2), 0.0}; });
    const auto a = laplacian(f);
    const auto b = gradient(gradient(f));
    double worst = 0.0;
    for (int j = 4; j < g.n_points - 4; ++j)
        worst = std::max(worst, std::abs(a.values[j] - b.values[j]));
    CHECK(worst <= 3.0 * g.dx() * g.dx());
}

TEST_CASE("trapezoid quadrature") {
    const auto zero = make_field(g, [](double) { return cplx{0.0, 0.0}; });
    CHECK(std::abs(quad(zero)) == 0.0);

    const auto gauss = make_field(
        g, [](double x) { return cplx{std::exp(-x * x) / std::sqrt(kPi), 0.0}; });
    CHECK(std::abs(quad(gauss) - 1.0) <= 1e-10);

    const auto odd = make_field(g, [](double x) { return cplx{x * std::exp(-x * x), 0.0}; });
    CHECK(std::abs(quad(odd)) <= 1e-12);
}

TEST_CASE("linear interpolation hits nodes, midpoints, and linear fields") {
    const auto f = make_field(g, [](double x) { return cplx{std::sin(x), std::cos(x)}; });
    CHECK(interp(f, g.node(100)) == f.values[100]);
    const cplx mid = interp(f, 0.5 * (g.node(7) + g.node(8)));
    CHECK(std::abs(mid - 0.5 * (f.values[7] + f.values[8])) <= 1e-15);

    const auto lin = make_field(g, [](double x) { return cplx{x, 0.0}; });
    for (double x : {-11.93, -3.21, 0.0, 0.777, 11.99})
        CHECK(std::abs(interp(lin, x) - x) <= 1e-12);

    CHECK_THROWS_AS(interp(f, std::nan("")), std::invalid_argument);
}

TEST_CASE("boundary policy controls out-of-domain interpolation") {
    auto f = make_field(g, [](double x) { return cplx{x, 0.0}; });
    CHECK(interp(f, 15.0) == f.values.back());
    CHECK(interp(f, -15.0) == f.values.front());
    GridSpec gd = g;
    gd.boundary = Boundary::DirichletZero;
    auto fd = make_field(gd, [](double x) { return cplx{x, 0.0}; });
    CHECK(interp(fd, 15.0) == cplx{0.0, 0.0});
}

TEST_CASE("field/grid mismatch is rejected") {
    ComplexField bad(g);
    bad.values.resize(100);
    CHECK_THROWS_AS(gradient(bad), std::invalid_argument);
    GridSpec g2{12.0, 512, Boundary::ClampDrift};
    const auto a = make_field(g, [](double) { return cplx{1.0, 0.0}; });
    const auto b = make_field(g2, [](double) { return cplx{1.0, 0.0}; });
    CHECK_THROWS_AS(require_same_grid(a, b), std::invalid_argument);
}
