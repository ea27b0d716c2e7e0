#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "smlab/fields.hpp"

using namespace smlab;

namespace {
const GridSpec g{12.0, 1024, Boundary::ClampDrift};
constexpr double kPi = 3.14159265358979323846;

PhysConfig harmonic() {
    PhysConfig c;
    c.potential = Potential::harmonic();
    return c;
}
}  // namespace

TEST_CASE("ground-state kinematics: u = -x, v = 0, v_q = ix") {
    const auto df = fields_from_psi(harmonic_ground(g, 0.3), harmonic());
    const int j = [&] {  // nearest node to x = 0.5
        return static_cast<int>((0.5 + g.half_width) / g.dx() + 0.5);
    }();
    const double x = g.node(j);
    CHECK(std::abs(df.u[j] + x) <= 1e-6);
    CHECK(std::abs(df.v[j]) <= 1e-10);
    CHECK(std::abs(df.v_q[j] - cplx{0.0, x}) <= 1e-6);
    CHECK(std::abs(df.b_plus[j] + x) <= 1e-6);
    CHECK(std::abs(df.b_minus[j] - x) <= 1e-6);
    // quad(rho) = 1
    double mass = 0.0;
    for (int k = 0; k < g.n_points; ++k)
        mass += df.rho[k] * g.dx() * ((k == 0 || k == g.n_points - 1) ? 0.5 : 1.0);
    CHECK(std::abs(mass - 1.0) <= 1e-6);
}

TEST_CASE("plane-phase packet carries a constant current drift") {
    const double k0 = 1.0;
    const auto psi = make_field(g, [&](double x) {
        return std::pow(kPi, -0.25) * std::exp(cplx{-x * x / 2.0, k0 * x});
    });
    const auto df = fields_from_psi(psi, PhysConfig{});
    // v comes out of the grad(psi)/psi stencil at second order; the bound is
    // dx^2/6 |Im (ik0 - x)^3| plus the curvature cross term
    const double dx2 = g.dx() * g.dx();
    for (int j = 0; j < g.n_points; ++j) {
        const double x = g.node(j);
        if (std::abs(x) > 4.0) continue;
        const double bound =
            dx2 / 6.0 * std::abs(k0 * (3 * x * x - k0 * k0)) + dx2 / 2.0 * k0 + 1e-10;
        CHECK(std::abs(df.v[j] - k0) <= bound * 1.1);
        CHECK(std::abs(df.u[j] + x) <= 1e-6);
    }
}

TEST_CASE("real positive states have zero current drift") {
    const auto psi = make_field(g, [](double x) {
        return cplx{std::pow(kPi, -0.25) * std::exp(-x * x / 2.0), 0.0};
    });
    const auto df = fields_from_psi(psi, PhysConfig{});
    for (double v : df.v) CHECK(std::abs(v) <= 1e-12);
}

TEST_CASE("global phase leaves every field unchanged") {
    const auto psi = harmonic_ground(g, 0.0);
    auto rotated = psi;
    const cplx phase = std::exp(cplx{0.0, 1.234});
    for (auto& v : rotated.values) v *= phase;
    const auto a = fields_from_psi(psi, harmonic());
    const auto b = fields_from_psi(rotated, harmonic());
    double worst = 0.0;
    for (int j = 0; j < g.n_points; ++j) {
        worst = std::max(worst, std::abs(a.u[j] - b.u[j]));
        worst = std::max(worst, std::abs(a.v[j] - b.v[j]));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("bilateral combination of one-sided drifts recovers v_q") {
    const auto df = fields_from_psi(coherent_state(g, 0.4, 1.0), harmonic());
    const cplx wf{0.5, -0.5}, wb{0.5, 0.5};
    for (int j = 200; j < g.n_points - 200; j += 37) {
        const cplx combo = wf * df.b_plus[j] + wb * df.b_minus[j];
        CHECK(std::abs(combo - df.v_q[j]) <= 1e-14);
    }
}

TEST_CASE("vanishing and normalization guards fire") {
    // first excited state has a node at the origin
    const auto nodal = make_field(g, [](double x) {
        return cplx{x * std::exp(-x * x / 2.0) * std::sqrt(2.0) * std::pow(kPi, -0.25), 0.0};
    });
    CHECK_THROWS_AS(fields_from_psi(nodal, PhysConfig{}), std::invalid_argument);

    auto unnorm = harmonic_ground(g, 0.0);
    for (auto& v : unnorm.values) v *= 1.5;
    CHECK_THROWS_AS(fields_from_psi(unnorm, PhysConfig{}), std::invalid_argument);
}

TEST_CASE("drift_from_h gradients") {
    const auto flat = make_field(g, [](double) { return cplx{1.0, 0.0}; });
    for (double b : drift_from_h(flat).b_plus) CHECK(std::abs(b) <= 1e-12);

    const auto gauss = make_field(g, [](double x) { return cplx{std::exp(-x * x / 2), 0.0}; });
    const auto dg = drift_from_h(gauss);
    for (int j = 50; j < g.n_points - 50; j += 100)
        CHECK(std::abs(dg.b_plus[j] + g.node(j)) <= 1e-9);
    CHECK_FALSE(dg.complete);

    const auto expf = make_field(g, [](double x) { return cplx{std::exp(0.5 * x), 0.0}; });
    const auto de = drift_from_h(expf);
    for (int j = 5; j < g.n_points - 5; j += 100)
        CHECK(std::abs(de.b_plus[j] - 0.5) <= 1e-8);

    const auto neg = make_field(g, [](double x) { return cplx{x, 0.0}; });
    CHECK_THROWS_AS(drift_from_h(neg), std::invalid_argument);
}

TEST_CASE("duality relation holds by construction and detects faults") {
    auto df = fields_from_psi(harmonic_ground(g, 0.0), harmonic());
    const auto rep = check_nelson_relation(df, harmonic());
    CHECK(rep.pass);
    CHECK(rep.max_residual <= 1e-12);

    // sigma^2 dlog(rho) at x ~ 0.5 equals -1 = 2 u(0.5)
    const int j = static_cast<int>((0.5 + g.half_width) / g.dx() + 0.5);
    CHECK(std::abs(2.0 * df.u[j] + 2.0 * g.node(j)) <= 1e-6);

    for (auto& b : df.b_minus) b += 1e-3;
    const auto rep2 = check_nelson_relation(df, harmonic());
    CHECK_FALSE(rep2.pass);
    CHECK(rep2.max_residual == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("continuity equation on records") {
    PhysConfig cfg = harmonic();
    const auto ground = schrodinger_evolve(harmonic_ground(g, 0.0), cfg, 0.2);
    const auto rg = check_continuity(ground, 0.1);
    CHECK(rg.max_residual <= 1e-6);

    PhysConfig fc;
    const auto packet = schrodinger_evolve(free_packet(g, fc, 0.0), fc, 0.6);
    const auto rp = check_continuity(packet, 0.5);
    CHECK(rp.pass);

    const auto coh = schrodinger_evolve(coherent_state(g, 0.0, 1.0), cfg, 0.4);
    const auto rc = check_continuity(coh, 0.3);
    CHECK(rc.pass);

    CHECK_THROWS_AS(check_continuity(ground, 0.0), std::invalid_argument);
}
