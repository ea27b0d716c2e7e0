#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "smlab/operators.hpp"

using namespace smlab;

namespace {
const GridSpec g{12.0, 1024, Boundary::ClampDrift};
// residuals of checks run on solver records shrink like dx^2; 2048 nodes
// keep the tail-region log-derivatives inside the 1e-3 budget
const GridSpec g_fine{12.0, 2048, Boundary::ClampDrift};

PhysConfig harmonic() {
    PhysConfig c;
    c.potential = Potential::harmonic();
    return c;
}

const EvolutionRecord& ground_rec() {
    static const EvolutionRecord rec =
        schrodinger_evolve(harmonic_ground(g_fine, 0.0), harmonic(), 0.5);
    return rec;
}

const EvolutionRecord& coherent_rec() {
    static const EvolutionRecord rec =
        schrodinger_evolve(coherent_state(g_fine, 0.0, 1.0), harmonic(), 0.5);
    return rec;
}
}  // namespace

TEST_CASE("bi-directional generator on a ground-state drift field") {
    // v_q = ix so Lb f = ix f' - (i/2) f''; the symbolic comparison needs a
    // very fine lattice for its tight tolerance
    const GridSpec gx{12.0, 32768, Boundary::ClampDrift};
    const auto df = fields_from_psi(harmonic_ground(gx, 0.0), harmonic());
    const auto op = OperatorHandle::lb(df, harmonic());
    const auto f = make_field(gx, [](double x) { return cplx{std::exp(-x * x), 0.0}; });
    const auto out = apply(op, f);
    double worst = 0.0;
    for (int j = 4; j < gx.n_points - 4; ++j) {
        const double x = gx.node(j);
        const double e = std::exp(-x * x);
        const cplx exact = cplx{0.0, 1.0} * (x * (-2.0 * x * e) - 0.5 * (4 * x * x - 2) * e);
        worst = std::max(worst, std::abs(out.values[j] - exact));
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("Hamiltonian eigenvalue on the ground state") {
    const GridSpec gx{12.0, 8192, Boundary::ClampDrift};
    const auto psi0 = harmonic_ground(gx, 0.0);
    const auto H = OperatorHandle::hamiltonian(harmonic());
    const auto out = apply(H, psi0);
    double worst = 0.0;
    for (int j = 4; j < gx.n_points - 4; ++j)
        worst = std::max(worst, std::abs(out.values[j] - 0.5 * psi0.values[j]));
    CHECK(worst <= 1e-6);
}

TEST_CASE("operators are linear and annihilate zero") {
    const auto df = fields_from_psi(harmonic_ground(g, 0.0), harmonic());
    const auto op = OperatorHandle::lplus(df, harmonic());
    const auto zero = make_field(g, [](double) { return cplx{0.0, 0.0}; });
    for (const auto& v : apply(op, zero).values) CHECK(std::abs(v) == 0.0);

    const auto f = make_field(g, [](double x) { return cplx{std::exp(-x * x), 0.0}; });
    const auto h = make_field(g, [](double x) {
        return std::exp(-x * x / 2.5) * cplx{std::cos(x), std::sin(x)};
    });
    const cplx al{0.7, -0.2}, be{-1.1, 0.4};
    ComplexField combo(g);
    for (int j = 0; j < g.n_points; ++j)
        combo.values[j] = al * f.values[j] + be * h.values[j];
    const auto lhs = apply(op, combo);
    const auto rf = apply(op, f);
    const auto rh = apply(op, h);
    double worst = 0.0;
    for (int j = 0; j < g.n_points; ++j)
        worst = std::max(worst,
                         std::abs(lhs.values[j] - al * rf.values[j] - be * rh.values[j]));
    CHECK(worst <= 1e-12);
}

TEST_CASE("Lb equals the complex combination of L+ and L-") {
    const auto df = fields_from_psi(coherent_state(g, 0.2, 1.0), harmonic());
    const auto f = make_field(g, [](double x) {
        return std::exp(-x * x / 2.0) * cplx{1.0, 0.3 * x};
    });
    const auto lb = apply(OperatorHandle::lb(df, harmonic()), f);
    const auto lp = apply(OperatorHandle::lplus(df, harmonic()), f);
    const auto lm = apply(OperatorHandle::lminus(df, harmonic()), f);
    const cplx wf{0.5, -0.5}, wb{0.5, 0.5};
    double worst = 0.0;
    for (int j = 0; j < g.n_points; ++j)
        worst = std::max(worst,
                         std::abs(lb.values[j] - wf * lp.values[j] - wb * lm.values[j]));
    CHECK(worst <= 1e-10);
}

TEST_CASE("support guard rejects wide fields") {
    const auto df = fields_from_psi(harmonic_ground(g, 0.0), harmonic());
    const auto wide = make_field(g, [](double) { return cplx{1.0, 0.0}; });
    CHECK_THROWS_AS(apply(OperatorHandle::lb(df, harmonic()), wide), std::invalid_argument);
}

TEST_CASE("product-solution identity for the oscillator pair") {
    const auto rep = product_solution_check(ground_rec(), coherent_rec(), cplx{0.0, 0.5},
                                  cplx{0.0, -1.0});
    CHECK(rep.pass);
    CHECK(rep.max_residual <= 1e-3);
}

TEST_CASE("product-solution identity, heat case") {
    PhysConfig cfg = harmonic();
    const auto u = make_record(
        [](double x, double t) { return cplx{ou_eigen_h_value(x, t, 0.5), 0.0}; }, g, cfg,
        RecordKind::Heat, 0.0, 0.5);

    SUBCASE("constant multiple gives a constant ratio and zero residual") {
        const double c = 2.5;
        auto th = u;
        for (auto& fld : th.fields)
            for (auto& v : fld.values) v *= c;
        const auto rep = product_solution_check(u, th, cplx{-0.5, 0.0}, cplx{1.0, 0.0});
        CHECK(rep.max_residual <= 1e-10);
    }
    SUBCASE("first excited heat mode against the bottom one") {
        const auto th = make_record(
            [](double x, double t) {
                return cplx{x * std::exp(-x * x / 2.0) * std::exp(-1.5 * (0.5 - t)), 0.0};
            },
            g, cfg, RecordKind::Heat, 0.0, 0.5);
        const auto rep = product_solution_check(u, th, cplx{-0.5, 0.0}, cplx{1.0, 0.0});
        CHECK(rep.pass);
    }
    SUBCASE("identical records give the unit ratio") {
        const auto rep = product_solution_check(u, u, cplx{-0.5, 0.0}, cplx{1.0, 0.0});
        CHECK(rep.max_residual <= 1e-10);
    }
}

TEST_CASE("conjugation identity on test functions") {
    const auto r1 = conjugation_check(ground_rec(), TestFunction{1.2, 0, 0.7}, 0.25);
    CHECK(r1.pass);
    const auto r2 = conjugation_check(coherent_rec(), TestFunction{1.2, 1, 0.7}, 0.25);
    CHECK(r2.pass);

    // f = 0: both sides vanish identically
    ComplexField z(g_fine);
    OperatorHandle op{OperatorHandle::Kind::DdtPlusLb, harmonic(),
                      fields_from_psi(ground_rec().at(1), harmonic()), true};
    const auto out = apply_series(op, z, z, z, ground_rec().dt());
    for (const auto& v : out.values) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("conjugation residual ignores a global phase") {
    auto rec = ground_rec();
    EvolutionRecord rotated = rec;
    const cplx phase = std::exp(cplx{0.0, 0.8});
    for (auto& fld : rotated.fields)
        for (auto& v : fld.values) v *= phase;
    const auto a = conjugation_check(rec, TestFunction{1.2, 2, 0.7}, 0.25);
    const auto b = conjugation_check(rotated, TestFunction{1.2, 2, 0.7}, 0.25);
    CHECK(std::abs(a.max_residual - b.max_residual) <= 1e-10);
}

TEST_CASE("ground-state transformation with Rayleigh shift") {
    const auto rep = ground_state_transform_check(harmonic_ground(g, 0.0), harmonic(),
                                                  TestFunction{1.2, 0, 0.0});
    CHECK(rep.pass);

    // constants sit in the kernel of the drift side exactly: both stencil
    // terms see a constant field
    {
        const auto one = make_field(g, [](double) { return cplx{1.0, 0.0}; });
        const auto d1 = gradient(one);
        const auto l1 = laplacian(one);
        double worst = 0.0;
        for (int j = 0; j < g.n_points; ++j)
            worst = std::max({worst, std::abs(d1.values[j]), std::abs(l1.values[j])});
        CHECK(worst <= 1e-12);
    }

    auto perturbed = harmonic_ground(g, 0.0);
    for (int j = 0; j < g.n_points; ++j) {
        const double x = g.node(j);
        perturbed.values[j] += 0.05 * std::exp(-(x - 1.0) * (x - 1.0));
    }
    CHECK_THROWS_AS(ground_state_transform_check(perturbed, harmonic(),
                                                 TestFunction{1.2, 0, 0.0}),
                    std::invalid_argument);
}

TEST_CASE("log-ratio equation between two solutions") {
    SUBCASE("identical records: zero residual") {
        const auto rep = hj_theta_check(ground_rec(), ground_rec(), 0.25);
        CHECK(rep.max_residual <= 1e-12);
    }
    SUBCASE("constant phase offset") {
        EvolutionRecord rotated = ground_rec();
        const cplx phase = std::exp(cplx{0.0, 0.9});
        for (auto& fld : rotated.fields)
            for (auto& v : fld.values) v *= phase;
        const auto rep = hj_theta_check(ground_rec(), rotated, 0.25);
        CHECK(rep.max_residual <= 1e-10);
    }
    SUBCASE("ground against coherent") {
        const auto rep = hj_theta_check(ground_rec(), coherent_rec(), 0.25);
        CHECK(rep.pass);
    }
}
