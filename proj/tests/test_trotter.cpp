#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "smlab/trotter.hpp"

using namespace smlab;

namespace {
const GridSpec g{12.0, 1024, Boundary::ClampDrift};

PhysConfig harmonic() {
    PhysConfig c;
    c.potential = Potential::harmonic();
    return c;
}
}  // namespace

TEST_CASE("one free slice is exact up to quadrature error") {
    PhysConfig cfg;
    const auto psi0 = free_packet(g, cfg, 0.0);
    const auto out = trotter_step_quantum(psi0, 1.0, cfg);
    CHECK(l2_distance(out, free_packet(g, cfg, 1.0)) <= 1e-6);
    CHECK(std::abs(l2_norm(out) - 1.0) <= 1e-6);

    // l = 1 evolve equals the single kernel application bit for bit
    const auto run = trotter_evolve(psi0, cfg, 1.0, 1, TrotterKind::Quantum);
    double worst = 0.0;
    for (int j = 0; j < g.n_points; ++j)
        worst = std::max(worst, std::abs(run.result.values[j] - out.values[j]));
    CHECK(worst == 0.0);
}

TEST_CASE("fast kernel application equals the direct trapezoid sum") {
    // N = 2048 routes through the FFT; recompute a few output nodes directly
    GridSpec big{12.0, 2048, Boundary::ClampDrift};
    PhysConfig cfg;
    const auto psi0 = free_packet(big, cfg, 0.0);
    const auto out = trotter_step_quantum(psi0, 0.5, cfg);
    for (int i : {64, 1024, 1500}) {
        cplx direct{0.0, 0.0};
        for (int j = 0; j < big.n_points; ++j) {
            const double w = (j == 0 || j == big.n_points - 1) ? 0.5 : 1.0;
            direct += w * big.dx() * kernel_K(0.0, big.node(j), 0.5, big.node(i), cfg) *
                      psi0.values[j];
        }
        CHECK(std::abs(out.values[i] - direct) <= 1e-10);
    }
    CHECK(l2_distance(out, free_packet(big, cfg, 0.5)) <= 1e-6);
}

TEST_CASE("quantum scan converges at first order against the solver") {
    GridSpec gq{12.0, 8192, Boundary::ClampDrift};
    const auto psi0 = coherent_state(gq, 0.0, 1.0);
    const auto runs = trotter_scan(psi0, harmonic(), 1.0, {16, 32, 64}, TrotterKind::Quantum);
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        const double ratio = runs[i].l2_error / runs[i + 1].l2_error;
        CHECK(std::log2(ratio) >= 0.7);
        CHECK(std::log2(ratio) <= 1.3);
    }
    CHECK(runs.back().l2_error <= 0.02);
    for (const auto& r : runs) {
        CHECK_FALSE(r.aliased);
        CHECK(r.norm_change / r.l <= 1e-6);
    }
}

TEST_CASE("heat scan converges at first order against the eigen-solution") {
    const auto h1 = make_field(g, [](double x) { return cplx{std::exp(-x * x / 2), 0.0}; });
    const auto exact = make_field(
        g, [](double x) { return cplx{std::exp(-0.5) * std::exp(-x * x / 2), 0.0}; });
    const auto runs = trotter_scan(h1, harmonic(), 1.0, {8, 16, 32, 64}, TrotterKind::Heat);
    double prev = 0.0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const double err = l2_distance(runs[i].result, exact);
        if (i > 0) {
            CHECK(std::log2(prev / err) >= 0.7);
            CHECK(std::log2(prev / err) <= 1.3);
        }
        prev = err;
        CHECK(runs[i].negative_clips == 0);
    }
    CHECK(prev <= 0.02);
    // the PDE reference agrees with the eigen-solution to solver accuracy
    CHECK(l2_distance(runs.back().reference, exact) <= 1e-3);
}

TEST_CASE("pre-step potential ordering differs at first order") {
    GridSpec gq{12.0, 8192, Boundary::ClampDrift};
    const auto psi0 = coherent_state(gq, 0.0, 1.0);
    const auto post = trotter_evolve(psi0, harmonic(), 1.0, 16, TrotterKind::Quantum,
                                     PotentialOrdering::PostStep);
    const auto pre = trotter_evolve(psi0, harmonic(), 1.0, 16, TrotterKind::Quantum,
                                    PotentialOrdering::PreStep);
    const double sep = l2_distance(post.result, pre.result);
    CHECK(sep > 1e-3);       // genuinely different orderings
    CHECK(pre.l2_error <= 0.1);  // both converge to the same limit
}

TEST_CASE("sampling diagnostics flag risky slice widths") {
    const auto psi0 = coherent_state(g, 0.0, 1.0);  // N = 1024
    const auto run = trotter_evolve(psi0, harmonic(), 1.0, 8, TrotterKind::Quantum);
    CHECK_FALSE(run.aliased);
    CHECK_FALSE(run.undersampled);
    CHECK(run.l2_error <= 0.1);

    // a slice shorter than dx^2 m/(pi hbar) undersamples the kernel phase
    const auto tiny = trotter_evolve(psi0, harmonic(), 1e-3, 10, TrotterKind::Quantum);
    CHECK(tiny.undersampled);
    CHECK(tiny.aliased);
}

TEST_CASE("kernel collapse for drift-free heat records") {
    PhysConfig cfg;
    const auto flat = make_record([](double, double) { return cplx{1.0, 0.0}; }, g, cfg,
                                  RecordKind::Heat, 0.0, 0.5);
    const auto rep = kernel_collapse_check(flat);
    CHECK(rep.pass);

    const double a = 0.5;
    const auto drifted = make_record(
        [a](double x, double t) { return cplx{std::exp(a * x - 0.5 * a * a * t), 0.0}; }, g,
        cfg, RecordKind::Heat, 0.0, 0.5);
    const auto rep2 = kernel_collapse_check(drifted);
    CHECK(rep2.pass);

    PhysConfig vcfg = harmonic();
    const auto wrong = make_record(
        [](double x, double t) { return cplx{ou_eigen_h_value(x, t, 0.5), 0.0}; }, g, vcfg,
        RecordKind::Heat, 0.0, 0.5);
    CHECK_THROWS_AS(kernel_collapse_check(wrong), std::invalid_argument);
}
