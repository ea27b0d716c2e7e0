#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "smlab/pathfunc.hpp"

using namespace smlab;

namespace {
const GridSpec g{12.0, 1024, Boundary::ClampDrift};

PhysConfig harmonic() {
    PhysConfig c;
    c.potential = Potential::harmonic();
    return c;
}

// analytic bottom heat mode over [0, 1]
const EvolutionRecord& ou_record() {
    static const EvolutionRecord rec = make_record(
        [](double x, double t) { return cplx{ou_eigen_h_value(x, t, 1.0), 0.0}; }, g,
        harmonic(), RecordKind::Heat, 0.0, 1.0);
    return rec;
}

const EvolutionRecord& packet_record() {
    static const EvolutionRecord rec = schrodinger_evolve(
        free_packet(g, PhysConfig{}, 0.0), PhysConfig{}, 0.5);
    return rec;
}
}  // namespace

TEST_CASE("flat h gives unit weights") {
    PhysConfig cfg;  // V = 0
    const auto flat = make_record([](double, double) { return cplx{1.0, 0.0}; }, g, cfg,
                                  RecordKind::Heat, 0.0, 0.2);
    DriftTable drifts(flat);
    const auto pe = simulate_forward(drifts, 500, 1e-3, 5);
    const auto z = girsanov_weight(pe, drifts);
    for (int p = 0; p < pe.n_paths; ++p)
        CHECK(std::abs(z.final_weight(p) - 1.0) == 0.0);
}

TEST_CASE("pathwise product identity for the mean-reverting h-process") {
    DriftTable drifts(ou_record());
    const auto pe = simulate_forward(drifts, 4000, 1e-3, 6);
    const auto z = girsanov_weight(pe, drifts);
    const auto& h0 = ou_record().at(0);
    const auto& h1f = ou_record().at(ou_record().n_times() - 1);
    std::vector<double> rel;
    KahanSum zsum;
    for (int p = 0; p < pe.n_paths; ++p) {
        double vint = 0.0;
        double vprev = 0.5 * pe.pos(p, 0) * pe.pos(p, 0);
        for (int k = 1; k <= pe.n_steps; ++k) {
            const double vnow = 0.5 * pe.pos(p, k) * pe.pos(p, k);
            vint += 0.5 * (vprev + vnow) * pe.dt;
            vprev = vnow;
        }
        const double lhs = interp(h0, pe.pos(p, 0)).real();
        const double rhs = interp(h1f, pe.pos(p, pe.n_steps)).real() * std::exp(-vint) *
                           z.final_weight(p).real();
        rel.push_back(std::abs(lhs - rhs) / lhs);
        zsum.add(z.final_weight(p).real());
    }
    std::sort(rel.begin(), rel.end());
    // the Ito-sum remainder at dt=1e-3 puts the median safely inside 2e-2
    CHECK(rel[rel.size() / 2] <= 2e-2);
    CHECK(rel[static_cast<std::size_t>(rel.size() * 0.95)] <= 6e-2);

    // martingale mean E[Z] = 1
    const double zm = zsum.sum / pe.n_paths;
    CHECK(std::abs(zm - 1.0) <= 3.0 * 1.5 / std::sqrt(static_cast<double>(pe.n_paths)));
}

TEST_CASE("weights are positive and multiplicative over windows") {
    DriftTable drifts(ou_record());
    const auto pe = simulate_forward(drifts, 200, 1e-3, 7);
    const auto z = girsanov_weight(pe, drifts);
    const int mid = pe.n_steps / 2;
    for (int p = 0; p < pe.n_paths; p += 17) {
        CHECK(z.final_weight(p).real() > 0.0);
        const cplx whole = z.weight(p, 0, pe.n_steps);
        const cplx split = z.weight(p, 0, mid) * z.weight(p, mid, pe.n_steps);
        CHECK(std::abs(whole - split) <= 1e-12 * std::abs(whole));
    }
}

TEST_CASE("Wiener-expectation estimates") {
    const auto one = [](double) { return 1.0; };
    const auto est1 = feynman_kac_estimate(0.3, 0.0, 0.5, Potential::free(), one, 200, 1e-3, 8);
    CHECK(est1.value == 1.0);
    CHECK(est1.stderr_ == 0.0);

    const auto gauss = [](double x) { return std::exp(-x * x / 2.0); };
    const auto est2 =
        feynman_kac_estimate(0.0, 0.0, 1.0, Potential::harmonic(), gauss, 20000, 1e-3, 9);
    CHECK(std::abs(est2.value - std::exp(-0.5)) <= 3.0 * est2.stderr_ + 2e-3);

    // constant potential factors out of the expectation
    const auto est3 =
        feynman_kac_estimate(0.0, 0.0, 1.0, Potential::constant(0.4), gauss, 20000, 1e-3, 10);
    // E[h1(w(1))] for w(1) ~ N(0,1): integral of e^{-x^2/2} e^{-x^2/2}/sqrt(2pi)
    const double expect = std::exp(-0.4) / std::sqrt(2.0);
    CHECK(std::abs(est3.value - expect) <= 3.0 * est3.stderr_);

    CHECK_THROWS_AS(feynman_kac_estimate(0.0, 0.0, 1.0, Potential::free(), one, 50, 1e-3, 1),
                    std::invalid_argument);
}

TEST_CASE("complex weight reproduces the state along paths") {
    DriftTable drifts(packet_record());
    const auto pe = simulate_forward(drifts, 4000, 1e-3, 11);
    const auto zt = complex_weight(pe, drifts);
    const auto& psi0 = packet_record().at(0);
    const auto& psit = packet_record().at(packet_record().n_times() - 1);
    std::vector<double> rel, relmod;
    for (int p = 0; p < pe.n_paths; ++p) {
        const cplx lhs = interp(psit, pe.pos(p, pe.n_steps));
        const cplx rhs = interp(psi0, pe.pos(p, 0)) * zt.final_weight(p);
        rel.push_back(std::abs(lhs - rhs) / std::abs(lhs));
        const double target = std::abs(lhs) / std::abs(interp(psi0, pe.pos(p, 0)));
        relmod.push_back(std::abs(std::abs(zt.final_weight(p)) - target) / target);
    }
    std::sort(rel.begin(), rel.end());
    std::sort(relmod.begin(), relmod.end());
    CHECK(rel[static_cast<std::size_t>(rel.size() * 0.95)] <= 5e-2);
    CHECK(relmod[static_cast<std::size_t>(relmod.size() * 0.95)] <= 5e-2);

    // windows multiply exactly as the exponent sums split
    const int mid = pe.n_steps / 2;
    for (int p = 0; p < pe.n_paths; p += 501) {
        const cplx whole = zt.weight(p, 0, pe.n_steps);
        const cplx split = zt.weight(p, 0, mid) * zt.weight(p, mid, pe.n_steps);
        CHECK(std::abs(whole - split) <= 1e-12 * std::abs(whole));
    }
}

TEST_CASE("u-only state: weight modulus is the density ratio, phase is the"
          " deterministic compensator") {
    // stationary real-positive profile injected as a record; the formula sees
    // only u, and |Z| telescopes to the density ratio
    PhysConfig cfg;
    const auto rec = make_record(
        [](double x, double) {
            return cplx{std::pow(3.14159265358979324, -0.25) * std::exp(-x * x / 2.0), 0.0};
        },
        g, cfg, RecordKind::Schrodinger, 0.0, 0.3);
    DriftTable drifts(rec);
    const auto pe = simulate_forward(drifts, 2000, 1e-3, 12);
    const auto zt = complex_weight(pe, drifts);
    const auto& psi = rec.at(0);
    int ok = 0;
    for (int p = 0; p < pe.n_paths; ++p) {
        const double target = std::abs(interp(psi, pe.pos(p, pe.n_steps))) /
                              std::abs(interp(psi, pe.pos(p, 0)));
        if (std::abs(std::abs(zt.final_weight(p)) - target) <= 5e-2 * target) ++ok;
    }
    CHECK(static_cast<double>(ok) / pe.n_paths >= 0.95);
}

TEST_CASE("short-time limit of the conditional representation") {
    // with a real psi0 and t = 5 dt the weights barely move: per-bin means
    // must land on psi0(bin center)
    PhysConfig cfg;
    cfg.potential = Potential::harmonic();
    const auto rec = schrodinger_evolve(harmonic_ground(g, 0.0), cfg, 5e-3);
    DriftTable drifts(rec);
    const auto pe = simulate_forward(drifts, 20000, 1e-3, 21);
    const auto zt = complex_weight(pe, drifts);

    // degenerate window: the empty exponent gives |Z| = 1 exactly
    for (int p = 0; p < pe.n_paths; p += 997)
        CHECK(std::abs(zt.weight(p, 0, 0) - 1.0) == 0.0);

    const auto bins = conditional_representation_check(pe, rec, zt, 5e-3, 12, -1.5, 1.5);
    int q = 0, pass = 0;
    for (const auto& b : bins) {
        if (!b.qualifying) continue;
        ++q;
        if (std::abs(b.estimate - b.target) <= 3.0 * b.stderr_ + b.bias_bound) ++pass;
    }
    CHECK(q >= 8);
    CHECK(pass == q);
}

TEST_CASE("endpoint-binned measure from a packet run") {
    DriftTable drifts(packet_record());
    const auto pe = simulate_forward(drifts, 2000, 1e-3, 13);
    const auto zt = complex_weight(pe, drifts);
    const int n_bins = 16;
    const double x_min = -3.0, x_max = 3.0, w = (x_max - x_min) / n_bins;
    FinitePartitionMeasure m;
    m.masses.assign(n_bins, cplx{0.0, 0.0});
    std::vector<double> mean_abs(n_bins, 0.0);
    std::vector<long> counts(n_bins, 0);
    for (int p = 0; p < pe.n_paths; ++p) {
        const int b = static_cast<int>((pe.pos(p, pe.n_steps) - x_min) / w);
        if (pe.pos(p, pe.n_steps) < x_min || b < 0 || b >= n_bins) continue;
        m.masses[b] += zt.final_weight(p) / static_cast<double>(pe.n_paths);
        mean_abs[b] += std::abs(zt.final_weight(p));
        ++counts[b];
    }
    const double tv = finite_partition_tv(m);
    CHECK(tv >= std::abs(m.total()) - 1e-15);
    // cellwise dominating measure built from per-bin means of |Z|
    double dom = 0.0;
    for (int b = 0; b < n_bins; ++b) dom += mean_abs[b] / pe.n_paths;
    CHECK(dom >= tv - 1e-12);
}

TEST_CASE("finite-partition total variation and polar decomposition") {
    FinitePartitionMeasure m;
    m.masses = {cplx{1.0, 0.0}, cplx{0.0, 1.0}, cplx{-1.0, 0.0}};
    CHECK(finite_partition_tv(m) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(std::abs(m.total()) == doctest::Approx(1.0).epsilon(1e-15));

    FinitePartitionMeasure pos;
    pos.masses = {cplx{0.5, 0.0}, cplx{1.5, 0.0}, cplx{0.25, 0.0}};
    const auto pd = polar_decompose(pos);
    CHECK(finite_partition_tv(pos) == doctest::Approx(2.25).epsilon(1e-15));
    for (const auto& h : pd.unimodular) CHECK(h == cplx{1.0, 0.0});

    FinitePartitionMeasure withzero;
    withzero.masses = {cplx{0.0, 0.0}, cplx{3.0, -4.0}};
    const auto pz = polar_decompose(withzero);
    CHECK(pz.unimodular[0] == cplx{1.0, 0.0});
    CHECK(std::abs(pz.unimodular[1] * pz.tv_masses[1] - withzero.masses[1]) <= 1e-14);
}
