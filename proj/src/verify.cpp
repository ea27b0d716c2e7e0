#include "smlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "smlab/fields.hpp"
#include "smlab/io.hpp"
#include "smlab/operators.hpp"
#include "smlab/pathfunc.hpp"
#include "smlab/sde.hpp"
#include "smlab/trotter.hpp"

namespace smlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

GridSpec default_grid() { return GridSpec{12.0, 1024, Boundary::ClampDrift}; }

PhysConfig harmonic_cfg() {
    PhysConfig cfg;
    cfg.potential = Potential::harmonic();
    return cfg;
}

PhysConfig free_cfg() { return PhysConfig{}; }

// cached Crank-Nicolson records for the Gaussian scenario family
const EvolutionRecord& ground_record() {
    static const EvolutionRecord rec =
        schrodinger_evolve(harmonic_ground(default_grid(), 0.0), harmonic_cfg(), 1.0);
    return rec;
}

const EvolutionRecord& coherent_record() {
    static const EvolutionRecord rec =
        schrodinger_evolve(coherent_state(default_grid(), 0.0, 1.0), harmonic_cfg(), 1.0);
    return rec;
}

const EvolutionRecord& free_record() {
    static const EvolutionRecord rec =
        schrodinger_evolve(free_packet(default_grid(), free_cfg(), 0.0), free_cfg(), 1.0);
    return rec;
}

// finer lattice for the operator-identity residuals: their guard-edge
// log-derivatives inherit the solver's O(dx^2) tail wiggle
GridSpec fine_grid() { return GridSpec{12.0, 2048, Boundary::ClampDrift}; }

const EvolutionRecord& ground_record_fine() {
    static const EvolutionRecord rec =
        schrodinger_evolve(harmonic_ground(fine_grid(), 0.0), harmonic_cfg(), 0.5);
    return rec;
}

const EvolutionRecord& coherent_record_fine() {
    static const EvolutionRecord rec =
        schrodinger_evolve(coherent_state(fine_grid(), 0.0, 1.0), harmonic_cfg(), 0.5);
    return rec;
}

CheckResult make_check(const std::string& name, bool pass, double value, double threshold,
                       std::string detail = {}) {
    return CheckResult{name, pass, value, threshold, std::move(detail)};
}

std::string describe(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void maybe_write_bins(const VerifyOptions& opt, const std::string& name,
                      const std::vector<BinCheck>& bins) {
    if (opt.artifact_dir.empty()) return;
    std::filesystem::create_directories(opt.artifact_dir);
    std::ofstream os(std::filesystem::path(opt.artifact_dir) / name);
    if (os) bin_table_csv(bins, os);
}

}  // namespace

Scenario make_scenario(const std::string& name, const GridSpec& grid, double t1) {
    Scenario sc;
    sc.name = name;
    sc.grid = grid;
    sc.t1 = t1;
    if (name == "free_packet") {
        sc.cfg = free_cfg();
        sc.initial = free_packet(grid, sc.cfg, 0.0);
    } else if (name == "harmonic_ground") {
        sc.cfg = harmonic_cfg();
        sc.initial = harmonic_ground(grid, 0.0);
    } else if (name == "harmonic_coherent") {
        sc.cfg = harmonic_cfg();
        sc.initial = coherent_state(grid, 0.0, 1.0);
    } else if (name == "ou_feynman_kac") {
        sc.cfg = harmonic_cfg();
        sc.kind = RecordKind::Heat;
        sc.initial = make_field(grid, [](double x) { return std::exp(-x * x / 2.0); });
    } else {
        throw std::invalid_argument("unknown scenario: " + name);
    }
    return sc;
}

bool scenario_known(const std::string& name) {
    return name == "free_packet" || name == "harmonic_ground" ||
           name == "harmonic_coherent" || name == "ou_feynman_kac" || name == "custom";
}

// ---------------------------------------------------------------- trotter --

std::vector<CheckResult> verify_trotter(const VerifyOptions&) {
    std::vector<CheckResult> out;
    const std::vector<int> ls{8, 16, 32, 64};

    // quantum scan needs the oscillation wrap distance beyond the grid span
    GridSpec gq{12.0, 8192, Boundary::ClampDrift};
    PhysConfig cfgq = harmonic_cfg();
    const ComplexField psi0 = coherent_state(gq, 0.0, 1.0);
    const auto qruns = trotter_scan(psi0, cfgq, 1.0, ls, TrotterKind::Quantum);
    for (std::size_t i = 0; i + 1 < qruns.size(); ++i) {
        const double ratio = qruns[i].l2_error / qruns[i + 1].l2_error;
        out.push_back(make_check(
            "trotter-quantum-ratio-l" + std::to_string(ls[i]) + "-" + std::to_string(ls[i + 1]),
            ratio >= 1.6 && ratio <= 2.4, ratio, 2.0,
            "err(l)=" + describe(qruns[i].l2_error)));
    }
    out.push_back(make_check("trotter-quantum-l64-error", qruns.back().l2_error <= 0.02,
                             qruns.back().l2_error, 0.02));
    out.push_back(make_check("trotter-quantum-norm-per-slice",
                             qruns.back().norm_change / qruns.back().l <= 1e-6,
                             qruns.back().norm_change / qruns.back().l, 1e-6));

    // heat scan against the separable eigen-solution
    GridSpec gh = default_grid();
    PhysConfig cfgh = harmonic_cfg();
    const ComplexField h1 = make_field(gh, [](double x) { return std::exp(-x * x / 2.0); });
    const ComplexField h_exact = make_field(
        gh, [](double x) { return std::exp(-0.5) * std::exp(-x * x / 2.0); });
    const auto hruns = trotter_scan(h1, cfgh, 1.0, ls, TrotterKind::Heat);
    std::vector<double> herr;
    for (const auto& r : hruns) herr.push_back(l2_distance(r.result, h_exact));
    for (std::size_t i = 0; i + 1 < hruns.size(); ++i) {
        const double ratio = herr[i] / herr[i + 1];
        out.push_back(make_check(
            "trotter-heat-ratio-l" + std::to_string(ls[i]) + "-" + std::to_string(ls[i + 1]),
            ratio >= 1.6 && ratio <= 2.4, ratio, 2.0, "err(l)=" + describe(herr[i])));
    }
    out.push_back(make_check("trotter-heat-l64-error", herr.back() <= 0.02, herr.back(), 0.02));
    long clips = 0;
    for (const auto& r : hruns) clips += r.negative_clips;
    out.push_back(make_check("trotter-heat-positivity-clips", clips == 0,
                             static_cast<double>(clips), 0.0));

    // free-case exactness of a single slice
    GridSpec gf = default_grid();
    const ComplexField p0 = free_packet(gf, free_cfg(), 0.0);
    const ComplexField p1 = trotter_step_quantum(p0, 1.0, free_cfg());
    const ComplexField pex = free_packet(gf, free_cfg(), 1.0);
    const double ferr = l2_distance(p1, pex);
    out.push_back(make_check("trotter-free-single-slice", ferr <= 1e-6, ferr, 1e-6));
    return out;
}

// ------------------------------------------------------------------- born --

CheckResult born_check(const Scenario& sc, int n_paths, std::uint64_t seed) {
    if (sc.kind != RecordKind::Schrodinger)
        throw std::invalid_argument("born_check: needs a Schrodinger scenario");
    const EvolutionRecord rec = schrodinger_evolve(sc.initial, sc.cfg, sc.t1);
    DriftTable drifts(rec);
    const PathEnsemble pe = simulate_forward(drifts, n_paths, rec.dt(), seed);
    const auto rho = drifts.at(drifts.n_times() - 1).rho;
    const double tv = born_tv_distance(pe, rho, rec.grid, 64, -8.0, 8.0);
    return make_check("born-tv-" + sc.name, tv <= 0.05, tv, 0.05,
                      "clamped_steps=" + std::to_string(pe.clamp_count));
}

std::vector<CheckResult> verify_born(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    {
        Scenario sc;
        sc.name = "free_packet";
        sc.cfg = free_cfg();
        sc.grid = default_grid();
        sc.t1 = 1.0;
        const EvolutionRecord& rec = free_record();
        DriftTable drifts(rec);
        const PathEnsemble pe = simulate_forward(drifts, 50000, rec.dt(), opt.seed);
        const double tv =
            born_tv_distance(pe, drifts.at(drifts.n_times() - 1).rho, rec.grid, 64, -8.0, 8.0);
        out.push_back(make_check("born-tv-free_packet", tv <= 0.05, tv, 0.05));

        // drift transport: the ensemble mean follows hbar k0 t / m
        KahanSum s;
        for (int p = 0; p < pe.n_paths; ++p) s.add(pe.pos(p, pe.n_steps));
        const double mean = s.sum / pe.n_paths;
        const double se = std::sqrt(2.0) / std::sqrt(static_cast<double>(pe.n_paths));
        out.push_back(make_check("mean-transport-free_packet",
                                 std::abs(mean - 1.0) <= 3.0 * se, mean, 1.0));
    }
    {
        const EvolutionRecord& rec = coherent_record();
        DriftTable drifts(rec);
        const PathEnsemble pe = simulate_forward(drifts, 50000, rec.dt(), opt.seed + 1);
        const double tv =
            born_tv_distance(pe, drifts.at(drifts.n_times() - 1).rho, rec.grid, 64, -8.0, 8.0);
        out.push_back(make_check("born-tv-harmonic_coherent", tv <= 0.05, tv, 0.05));
    }
    {
        const EvolutionRecord& rec = ground_record();
        DriftTable drifts(rec);
        const PathEnsemble pe = simulate_forward(drifts, 50000, rec.dt(), opt.seed + 2);
        const double tv =
            born_tv_distance(pe, drifts.at(drifts.n_times() - 1).rho, rec.grid, 64, -8.0, 8.0);
        out.push_back(make_check("born-tv-harmonic_ground", tv <= 0.05, tv, 0.05));

        // reverse-time ensemble lands on the same stationary density:
        // copy initial-time positions into the terminal slot for the histogram
        PathEnsemble pr = simulate_reverse(drifts, 50000, rec.dt(), opt.seed + 3);
        for (int p = 0; p < pr.n_paths; ++p) pr.pos(p, pr.n_steps) = pr.pos(p, 0);
        const double tvr = born_tv_distance(pr, drifts.at(0).rho, rec.grid, 64, -8.0, 8.0);
        out.push_back(make_check("born-tv-reverse-ground", tvr <= 0.05, tvr, 0.05));
    }
    return out;
}

// ----------------------------------------------------------------- nelson --

std::vector<CheckResult> verify_nelson(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    const EvolutionRecord& rec = ground_record();
    DriftTable drifts(rec);
    const PathEnsemble pe = simulate_forward(drifts, 50000, rec.dt(), opt.seed + 10);
    const double t = 0.5;
    const int k = static_cast<int>(std::llround((t - pe.t0) / pe.dt));

    // forward-minus-backward estimates per bin vs sigma^2 dlog rho = -2x
    const int n_bins = 16;
    const double x_min = -2.0, x_max = 2.0, w = (x_max - x_min) / n_bins;
    std::vector<KahanSum> sums(n_bins), sqs(n_bins);
    std::vector<long> counts(n_bins, 0);
    for (int p = 0; p < pe.n_paths; ++p) {
        const double x = pe.pos(p, k);
        const int b = static_cast<int>(std::floor((x - x_min) / w));
        if (b < 0 || b >= n_bins) continue;
        const double diff = (pe.pos(p, k + 1) - 2.0 * x + pe.pos(p, k - 1)) / pe.dt;
        sums[b].add(diff);
        sqs[b].add(diff * diff);
        ++counts[b];
    }
    int qualifying = 0, passing = 0;
    for (int b = 0; b < n_bins; ++b) {
        if (counts[b] < 50) continue;
        ++qualifying;
        const double n = counts[b];
        const double est = sums[b].sum / n;
        const double var = std::max(sqs[b].sum / n - est * est, 0.0);
        const double se = std::sqrt(var / n);
        const double target = -2.0 * (x_min + (b + 0.5) * w);
        if (std::abs(est - target) <= 3.0 * se) ++passing;
    }
    const double frac = qualifying > 0 ? static_cast<double>(passing) / qualifying : 0.0;
    out.push_back(make_check("nelson-m1-binned", frac >= 0.9, frac, 0.9,
                             std::to_string(passing) + "/" + std::to_string(qualifying)));

    // one-sided conditional derivatives separately
    for (auto dir : {Direction::Forward, Direction::Backward}) {
        const auto bins = conditional_drift_estimate(pe, drifts, dir, t, n_bins, x_min, x_max);
        int q = 0, p = 0;
        for (const auto& b : bins) {
            if (!b.qualifying) continue;
            ++q;
            if (std::abs(b.estimate - b.target) <= 3.0 * b.stderr_) ++p;
        }
        const double fr = q > 0 ? static_cast<double>(p) / q : 0.0;
        out.push_back(make_check(
            dir == Direction::Forward ? "conditional-drift-forward" : "conditional-drift-backward",
            fr >= 0.9, fr, 0.9, std::to_string(p) + "/" + std::to_string(q)));
    }

    // same-interval semi-difference identity
    const auto k10 = k10_semidifference(pe, drifts, n_bins, x_min, x_max);
    int q10 = 0, p10 = 0;
    for (const auto& b : k10) {
        if (b.count < 1000) continue;
        ++q10;
        if (std::abs(b.estimate.real() - b.target.real()) <= 3.0 * b.stderr_ + 1e-5) ++p10;
    }
    out.push_back(make_check("k10-semidifference", q10 > 0 && p10 == q10,
                             static_cast<double>(p10), static_cast<double>(q10),
                             std::to_string(p10) + "/" + std::to_string(q10)));
    return out;
}

// --------------------------------------------------------------------- qv --

std::vector<CheckResult> verify_qv(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    const EvolutionRecord& rec = ground_record();
    DriftTable drifts(rec);
    const PathEnsemble pe = simulate_forward(drifts, 50000, rec.dt(), opt.seed + 20);
    const QVReport rep = quadratic_variation(pe, drifts);
    const double span = std::abs(rep.target);
    const double err = rep.abs_error / span;
    out.push_back(make_check("qv-m4", err <= 0.02, err, 0.02,
                             "sum=" + describe(rep.sum.real()) + "+" +
                                 describe(rep.sum.imag()) + "i"));

    // halving dt halves the O(dt) bias, within MC noise
    PhysConfig cfg_half = harmonic_cfg();
    cfg_half.dt = 5e-4;
    const EvolutionRecord rec_half =
        schrodinger_evolve(harmonic_ground(default_grid(), 0.0), cfg_half, 1.0);
    DriftTable drifts_half(rec_half);
    const QVReport rep_half =
        quadratic_variation_streaming(drifts_half, 20000, 5e-4, opt.seed + 21);
    const double span_h = std::abs(rep_half.target);
    const double err_h = rep_half.abs_error / span_h;
    const bool halves = err_h <= 0.65 * err + 3.0 * (rep.stderr_ + rep_half.stderr_) / span;
    out.push_back(make_check("qv-dt-halving", halves, err_h, 0.65 * err,
                             "full=" + describe(err) + " half=" + describe(err_h)));
    return out;
}

// --------------------------------------------------------- pathwise (F7/TV) --

namespace {

struct PathwiseData {
    EvolutionRecord rec;  // free packet over [0, 0.5]
    PathEnsemble pe;
    WeightSeries zt;
};

PathwiseData make_pathwise_data(std::uint64_t seed, double s0 = 1.0, int n_paths = 20000) {
    PhysConfig cfg = free_cfg();
    PathwiseData d{schrodinger_evolve(free_packet(default_grid(), cfg, 0.0, 0.0, s0, 1.0),
                                      cfg, 0.5),
                   {}, {}};
    DriftTable drifts(d.rec);
    d.pe = simulate_forward(drifts, n_paths, d.rec.dt(), seed);
    d.zt = complex_weight(d.pe, drifts);
    return d;
}

}  // namespace

std::vector<CheckResult> verify_pathwise(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    PathwiseData d = make_pathwise_data(opt.seed + 30);
    const int kt = d.pe.n_steps;
    const ComplexField& psi0 = d.rec.at(0);
    const ComplexField& psit = d.rec.at(d.rec.n_times() - 1);

    long ok_f7 = 0;
    for (int p = 0; p < d.pe.n_paths; ++p) {
        const cplx lhs = interp(psit, d.pe.pos(p, kt));
        const cplx rhs = interp(psi0, d.pe.pos(p, 0)) * d.zt.weight(p, 0, kt);
        if (std::abs(lhs - rhs) <= 0.05 * std::abs(lhs)) ++ok_f7;
    }
    const double frac_f7 = static_cast<double>(ok_f7) / d.pe.n_paths;
    out.push_back(make_check("pathwise-f7", frac_f7 >= 0.95, frac_f7, 0.95));

    const auto tv = total_variation_check(d.pe, d.rec, d.zt, 0.5, 32, -3.0, 3.0);
    maybe_write_bins(opt, "tv_bins.csv", tv.bins);
    out.push_back(make_check("pathwise-tv-modulus", tv.frac_within >= 0.95,
                             tv.frac_within, 0.95));
    const double mass_err = std::abs(tv.mass_integral - tv.mass_integral_ref);
    out.push_back(make_check("tv-mass-integral",
                             mass_err <= 3.0 * tv.mass_integral_stderr + 5e-3,
                             tv.mass_integral, tv.mass_integral_ref,
                             "quad(rho0^1/2)=" + describe(tv.mass_integral_ref)));
    // Gaussian value of the half-density mass, frozen from the closed form
    out.push_back(make_check("tv-mass-integral-ref-value",
                             std::abs(tv.mass_integral_ref - 1.8827925275534296) <= 1e-6,
                             tv.mass_integral_ref, 1.8827925275534296));
    int qtv = 0, ptv = 0;
    for (const auto& b : tv.bins) {
        if (!b.qualifying) continue;
        ++qtv;
        if (b.pass) ++ptv;
    }
    const double frtv = qtv > 0 ? static_cast<double>(ptv) / qtv : 0.0;
    out.push_back(make_check("tv-binned", frtv >= 0.9, frtv, 0.9,
                             std::to_string(ptv) + "/" + std::to_string(qtv)));
    return out;
}

std::vector<CheckResult> verify_conditional(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    auto tally = [](const std::vector<BinCheck>& bins, int& q, int& p) {
        q = p = 0;
        for (const auto& b : bins) {
            if (!b.qualifying) continue;
            ++q;
            if (b.pass) ++p;
        }
    };
    {
        PathwiseData d = make_pathwise_data(opt.seed + 40);
        const auto bins =
            conditional_representation_check(d.pe, d.rec, d.zt, 0.5, 32, -3.0, 3.0);
        maybe_write_bins(opt, "f8_bins_free_packet.csv", bins);
        int q, p;
        tally(bins, q, p);
        const double frac = q > 0 ? static_cast<double>(p) / q : 0.0;
        out.push_back(make_check("conditional-f8", frac >= 0.9, frac, 0.9,
                                 std::to_string(p) + "/" + std::to_string(q)));
    }
    {
        // same representation along oscillator paths with the coherent state
        const EvolutionRecord rec = schrodinger_evolve(
            coherent_state(default_grid(), 0.0, 1.0), harmonic_cfg(), 0.3);
        DriftTable drifts(rec);
        const PathEnsemble pe = simulate_forward(drifts, 20000, rec.dt(), opt.seed + 41);
        const WeightSeries zt = complex_weight(pe, drifts);
        const auto bins = conditional_representation_check(pe, rec, zt, 0.3, 32, -2.0, 3.0);
        maybe_write_bins(opt, "f8_bins_coherent.csv", bins);
        int q, p;
        tally(bins, q, p);
        const double frac = q > 0 ? static_cast<double>(p) / q : 0.0;
        out.push_back(make_check("conditional-f8-coherent", frac >= 0.9, frac, 0.9,
                                 std::to_string(p) + "/" + std::to_string(q)));
    }
    return out;
}

// --------------------------------------------------------------------- fk --

std::vector<CheckResult> verify_fk(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    const auto h1 = [](double x) { return std::exp(-x * x / 2.0); };
    const MCEstimate est = feynman_kac_estimate(0.0, 0.0, 1.0, Potential::harmonic(),
                                                h1, 100000, 1e-3, opt.seed + 50);
    const double target = std::exp(-0.5);
    out.push_back(make_check("fk-mc-ou", std::abs(est.value - target) <= 3.0 * est.stderr_,
                             est.value, target, "stderr=" + describe(est.stderr_)));

    // pathwise product identity along the h-process, fine steps
    GridSpec g{12.0, 256, Boundary::ClampDrift};
    PhysConfig cfg = harmonic_cfg();
    cfg.dt = 1e-4;
    const EvolutionRecord h_rec = make_record(
        [&](double x, double t) { return cplx{ou_eigen_h_value(x, t, 1.0), 0.0}; }, g, cfg,
        RecordKind::Heat, 0.0, 1.0);
    DriftTable h_drifts(h_rec);
    const PathEnsemble pe = simulate_forward(h_drifts, 10000, cfg.dt, opt.seed + 51);
    const WeightSeries z = girsanov_weight(pe, h_drifts);
    const ComplexField& h_t0 = h_rec.at(0);
    const ComplexField& h_t1 = h_rec.at(h_rec.n_times() - 1);
    long ok = 0;
    KahanSum zsum, zsq;
    for (int p = 0; p < pe.n_paths; ++p) {
        double vint = 0.0;
        double v_prev = cfg.potential(pe.pos(p, 0));
        for (int k = 1; k <= pe.n_steps; ++k) {
            const double v_now = cfg.potential(pe.pos(p, k));
            vint += 0.5 * (v_prev + v_now) * pe.dt;
            v_prev = v_now;
        }
        const double zval = z.weight(p, 0, pe.n_steps).real();
        const double lhs = interp(h_t0, pe.pos(p, 0)).real();
        const double rhs = interp(h_t1, pe.pos(p, pe.n_steps)).real() * std::exp(-vint) * zval;
        if (std::abs(lhs - rhs) <= 0.02 * lhs) ++ok;
        zsum.add(zval);
        zsq.add(zval * zval);
    }
    const double frac = static_cast<double>(ok) / pe.n_paths;
    out.push_back(make_check("fk2-pathwise", frac >= 0.95, frac, 0.95));

    const double zmean = zsum.sum / pe.n_paths;
    const double zvar = std::max(zsq.sum / pe.n_paths - zmean * zmean, 0.0);
    const double zse = std::sqrt(zvar / pe.n_paths);
    out.push_back(make_check("girsanov-martingale-mean", std::abs(zmean - 1.0) <= 3.0 * zse,
                             zmean, 1.0, "stderr=" + describe(zse)));
    return out;
}

// -------------------------------------------------------------- operators --

std::vector<CheckResult> verify_operators(const VerifyOptions&) {
    std::vector<CheckResult> out;
    const cplx a_schrod{0.0, 0.5};   // i hbar / 2m
    const cplx b_schrod{0.0, -1.0};  // -i / hbar

    const auto lem_q =
        product_solution_check(ground_record_fine(), coherent_record_fine(), a_schrod, b_schrod);
    out.push_back(make_check("product-solution-schrodinger", lem_q.pass, lem_q.max_residual,
                             lem_q.tolerance));

    GridSpec g = default_grid();
    PhysConfig cfg = harmonic_cfg();
    const auto u_heat = make_record(
        [](double x, double t) { return cplx{ou_eigen_h_value(x, t, 0.5), 0.0}; }, g, cfg,
        RecordKind::Heat, 0.0, 0.5);
    const auto th_heat = make_record(
        [](double x, double t) {
            return cplx{x * std::exp(-x * x / 2.0) * std::exp(-1.5 * (0.5 - t)), 0.0};
        },
        g, cfg, RecordKind::Heat, 0.0, 0.5);
    const auto lem_h = product_solution_check(u_heat, th_heat, cplx{-0.5, 0.0}, cplx{1.0, 0.0});
    out.push_back(make_check("product-solution-heat", lem_h.pass, lem_h.max_residual, lem_h.tolerance));

    const auto th2_g =
        conjugation_check(ground_record_fine(), TestFunction{1.2, 0, 0.7}, 0.25);
    out.push_back(make_check("conjugation-ground", th2_g.pass, th2_g.max_residual, th2_g.tolerance));
    const auto th2_c =
        conjugation_check(coherent_record_fine(), TestFunction{1.2, 1, 0.7}, 0.25);
    out.push_back(make_check("conjugation-coherent", th2_c.pass, th2_c.max_residual, th2_c.tolerance));

    const auto gst = ground_state_transform_check(harmonic_ground(g, 0.0), harmonic_cfg(),
                                                  TestFunction{1.2, 0, 0.0});
    out.push_back(make_check("ground-state-transform", gst.pass, gst.max_residual, gst.tolerance));

    const auto hj = hj_theta_check(ground_record_fine(), coherent_record_fine(), 0.25);
    out.push_back(make_check("hj-theta", hj.pass, hj.max_residual, hj.tolerance));
    return out;
}

// ---------------------------------------------------------------- kernels --

namespace {

// residual of the log of p_q under the bi-directional generator equation for
// the analytic free-packet record, with phase unwrapping in x and t; the
// drift is supplied in closed form so its own stencil error does not mask
// the identity being checked
double bdg_log_residual(const EvolutionRecord& rec, double y, double t,
                        const std::function<cplx(double, double)>& vq_fn) {
    const GridSpec& g = rec.grid;
    const double dt = rec.dt();
    const int n = g.n_points;
    const PhysConfig& cfg = rec.config;

    // evaluate only where the state amplitude supports the kernel ratio
    int j0 = 0, j1 = n - 1;
    while (j0 < n && g.node(j0) < -6.0 - 4.0 * g.dx()) ++j0;
    while (j1 > 0 && g.node(j1) > 6.0 + 4.0 * g.dx()) --j1;
    auto logfield = [&](double tt) {
        std::vector<cplx> lg(n, cplx{0.0, 0.0});
        double prev_arg = 0.0;
        for (int j = j0; j <= j1; ++j) {
            const cplx v = kernel_pq(rec.t0, y, tt, g.node(j), rec);
            double a = std::arg(v);
            if (j > j0) {
                while (a - prev_arg > kPi) a -= 2.0 * kPi;
                while (a - prev_arg < -kPi) a += 2.0 * kPi;
            }
            prev_arg = a;
            lg[j] = cplx{std::log(std::abs(v)), a};
        }
        return lg;
    };
    auto lm = logfield(t - dt);
    auto l0 = logfield(t);
    auto lp = logfield(t + dt);
    // align time slices nodewise into (-pi, pi] of the center slice
    for (int j = 0; j < n; ++j) {
        for (auto* s : {&lm, &lp}) {
            double a = (*s)[j].imag();
            while (a - l0[j].imag() > kPi) a -= 2.0 * kPi;
            while (a - l0[j].imag() < -kPi) a += 2.0 * kPi;
            (*s)[j] = cplx{(*s)[j].real(), a};
        }
    }

    ComplexField lf(g);
    lf.values = l0;
    const ComplexField dl = gradient(lf);
    const ComplexField ddl = laplacian(lf);

    const cplx ia{0.0, cfg.hbar / (2.0 * cfg.mass)};
    double worst = 0.0;
    for (int j = 2; j < n - 2; ++j) {
        if (std::abs(g.node(j)) > 6.0) continue;
        const cplx lt = (lp[j] - lm[j]) / (2.0 * dt);
        const cplx resid = lt + vq_fn(g.node(j), t) * dl.values[j] -
                           ia * (ddl.values[j] + dl.values[j] * dl.values[j]);
        worst = std::max(worst, std::abs(resid));
    }
    return worst;
}

}  // namespace

std::vector<CheckResult> verify_kernels(const VerifyOptions&) {
    std::vector<CheckResult> out;
    GridSpec g = default_grid();
    PhysConfig cfg = free_cfg();

    // drift-free kernel collapse for two different h solutions
    const auto h_flat = make_record([](double, double) { return cplx{1.0, 0.0}; }, g, cfg,
                                    RecordKind::Heat, 0.0, 0.5);
    const auto rep_flat = kernel_collapse_check(h_flat);
    out.push_back(make_check("kernel-collapse-flat", rep_flat.pass, rep_flat.max_residual,
                             rep_flat.tolerance));
    const double a = 0.5;
    const auto h_exp = make_record(
        [a](double x, double t) { return cplx{std::exp(a * x - 0.5 * a * a * t), 0.0}; }, g,
        cfg, RecordKind::Heat, 0.0, 0.5);
    const auto rep_exp = kernel_collapse_check(h_exp);
    out.push_back(make_check("kernel-collapse-exponential", rep_exp.pass, rep_exp.max_residual,
                             rep_exp.tolerance));

    // independence of psi p_q / psi0 across two packet widths
    // two extra steps so stencils in t have a node on each side of t = 0.5
    PhysConfig cfa = free_cfg();
    const auto recA = make_record(
        [&](double x, double t) { return free_packet_value(x, t, 0.0, 1.0, 1.0, cfa); }, g,
        cfa, RecordKind::Schrodinger, 0.0, 0.502);
    const auto recB = make_record(
        [&](double x, double t) { return free_packet_value(x, t, 0.0, 1.4, 1.0, cfa); }, g,
        cfa, RecordKind::Schrodinger, 0.0, 0.502);
    double worst = 0.0, worst_id = 0.0;
    const double t = 0.5;
    const ComplexField& psiA = recA.at(recA.index_of(t));
    const ComplexField& psiB = recB.at(recB.index_of(t));
    for (double y : {-1.0, 0.0, 1.0})
        for (double x = -4.0; x <= 4.0; x += 0.5) {
            const cplx K = kernel_K(0.0, y, t, x, cfa);
            const cplx prodA = interp(psiA, x) * kernel_pq(0.0, y, t, x, recA) /
                               interp(recA.at(0), y);
            const cplx prodB = interp(psiB, x) * kernel_pq(0.0, y, t, x, recB) /
                               interp(recB.at(0), y);
            worst = std::max(worst, std::abs(prodA - prodB));
            worst_id = std::max(worst_id, std::abs(prodA - K));
        }
    out.push_back(make_check("pq-independence", worst <= 1e-12, worst, 1e-12));
    out.push_back(make_check("pq-collapses-to-K", worst_id <= 1e-12, worst_id, 1e-12));

    // stencil residual of the generator equation on log p_q
    const auto vq_packet = [&](double x, double tt) {
        const cplx alpha{1.0, tt};
        return cplx{0.0, -1.0} * (cplx{-x, 1.0} / alpha);  // -i grad(log psi)
    };
    const double resid = bdg_log_residual(recA, 0.0, 0.5, vq_packet);
    out.push_back(make_check("pq-bdg-residual", resid <= 1e-3, resid, 1e-3));

    // Chapman-Kolmogorov for the Wiener kernel
    double worst_ck = 0.0;
    for (double y : {-1.0, 0.0, 1.5})
        for (double x : {-2.0, 0.0, 1.0}) {
            ComplexField inner(g);
            for (int j = 0; j < g.n_points; ++j)
                inner.values[j] = kernel_p(0.0, y, 0.5, g.node(j)) *
                                  kernel_p(0.5, g.node(j), 1.0, x);
            const double conv = quad(inner).real();
            worst_ck = std::max(worst_ck, std::abs(conv - kernel_p(0.0, y, 1.0, x)));
        }
    out.push_back(make_check("chapman-kolmogorov", worst_ck <= 1e-8, worst_ck, 1e-8));
    return out;
}

// --------------------------------------------------------------- negative --

std::vector<CheckResult> verify_negative(const VerifyOptions& opt) {
    std::vector<CheckResult> out;

    // forward conditional mean of d+wq is (1+i) u dt / sigma: nonzero
    // wherever u is, so the increments are not forward-martingale increments
    const EvolutionRecord& rec = ground_record();
    DriftTable drifts(rec);
    const PathEnsemble pe = simulate_forward(drifts, 20000, rec.dt(), opt.seed + 60);
    const auto bins = fqn_conditional_means(pe, drifts, 16, -2.0, 2.0);
    int checked = 0, detected = 0, matched = 0;
    for (const auto& b : bins) {
        if (b.count < 20000 || std::abs(b.center) < 1.0) continue;
        ++checked;
        if (std::abs(b.estimate) > 3.0 * b.stderr_) ++detected;
        if (std::abs(b.estimate - b.target) <= 3.0 * b.stderr_ + 1e-6) ++matched;
    }
    out.push_back(make_check("fqn-nonzero-detected", checked > 0 && detected == checked,
                             static_cast<double>(detected), static_cast<double>(checked)));
    out.push_back(make_check("fqn-value-matches", checked > 0 && matched == checked,
                             static_cast<double>(matched), static_cast<double>(checked)));

    // the weight statistics depend on the solution: two initial widths give
    // per-bin mean |Z| fields apart at 5 stderr somewhere
    PathwiseData dA = make_pathwise_data(opt.seed + 61, 1.0, 10000);
    PathwiseData dB = make_pathwise_data(opt.seed + 62, 1.4, 10000);
    const auto tvA = total_variation_check(dA.pe, dA.rec, dA.zt, 0.5, 24, -3.0, 3.0);
    const auto tvB = total_variation_check(dB.pe, dB.rec, dB.zt, 0.5, 24, -3.0, 3.0);
    double best_sep = 0.0;
    for (std::size_t b = 0; b < tvA.bins.size(); ++b) {
        const auto& ba = tvA.bins[b];
        const auto& bb = tvB.bins[b];
        if (!ba.qualifying || !bb.qualifying) continue;
        const double se = std::sqrt(ba.stderr_ * ba.stderr_ + bb.stderr_ * bb.stderr_);
        if (se == 0.0) continue;
        best_sep = std::max(best_sep,
                            std::abs(ba.estimate.real() - bb.estimate.real()) / se);
    }
    out.push_back(make_check("ztilde-solution-dependence", best_sep > 5.0, best_sep, 5.0));
    return out;
}

// ---------------------------------------------------------------- appendix --

std::vector<CheckResult> verify_appendix(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    PathRng rng(opt.seed + 70);
    bool bound_ok = true, polar_ok = true, minimal_ok = true, tv_def_ok = true;
    double worst_reassembly = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        const int cells = 1 + static_cast<int>(rng.uniform() * 40);
        FinitePartitionMeasure m;
        m.masses.resize(cells);
        for (auto& z : m.masses) {
            if (rng.uniform() < 0.1) {
                z = cplx{0.0, 0.0};
                continue;
            }
            z = cplx{rng.normal(), rng.normal()};
        }
        const double tv = finite_partition_tv(m);
        if (std::abs(m.total()) > tv + 1e-12) bound_ok = false;

        const auto pd = polar_decompose(m);
        double tv2 = 0.0;
        for (int c = 0; c < cells; ++c) {
            const cplx back = pd.unimodular[c] * pd.tv_masses[c];
            const double err = std::abs(back - m.masses[c]);
            worst_reassembly = std::max(worst_reassembly, err);
            if (err > 1e-14 * (1.0 + std::abs(m.masses[c]))) polar_ok = false;
            if (std::abs(std::abs(pd.unimodular[c]) - 1.0) > 1e-15) polar_ok = false;
            tv2 += pd.tv_masses[c];
        }
        if (std::abs(tv2 - tv) > 1e-12 * (1.0 + tv)) tv_def_ok = false;

        // any cellwise dominating measure weighs at least tv
        double lam = 0.0;
        for (int c = 0; c < cells; ++c) lam += std::abs(m.masses[c]) + std::abs(rng.normal());
        if (lam < tv - 1e-12) minimal_ok = false;
    }
    out.push_back(make_check("appendix-total-bound", bound_ok, bound_ok ? 1.0 : 0.0, 1.0));
    out.push_back(make_check("appendix-polar-reassembly", polar_ok, worst_reassembly, 1e-14));
    out.push_back(make_check("appendix-tv-minimality", minimal_ok, minimal_ok ? 1.0 : 0.0, 1.0));
    out.push_back(make_check("appendix-tv-definition", tv_def_ok, tv_def_ok ? 1.0 : 0.0, 1.0));
    return out;
}

// ------------------------------------------------------------------ driver --

std::vector<std::string> verify_suite_names() {
    return {"trotter", "born",      "nelson",  "qv",      "pathwise", "conditional",
            "fk",      "operators", "kernels", "negative", "appendix"};
}

std::vector<CheckResult> run_verify_suite(const std::string& name, const VerifyOptions& opt) {
    if (name == "trotter") return verify_trotter(opt);
    if (name == "born") return verify_born(opt);
    if (name == "nelson") return verify_nelson(opt);
    if (name == "qv") return verify_qv(opt);
    if (name == "pathwise") return verify_pathwise(opt);
    if (name == "conditional") return verify_conditional(opt);
    if (name == "fk") return verify_fk(opt);
    if (name == "operators") return verify_operators(opt);
    if (name == "kernels") return verify_kernels(opt);
    if (name == "negative") return verify_negative(opt);
    if (name == "appendix") return verify_appendix(opt);
    if (name == "all") {
        std::vector<CheckResult> all;
        for (const auto& n : verify_suite_names()) {
            auto r = run_verify_suite(n, opt);
            all.insert(all.end(), r.begin(), r.end());
        }
        return all;
    }
    throw std::invalid_argument("unknown verify suite: " + name);
}

}  // namespace smlab
