#include "smlab/pathfunc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smlab {

cplx WeightSeries::exponent(int path, int k0, int k1) const {
    if (k0 < 0 || k1 > n_steps || k0 > k1)
        throw std::out_of_range("WeightSeries: bad window");
    const std::size_t base = static_cast<std::size_t>(path) * n_steps;
    cplx s{0.0, 0.0};
    for (int k = k0; k < k1; ++k) s += increments[base + k];
    return s;
}

cplx WeightSeries::weight(int path, int k0, int k1) const {
    return std::exp(exponent(path, k0, k1));
}

WeightSeries girsanov_weight(const PathEnsemble& pe, const DriftTable& h_drifts) {
    if (pe.reverse) throw std::invalid_argument("girsanov_weight: needs a forward ensemble");
    const EvolutionRecord& rec = h_drifts.record();
    WeightSeries ws;
    ws.definition = "girsanov-Z";
    ws.t0 = pe.t0;
    ws.dt = pe.dt;
    ws.n_paths = pe.n_paths;
    ws.n_steps = pe.n_steps;
    ws.increments.resize(static_cast<std::size_t>(pe.n_paths) * pe.n_steps);
    for (int p = 0; p < pe.n_paths; ++p) {
        const std::size_t base = static_cast<std::size_t>(p) * pe.n_steps;
        for (int k = 0; k < pe.n_steps; ++k) {
            const double x = pe.pos(p, k);
            const double g = h_drifts.bplus(rec.nearest_index(pe.time(k)), x);
            const double dx = pe.pos(p, k + 1) - x;
            ws.increments[base + k] = cplx{0.5 * g * g * pe.dt - g * dx, 0.0};
        }
    }
    return ws;
}

MCEstimate feynman_kac_estimate(double x, double t, double t1,
                                const Potential& V, const std::function<double(double)>& h1,
                                int n_paths, double dt, std::uint64_t seed) {
    if (n_paths < 100) throw std::invalid_argument("feynman_kac_estimate: n_paths < 100");
    if (!(t1 > t)) throw std::invalid_argument("feynman_kac_estimate: need t1 > t");
    const int m = static_cast<int>(std::llround((t1 - t) / dt));
    if (m < 1) throw std::invalid_argument("feynman_kac_estimate: empty span");
    const double sq = std::sqrt(dt);
    KahanSum sum, sumsq;
    for (int p = 0; p < n_paths; ++p) {
        PathRng rng(per_path_seed(seed, p));
        double w = x;
        double vint = 0.0;
        double v_prev = V(w);
        for (int k = 0; k < m; ++k) {
            w += sq * rng.normal();
            const double v_now = V(w);
            vint += 0.5 * (v_prev + v_now) * dt;  // trapezoid along the path
            v_prev = v_now;
        }
        const double val = h1(w) * std::exp(-vint);
        sum.add(val);
        sumsq.add(val * val);
    }
    MCEstimate est;
    est.n_paths = n_paths;
    est.value = sum.sum / n_paths;
    const double var = std::max(sumsq.sum / n_paths - est.value * est.value, 0.0);
    est.stderr_ = std::sqrt(var / n_paths);
    return est;
}

WeightSeries complex_weight(const PathEnsemble& pe, const DriftTable& drifts) {
    if (pe.reverse) throw std::invalid_argument("complex_weight: needs a forward ensemble");
    if (!drifts.at(0).complete)
        throw std::invalid_argument("complex_weight: needs a complete drift table");
    const EvolutionRecord& rec = drifts.record();
    const PhysConfig& cfg = rec.config;
    const double moh = cfg.mass / cfg.hbar;
    const cplx wf{0.5, -0.5}, wb{0.5, 0.5};

    WeightSeries ws;
    ws.definition = "complex-Ztilde";
    ws.t0 = pe.t0;
    ws.dt = pe.dt;
    ws.n_paths = pe.n_paths;
    ws.n_steps = pe.n_steps;
    ws.increments.resize(static_cast<std::size_t>(pe.n_paths) * pe.n_steps);

    // increment k bundles the forward term at t_k with the backward term at
    // t_{k+1}; summing k0 <= k < k1 then covers [t_k0, t_k1] exactly, with the
    // one-sided ends standing in for the missing half-weights.
    auto vq_at = [&](int k, double x) {
        const int ri = rec.nearest_index(pe.time(k));
        const DriftFields& f = drifts.at(ri);
        return cplx{interp_real(f.v, f.grid, x), -interp_real(f.u, f.grid, x)};
    };
    for (int p = 0; p < pe.n_paths; ++p) {
        const std::size_t base = static_cast<std::size_t>(p) * pe.n_steps;
        for (int k = 0; k < pe.n_steps; ++k) {
            const double x0 = pe.pos(p, k);
            const double x1 = pe.pos(p, k + 1);
            const double dx = x1 - x0;
            const cplx vq0 = vq_at(k, x0);
            const cplx vq1 = vq_at(k + 1, x1);
            const cplx iqm{0.0, moh};
            const cplx fwd = iqm * vq0 * dx - 0.5 * iqm * vq0 * vq0 * pe.dt;
            const cplx bwd = iqm * vq1 * dx - 0.5 * iqm * vq1 * vq1 * pe.dt;
            ws.increments[base + k] = wf * fwd + wb * bwd;
        }
    }
    return ws;
}

namespace {

// exp(-(i/hbar) * trapezoid of V along the path over [0, k1])
cplx potential_phase(const PathEnsemble& pe, const PhysConfig& cfg, int p, int k1) {
    if (cfg.potential.is_free()) return cplx{1.0, 0.0};
    double vint = 0.0;
    double v_prev = cfg.potential(pe.pos(p, 0));
    for (int k = 1; k <= k1; ++k) {
        const double v_now = cfg.potential(pe.pos(p, k));
        vint += 0.5 * (v_prev + v_now) * pe.dt;
        v_prev = v_now;
    }
    return std::exp(cplx{0.0, -vint / cfg.hbar});
}

}  // namespace

std::vector<BinCheck> conditional_representation_check(const PathEnsemble& pe,
                                                       const EvolutionRecord& rec,
                                                       const WeightSeries& zt, double t,
                                                       int n_bins, double x_min, double x_max) {
    const int kt = static_cast<int>(std::llround((t - pe.t0) / pe.dt));
    if (kt < 1 || kt > pe.n_steps)
        throw std::invalid_argument("conditional_representation_check: t outside ensemble");
    const ComplexField& psi0 = rec.at(0);
    const ComplexField& psit = rec.at(rec.index_of(t));
    const double w = (x_max - x_min) / n_bins;

    std::vector<KahanSumC> sums(n_bins);
    std::vector<KahanSum> sq(n_bins);
    std::vector<long> counts(n_bins, 0);
    for (int p = 0; p < pe.n_paths; ++p) {
        const double xt = pe.pos(p, kt);
        const int b = static_cast<int>(std::floor((xt - x_min) / w));
        if (b < 0 || b >= n_bins) continue;
        const cplx val = interp(psi0, pe.pos(p, 0)) *
                         potential_phase(pe, rec.config, p, kt) * zt.weight(p, 0, kt);
        sums[b].add(val);
        sq[b].add(std::norm(val));
        ++counts[b];
    }

    std::vector<BinCheck> out(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        BinCheck& bc = out[b];
        bc.center = x_min + (b + 0.5) * w;
        bc.count = counts[b];
        bc.qualifying = counts[b] >= 200;
        bc.target = interp(psit, bc.center);
        // largest deviation of psi(.,t) from its bin-center value inside the bin
        const cplx le = interp(psit, x_min + b * w);
        const cplx re = interp(psit, x_min + (b + 1) * w);
        bc.bias_bound = std::max(std::abs(le - bc.target), std::abs(re - bc.target));
        if (counts[b] > 0) {
            const double n = counts[b];
            bc.estimate = sums[b].value() / n;
            const double var = std::max(sq[b].sum / n - std::norm(bc.estimate), 0.0);
            bc.stderr_ = std::sqrt(var / n);
            bc.pass = std::abs(bc.estimate - bc.target) <= 3.0 * bc.stderr_ + bc.bias_bound;
        }
    }
    return out;
}

TotalVariationReport total_variation_check(const PathEnsemble& pe, const EvolutionRecord& rec,
                                           const WeightSeries& zt, double t,
                                           int n_bins, double x_min, double x_max) {
    const int kt = static_cast<int>(std::llround((t - pe.t0) / pe.dt));
    if (kt < 1 || kt > pe.n_steps)
        throw std::invalid_argument("total_variation_check: t outside ensemble");
    const ComplexField& psi0 = rec.at(0);
    const ComplexField& psit = rec.at(rec.index_of(t));

    TotalVariationReport rep;
    ComplexField rho0half(rec.grid), abs0(rec.grid);
    for (int j = 0; j < rec.grid.n_points; ++j) {
        rho0half.values[j] = std::abs(psi0.values[j]);
        abs0.values[j] = std::abs(psi0.values[j]);
    }
    rep.mass_integral_ref = quad(rho0half).real();
    rep.l1_psi0 = quad(abs0).real();

    const double w = (x_max - x_min) / n_bins;
    std::vector<KahanSum> sums(n_bins), sq(n_bins);
    std::vector<long> counts(n_bins, 0);
    KahanSum mass, mass_sq;
    long within = 0;
    for (int p = 0; p < pe.n_paths; ++p) {
        const double x0 = pe.pos(p, 0);
        const double xt = pe.pos(p, kt);
        const double absz = std::abs(zt.weight(p, 0, kt));
        const double target = std::abs(interp(psit, xt)) / std::abs(interp(psi0, x0));
        if (std::abs(absz - target) <= rep.per_path_tolerance * target) ++within;
        const double mi = absz / std::abs(interp(psit, xt));
        mass.add(mi);
        mass_sq.add(mi * mi);
        const int b = static_cast<int>(std::floor((xt - x_min) / w));
        if (b >= 0 && b < n_bins) {
            const double val = absz * std::abs(interp(psi0, x0));
            sums[b].add(val);
            sq[b].add(val * val);
            ++counts[b];
        }
    }
    rep.frac_within = static_cast<double>(within) / pe.n_paths;
    rep.mass_integral = mass.sum / pe.n_paths;
    const double mvar = std::max(mass_sq.sum / pe.n_paths -
                                 rep.mass_integral * rep.mass_integral, 0.0);
    rep.mass_integral_stderr = std::sqrt(mvar / pe.n_paths);

    rep.bins.resize(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        BinCheck& bc = rep.bins[b];
        bc.center = x_min + (b + 0.5) * w;
        bc.count = counts[b];
        bc.qualifying = counts[b] >= 200;
        bc.target = std::abs(interp(psit, bc.center));
        const double le = std::abs(interp(psit, x_min + b * w));
        const double re = std::abs(interp(psit, x_min + (b + 1) * w));
        bc.bias_bound = std::max(std::abs(le - bc.target.real()),
                                 std::abs(re - bc.target.real()));
        if (counts[b] > 0) {
            const double n = counts[b];
            bc.estimate = cplx{sums[b].sum / n, 0.0};
            const double m = sums[b].sum / n;
            const double var = std::max(sq[b].sum / n - m * m, 0.0);
            bc.stderr_ = std::sqrt(var / n);
            bc.pass = std::abs(bc.estimate - bc.target) <= 3.0 * bc.stderr_ + bc.bias_bound;
        }
    }
    rep.pass = rep.frac_within >= 0.95;
    return rep;
}

cplx FinitePartitionMeasure::total() const {
    KahanSumC s;
    for (const auto& m : masses) s.add(m);
    return s.value();
}

double finite_partition_tv(const FinitePartitionMeasure& m) {
    KahanSum s;
    for (const auto& z : m.masses) s.add(std::abs(z));
    return s.sum;
}

PolarDecomposition polar_decompose(const FinitePartitionMeasure& m) {
    PolarDecomposition pd;
    pd.unimodular.reserve(m.masses.size());
    pd.tv_masses.reserve(m.masses.size());
    for (const auto& z : m.masses) {
        const double a = std::abs(z);
        pd.tv_masses.push_back(a);
        pd.unimodular.push_back(a == 0.0 ? cplx{1.0, 0.0} : z / a);
    }
    return pd;
}

}  // namespace smlab
