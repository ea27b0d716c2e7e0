#include "smlab/sde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smlab {

GridSampler::GridSampler(const std::vector<double>& rho, const GridSpec& g) : grid_(g) {
    const int n = static_cast<int>(rho.size());
    if (n != g.n_points) throw std::invalid_argument("GridSampler: size mismatch");
    cdf_.resize(n);
    cdf_[0] = 0.0;
    const double dx = g.dx();
    for (int j = 1; j < n; ++j)
        cdf_[j] = cdf_[j - 1] + 0.5 * dx * (std::max(rho[j - 1], 0.0) + std::max(rho[j], 0.0));
    const double total = cdf_[n - 1];
    if (!(total > 0.0)) throw std::invalid_argument("GridSampler: density has no mass");
    for (double& c : cdf_) c /= total;
}

double GridSampler::invert(double u) const {
    const int n = static_cast<int>(cdf_.size());
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (cdf_[mid] <= u ? lo : hi) = mid;
    }
    const double span = cdf_[hi] - cdf_[lo];
    const double w = span > 0.0 ? (u - cdf_[lo]) / span : 0.0;
    return grid_.node(lo) + w * grid_.dx();
}

namespace {

void check_sde_args(const DriftTable& drifts, double dt_sde) {
    if (!(dt_sde > 0.0)) throw std::invalid_argument("simulate: dt_sde must be > 0");
    const double dt_rec = drifts.record().dt();
    if (dt_sde < dt_rec * (1.0 - 1e-9))
        throw std::invalid_argument("simulate: record dt must be <= SDE dt");
}

int sde_steps(const EvolutionRecord& rec, double dt_sde) {
    const double span = rec.t1() - rec.t0;
    const int m = static_cast<int>(std::llround(span / dt_sde));
    if (m < 1 || std::abs(m * dt_sde - span) > 0.25 * dt_sde)
        throw std::invalid_argument("simulate: record span must be a multiple of dt_sde");
    return m;
}

}  // namespace

PathEnsemble simulate_forward(const EvolutionRecord& rec, int n_paths, double dt_sde,
                              std::uint64_t master_seed) {
    DriftTable drifts(rec);
    return simulate_forward(drifts, n_paths, dt_sde, master_seed);
}

PathEnsemble simulate_forward(const DriftTable& drifts, int n_paths, double dt_sde,
                              std::uint64_t master_seed) {
    check_sde_args(drifts, dt_sde);
    const EvolutionRecord& rec = drifts.record();
    const int m = sde_steps(rec, dt_sde);

    PathEnsemble pe;
    pe.master_seed = master_seed;
    pe.n_paths = n_paths;
    pe.n_steps = m;
    pe.t0 = rec.t0;
    pe.dt = dt_sde;
    pe.half_width = rec.grid.half_width;
    pe.positions.resize(static_cast<std::size_t>(n_paths) * (m + 1));

    GridSampler init(drifts.at(0).rho, rec.grid);
    const double sig = std::sqrt(drifts.at(0).sigma2);
    const double sq = sig * std::sqrt(dt_sde);
    const double L = pe.half_width;
    long clamps = 0;
    for (int p = 0; p < n_paths; ++p) {
        PathRng rng(pe.path_seed(p));
        double x = init.draw(rng);
        pe.pos(p, 0) = x;
        for (int k = 0; k < m; ++k) {
            const int ri = rec.nearest_index(pe.time(k));
            x += drifts.bplus(ri, x) * dt_sde + sq * rng.normal();
            if (x > L) { x = L; ++clamps; }
            if (x < -L) { x = -L; ++clamps; }
            pe.pos(p, k + 1) = x;
        }
    }
    pe.clamp_count = clamps;
    return pe;
}

PathEnsemble simulate_reverse(const EvolutionRecord& rec, int n_paths, double dt_sde,
                              std::uint64_t master_seed) {
    DriftTable drifts(rec);
    return simulate_reverse(drifts, n_paths, dt_sde, master_seed);
}

PathEnsemble simulate_reverse(const DriftTable& drifts, int n_paths, double dt_sde,
                              std::uint64_t master_seed) {
    check_sde_args(drifts, dt_sde);
    const EvolutionRecord& rec = drifts.record();
    if (!drifts.at(0).complete)
        throw std::invalid_argument("simulate_reverse: needs a complete drift table");
    const int m = sde_steps(rec, dt_sde);

    PathEnsemble pe;
    pe.master_seed = master_seed;
    pe.n_paths = n_paths;
    pe.n_steps = m;
    pe.t0 = rec.t0;
    pe.dt = dt_sde;
    pe.half_width = rec.grid.half_width;
    pe.reverse = true;
    pe.positions.resize(static_cast<std::size_t>(n_paths) * (m + 1));

    GridSampler init(drifts.at(drifts.n_times() - 1).rho, rec.grid);
    const double sig = std::sqrt(drifts.at(0).sigma2);
    const double sq = sig * std::sqrt(dt_sde);
    const double L = pe.half_width;
    long clamps = 0;
    for (int p = 0; p < n_paths; ++p) {
        PathRng rng(pe.path_seed(p));
        double x = init.draw(rng);
        pe.pos(p, m) = x;
        for (int k = m; k > 0; --k) {
            const int ri = rec.nearest_index(pe.time(k));
            x -= drifts.bminus(ri, x) * dt_sde + sq * rng.normal();
            if (x > L) { x = L; ++clamps; }
            if (x < -L) { x = -L; ++clamps; }
            pe.pos(p, k - 1) = x;
        }
    }
    pe.clamp_count = clamps;
    return pe;
}

PathEnsemble simulate_custom(const std::function<double(double, double)>& drift,
                             const std::function<double(PathRng&)>& draw_initial,
                             double sigma, double half_width, double t0, double t1,
                             int n_paths, double dt_sde, std::uint64_t master_seed) {
    if (!(dt_sde > 0.0)) throw std::invalid_argument("simulate: dt_sde must be > 0");
    const int m = static_cast<int>(std::llround((t1 - t0) / dt_sde));
    if (m < 1) throw std::invalid_argument("simulate: empty time span");

    PathEnsemble pe;
    pe.master_seed = master_seed;
    pe.n_paths = n_paths;
    pe.n_steps = m;
    pe.t0 = t0;
    pe.dt = dt_sde;
    pe.half_width = half_width;
    pe.positions.resize(static_cast<std::size_t>(n_paths) * (m + 1));
    const double sq = sigma * std::sqrt(dt_sde);
    long clamps = 0;
    for (int p = 0; p < n_paths; ++p) {
        PathRng rng(pe.path_seed(p));
        double x = draw_initial(rng);
        pe.pos(p, 0) = x;
        for (int k = 0; k < m; ++k) {
            x += drift(x, pe.time(k)) * dt_sde + sq * rng.normal();
            if (x > half_width) { x = half_width; ++clamps; }
            if (x < -half_width) { x = -half_width; ++clamps; }
            pe.pos(p, k + 1) = x;
        }
    }
    pe.clamp_count = clamps;
    return pe;
}

QuantumNoise::QuantumNoise(const PathEnsemble& pe, const DriftTable& drifts)
    : pe_(&pe), drifts_(&drifts) {
    if (pe.reverse)
        throw std::invalid_argument("QuantumNoise: needs a forward ensemble");
    if (!drifts.at(0).complete)
        throw std::invalid_argument("QuantumNoise: needs a complete drift table");
    if (pe.n_steps < 2)
        throw std::invalid_argument("QuantumNoise: no interior times");
    sigma_ = std::sqrt(drifts.at(0).sigma2);
}

int QuantumNoise::rec_index(int k) const {
    return drifts_->record().nearest_index(pe_->time(k));
}

double QuantumNoise::dwp(int path, int k) const {
    const double x = pe_->pos(path, k);
    const double dxf = pe_->pos(path, k + 1) - x;
    return (dxf - drifts_->bplus(rec_index(k), x) * pe_->dt) / sigma_;
}

double QuantumNoise::dwm(int path, int k) const {
    const double x = pe_->pos(path, k);
    const double dxb = x - pe_->pos(path, k - 1);
    return (dxb - drifts_->bminus(rec_index(k), x) * pe_->dt) / sigma_;
}

cplx QuantumNoise::dwq(int path, int k) const {
    const cplx wf{0.5, -0.5}, wb{0.5, 0.5};
    return wf * dwp(path, k) + wb * dwm(path, k);
}

cplx QuantumNoise::dwq_forward(int path, int k) const {
    // forward increments of both noises over [t_k, t_{k+1}]; b- at the right
    // endpoint as the backward representation evaluates it
    const double x = pe_->pos(path, k);
    const double xn = pe_->pos(path, k + 1);
    const double dxf = xn - x;
    const double dwp_f = (dxf - drifts_->bplus(rec_index(k), x) * pe_->dt) / sigma_;
    const double dwm_f = (dxf - drifts_->bminus(rec_index(k + 1), xn) * pe_->dt) / sigma_;
    const cplx wf{0.5, -0.5}, wb{0.5, 0.5};
    return wf * dwp_f + wb * dwm_f;
}

cplx QuantumNoise::dwq_backward(int path, int k) const {
    const double x = pe_->pos(path, k);
    const double xp = pe_->pos(path, k - 1);
    const double dxb = x - xp;
    const double dwp_b = (dxb - drifts_->bplus(rec_index(k - 1), xp) * pe_->dt) / sigma_;
    const double dwm_b = (dxb - drifts_->bminus(rec_index(k), x) * pe_->dt) / sigma_;
    const cplx wf{0.5, -0.5}, wb{0.5, 0.5};
    return wf * dwp_b + wb * dwm_b;
}

namespace {

// Bilateral square of the quantum-noise increment at one interior time:
// (1-i)/2 (d+wq)^2 - (1+i)/2 (d-wq)^2.  Its conditional mean is -i dt.
cplx qv_increment(const QuantumNoise& qn, int path, int k) {
    const cplx f = qn.dwq_forward(path, k);
    const cplx b = qn.dwq_backward(path, k);
    const cplx wf{0.5, -0.5}, wb{0.5, 0.5};
    return wf * f * f - wb * b * b;
}

QVReport qv_from_noise(const QuantumNoise& qn) {
    const PathEnsemble& pe = qn.ensemble();
    KahanSumC total;
    KahanSum sq_re, sq_im;
    for (int p = 0; p < pe.n_paths; ++p) {
        KahanSumC per_path;
        for (int k = qn.first_interior(); k <= qn.last_interior(); ++k)
            per_path.add(qv_increment(qn, p, k));
        const cplx z = per_path.value();
        total.add(z);
        sq_re.add(z.real() * z.real());
        sq_im.add(z.imag() * z.imag());
    }
    QVReport rep;
    rep.n_paths = pe.n_paths;
    rep.dt = pe.dt;
    rep.sum = total.value() / static_cast<double>(pe.n_paths);
    const double span = (qn.last_interior() - qn.first_interior() + 1) * pe.dt;
    rep.target = cplx{0.0, -span};
    rep.abs_error = std::abs(rep.sum - rep.target);
    const double n = pe.n_paths;
    const double mr = rep.sum.real(), mi = rep.sum.imag();
    const double var = (sq_re.sum / n - mr * mr) + (sq_im.sum / n - mi * mi);
    rep.stderr_ = std::sqrt(std::max(var, 0.0) / n);
    return rep;
}

}  // namespace

QVReport quadratic_variation(const PathEnsemble& pe, const DriftTable& drifts) {
    QuantumNoise qn(pe, drifts);
    return qv_from_noise(qn);
}

QVReport quadratic_variation_streaming(const DriftTable& drifts, int n_paths,
                                       double dt_sde, std::uint64_t master_seed) {
    check_sde_args(drifts, dt_sde);
    const EvolutionRecord& rec = drifts.record();
    const int m = sde_steps(rec, dt_sde);
    if (m < 2) throw std::invalid_argument("quadratic_variation: no interior times");
    GridSampler init(drifts.at(0).rho, rec.grid);
    const double sig = std::sqrt(drifts.at(0).sigma2);
    const double sq = sig * std::sqrt(dt_sde);
    const double L = rec.grid.half_width;
    const cplx wf{0.5, -0.5}, wb{0.5, 0.5};

    KahanSumC total;
    KahanSum sq_re, sq_im;
    for (int p = 0; p < n_paths; ++p) {
        PathRng rng(per_path_seed(master_seed, p));
        double xm = 0.0, x = init.draw(rng), xp = 0.0;
        KahanSumC per_path;
        for (int k = 0; k < m; ++k) {
            const int ri = rec.nearest_index(rec.t0 + k * dt_sde);
            xp = x + drifts.bplus(ri, x) * dt_sde + sq * rng.normal();
            xp = std::clamp(xp, -L, L);
            if (k >= 1) {
                const int rim = rec.nearest_index(rec.t0 + (k - 1) * dt_sde);
                const int rip = rec.nearest_index(rec.t0 + (k + 1) * dt_sde);
                const double dxf = xp - x, dxb = x - xm;
                const cplx dwq_f =
                    wf * ((dxf - drifts.bplus(ri, x) * dt_sde) / sig) +
                    wb * ((dxf - drifts.bminus(rip, xp) * dt_sde) / sig);
                const cplx dwq_b =
                    wf * ((dxb - drifts.bplus(rim, xm) * dt_sde) / sig) +
                    wb * ((dxb - drifts.bminus(ri, x) * dt_sde) / sig);
                per_path.add(wf * dwq_f * dwq_f - wb * dwq_b * dwq_b);
            }
            xm = x;
            x = xp;
        }
        const cplx z = per_path.value();
        total.add(z);
        sq_re.add(z.real() * z.real());
        sq_im.add(z.imag() * z.imag());
    }
    QVReport rep;
    rep.n_paths = n_paths;
    rep.dt = dt_sde;
    rep.sum = total.value() / static_cast<double>(n_paths);
    rep.target = cplx{0.0, -(m - 1) * dt_sde};
    rep.abs_error = std::abs(rep.sum - rep.target);
    const double n = n_paths;
    const double mr = rep.sum.real(), mi = rep.sum.imag();
    const double var = (sq_re.sum / n - mr * mr) + (sq_im.sum / n - mi * mi);
    rep.stderr_ = std::sqrt(std::max(var, 0.0) / n);
    return rep;
}

std::vector<DriftBin> conditional_drift_estimate(const PathEnsemble& pe,
                                                 const DriftTable& drifts,
                                                 Direction dir, double t, int n_bins,
                                                 double x_min, double x_max) {
    if (n_bins < 1) throw std::invalid_argument("conditional_drift_estimate: n_bins");
    const int k = static_cast<int>(std::llround((t - pe.t0) / pe.dt));
    if (k < 1 || k > pe.n_steps - 1)
        throw std::invalid_argument("conditional_drift_estimate: t must be interior");
    const double w = (x_max - x_min) / n_bins;
    std::vector<KahanSum> sums(n_bins), sqs(n_bins);
    std::vector<long> counts(n_bins, 0);
    for (int p = 0; p < pe.n_paths; ++p) {
        const double x = pe.pos(p, k);
        const int b = static_cast<int>(std::floor((x - x_min) / w));
        if (b < 0 || b >= n_bins) continue;
        const double d = dir == Direction::Forward ? pe.pos(p, k + 1) - x
                                                   : x - pe.pos(p, k - 1);
        const double est = d / pe.dt;
        sums[b].add(est);
        sqs[b].add(est * est);
        ++counts[b];
    }
    const int ri = drifts.record().nearest_index(t);
    std::vector<DriftBin> out(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        DriftBin& db = out[b];
        db.center = x_min + (b + 0.5) * w;
        db.count = counts[b];
        db.qualifying = counts[b] >= 50;
        if (counts[b] > 0) {
            const double n = counts[b];
            db.estimate = sums[b].sum / n;
            const double var = std::max(sqs[b].sum / n - db.estimate * db.estimate, 0.0);
            db.stderr_ = std::sqrt(var / n);
        }
        db.target = dir == Direction::Forward ? drifts.bplus(ri, db.center)
                                              : drifts.bminus(ri, db.center);
    }
    return out;
}

std::vector<FqnBin> fqn_conditional_means(const PathEnsemble& pe, const DriftTable& drifts,
                                          int n_bins, double x_min, double x_max) {
    QuantumNoise qn(pe, drifts);
    const double w = (x_max - x_min) / n_bins;
    std::vector<KahanSumC> sums(n_bins);
    std::vector<KahanSum> usums(n_bins), sq(n_bins);
    std::vector<long> counts(n_bins, 0);
    const EvolutionRecord& rec = drifts.record();
    for (int p = 0; p < pe.n_paths; ++p) {
        for (int k = 1; k <= pe.n_steps - 1; ++k) {
            const double x = pe.pos(p, k);
            const int b = static_cast<int>(std::floor((x - x_min) / w));
            if (b < 0 || b >= n_bins) continue;
            const cplx z = qn.dwq_forward(p, k);
            sums[b].add(z);
            sq.at(b).add(std::norm(z));
            usums[b].add(drifts.u_at(rec.nearest_index(pe.time(k)), x));
            ++counts[b];
        }
    }
    const double sig = std::sqrt(drifts.at(0).sigma2);
    std::vector<FqnBin> out(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        FqnBin& fb = out[b];
        fb.center = x_min + (b + 0.5) * w;
        fb.count = counts[b];
        if (counts[b] > 0) {
            const double n = counts[b];
            fb.estimate = sums[b].value() / n;
            fb.target = cplx{1.0, 1.0} * (usums[b].sum / n) * pe.dt / sig;
            const double var = std::max(sq[b].sum / n - std::norm(fb.estimate), 0.0);
            fb.stderr_ = std::sqrt(var / n);
        }
    }
    return out;
}

std::vector<FqnBin> k10_semidifference(const PathEnsemble& pe, const DriftTable& drifts,
                                       int n_bins, double x_min, double x_max) {
    QuantumNoise qn(pe, drifts);
    const double w = (x_max - x_min) / n_bins;
    std::vector<KahanSum> sums(n_bins), usums(n_bins), sq(n_bins);
    std::vector<long> counts(n_bins, 0);
    const EvolutionRecord& rec = drifts.record();
    const double sig = std::sqrt(drifts.at(0).sigma2);
    // same-interval pairing: d+w+(t_k) against d-w-(t_{k+1})
    for (int p = 0; p < pe.n_paths; ++p) {
        for (int k = 1; k <= pe.n_steps - 2; ++k) {
            const double x = pe.pos(p, k);
            const int b = static_cast<int>(std::floor((x - x_min) / w));
            if (b < 0 || b >= n_bins) continue;
            const double semi = 0.5 * sig * (qn.dwp(p, k) - qn.dwm(p, k + 1));
            sums[b].add(semi);
            sq[b].add(semi * semi);
            usums[b].add(drifts.u_at(rec.nearest_index(pe.time(k)), x));
            ++counts[b];
        }
    }
    std::vector<FqnBin> out(n_bins);
    for (int b = 0; b < n_bins; ++b) {
        FqnBin& fb = out[b];
        fb.center = x_min + (b + 0.5) * w;
        fb.count = counts[b];
        if (counts[b] > 0) {
            const double n = counts[b];
            fb.estimate = cplx{sums[b].sum / n, 0.0};
            fb.target = cplx{-(usums[b].sum / n) * pe.dt, 0.0};
            const double m = sums[b].sum / n;
            const double var = std::max(sq[b].sum / n - m * m, 0.0);
            fb.stderr_ = std::sqrt(var / n);
        }
    }
    return out;
}

double born_tv_distance(const PathEnsemble& pe, const std::vector<double>& rho,
                        const GridSpec& g, int n_bins, double x_min, double x_max) {
    // cumulative of rho on the lattice, interpolated at bin edges
    const int n = g.n_points;
    std::vector<double> cum(n, 0.0);
    const double dx = g.dx();
    for (int j = 1; j < n; ++j) cum[j] = cum[j - 1] + 0.5 * dx * (rho[j - 1] + rho[j]);
    const double total = cum[n - 1];
    auto cum_at = [&](double x) {
        if (x <= -g.half_width) return 0.0;
        if (x >= g.half_width) return total;
        const double s = (x + g.half_width) / dx;
        const int j = std::min(static_cast<int>(s), n - 2);
        const double w = s - j;
        return (1.0 - w) * cum[j] + w * cum[j + 1];
    };

    const double w = (x_max - x_min) / n_bins;
    std::vector<long> counts(n_bins, 0);
    long below = 0, above = 0;
    const int k = pe.n_steps;
    for (int p = 0; p < pe.n_paths; ++p) {
        const double x = pe.pos(p, k);
        if (x < x_min) { ++below; continue; }
        if (x >= x_max) { ++above; continue; }
        ++counts[static_cast<int>((x - x_min) / w)];
    }
    double tv = 0.0;
    const double n_inv = 1.0 / pe.n_paths;
    for (int b = 0; b < n_bins; ++b) {
        const double p_hat = counts[b] * n_inv;
        const double p_ref = (cum_at(x_min + (b + 1) * w) - cum_at(x_min + b * w)) / total;
        tv += std::abs(p_hat - p_ref);
    }
    tv += std::abs(below * n_inv - cum_at(x_min) / total);
    tv += std::abs(above * n_inv - (total - cum_at(x_max)) / total);
    return 0.5 * tv;
}

}  // namespace smlab
