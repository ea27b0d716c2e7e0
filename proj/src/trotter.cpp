#include "smlab/trotter.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smlab/fields.hpp"

namespace smlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// In-place iterative radix-2 FFT (power-of-two length).
void fft(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? -1.0 : 1.0);
        const cplx wl{std::cos(ang), std::sin(ang)};
        for (std::size_t i = 0; i < n; i += len) {
            cplx w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& z : a) z /= static_cast<double>(n);
}

// out[i] = sum_j row[i - j + N - 1] * src[j], i = 0..N-1.  Direct evaluation
// for small N, zero-padded FFT convolution (same numbers to roundoff) above.
std::vector<cplx> apply_kernel_row(const std::vector<cplx>& row, const std::vector<cplx>& src) {
    const int n = static_cast<int>(src.size());
    if (n <= 1536) {
        std::vector<cplx> out(n);
        for (int i = 0; i < n; ++i) {
            cplx s{0.0, 0.0};
            const cplx* r = row.data() + (i + n - 1);
            for (int j = 0; j < n; ++j) s += r[-j] * src[j];
            out[i] = s;
        }
        return out;
    }
    std::size_t m = 1;
    while (m < row.size() + src.size()) m <<= 1;
    std::vector<cplx> fa(m, cplx{0.0, 0.0}), fb(m, cplx{0.0, 0.0});
    std::copy(row.begin(), row.end(), fa.begin());
    std::copy(src.begin(), src.end(), fb.begin());
    fft(fa, false);
    fft(fb, false);
    for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
    fft(fa, true);
    std::vector<cplx> out(n);
    for (int i = 0; i < n; ++i) out[i] = fa[i + n - 1];
    return out;
}

std::vector<cplx> weighted(const ComplexField& f) {
    std::vector<cplx> w = f.values;
    const double dx = f.grid.dx();
    for (auto& v : w) v *= dx;
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

ComplexField kernel_slice(const ComplexField& f, double dt_slice, const PhysConfig& cfg,
                          TrotterKind kind) {
    const int n = f.size();
    const double dx = f.grid.dx();
    std::vector<cplx> row(2 * n - 1);
    if (kind == TrotterKind::Quantum) {
        const cplx pref = 1.0 / std::sqrt(cplx{0.0, 2.0 * kPi * cfg.hbar * dt_slice / cfg.mass});
        const double c = cfg.mass / (2.0 * cfg.hbar * dt_slice);
        for (int d = -(n - 1); d <= n - 1; ++d) {
            const double dist = d * dx;
            row[d + n - 1] = pref * std::exp(cplx{0.0, c * dist * dist});
        }
    } else {
        const double pref = 1.0 / std::sqrt(2.0 * kPi * dt_slice);
        const double c = 1.0 / (2.0 * dt_slice);
        for (int d = -(n - 1); d <= n - 1; ++d) {
            const double dist = d * dx;
            row[d + n - 1] = pref * std::exp(-c * dist * dist);
        }
    }
    ComplexField out(f.grid, f.time_tag);
    out.values = apply_kernel_row(row, weighted(f));
    return out;
}

void multiply_potential(ComplexField& f, double dt_slice, const PhysConfig& cfg,
                        TrotterKind kind) {
    for (int j = 0; j < f.size(); ++j) {
        const double v = cfg.potential(f.grid.node(j));
        f.values[j] *= kind == TrotterKind::Quantum
                           ? std::exp(cplx{0.0, -v * dt_slice / cfg.hbar})
                           : cplx{std::exp(-v * dt_slice), 0.0};
    }
}

}  // namespace

ComplexField trotter_step_quantum(const ComplexField& psi, double dt_slice,
                                  const PhysConfig& cfg, PotentialOrdering ord) {
    psi.validate();
    if (!(dt_slice > 0.0)) throw std::invalid_argument("trotter_step_quantum: dt_slice <= 0");
    if (ord == PotentialOrdering::PreStep) {
        ComplexField pre = psi;
        multiply_potential(pre, dt_slice, cfg, TrotterKind::Quantum);
        return kernel_slice(pre, dt_slice, cfg, TrotterKind::Quantum);
    }
    ComplexField out = kernel_slice(psi, dt_slice, cfg, TrotterKind::Quantum);
    multiply_potential(out, dt_slice, cfg, TrotterKind::Quantum);
    return out;
}

ComplexField trotter_step_heat(const ComplexField& h, double dt_slice,
                               const PhysConfig& cfg, PotentialOrdering ord,
                               long* negative_clips) {
    h.validate();
    if (!(dt_slice > 0.0)) throw std::invalid_argument("trotter_step_heat: dt_slice <= 0");
    ComplexField out;
    if (ord == PotentialOrdering::PreStep) {
        ComplexField pre = h;
        multiply_potential(pre, dt_slice, cfg, TrotterKind::Heat);
        out = kernel_slice(pre, dt_slice, cfg, TrotterKind::Heat);
    } else {
        out = kernel_slice(h, dt_slice, cfg, TrotterKind::Heat);
        multiply_potential(out, dt_slice, cfg, TrotterKind::Heat);
    }
    for (auto& v : out.values) {
        if (v.real() < 0.0) {
            if (v.real() < -1e-12)
                throw std::runtime_error("trotter_step_heat: quadrature negativity beyond 1e-12");
            v = cplx{0.0, v.imag()};
            if (negative_clips) ++(*negative_clips);
        }
    }
    return out;
}

TrotterRun trotter_evolve(const ComplexField& start, const PhysConfig& cfg, double t,
                          int l, TrotterKind kind, PotentialOrdering ord) {
    start.validate();
    if (l < 1) throw std::invalid_argument("trotter_evolve: l must be >= 1");
    const double dt_slice = t / l;
    const double dx = start.grid.dx();

    TrotterRun run;
    run.l = l;
    run.kind = kind;
    run.undersampled = dt_slice < dx * dx * cfg.mass / (kPi * cfg.hbar);
    // wrap distance of the oscillatory quadrature; ghosts re-enter the domain
    // once it is shorter than the full grid span
    run.aliased = kind == TrotterKind::Quantum &&
                  2.0 * kPi * cfg.hbar * dt_slice / (cfg.mass * dx) <
                      2.0 * start.grid.half_width;

    ComplexField state = start;
    const double norm_in = l2_norm(state);
    for (int k = 0; k < l; ++k)
        state = kind == TrotterKind::Quantum
                    ? trotter_step_quantum(state, dt_slice, cfg, ord)
                    : trotter_step_heat(state, dt_slice, cfg, ord, &run.negative_clips);
    run.result = state;
    run.norm_change = std::abs(l2_norm(state) - norm_in);

    if ((l2_norm(start) - l2_norm(run.result)) > 1e-6 * norm_in &&
        kind == TrotterKind::Quantum)
        throw std::runtime_error("trotter_evolve: quadrature tail loss above 1e-6 of norm");

    PhysConfig ref_cfg = cfg;
    if (kind == TrotterKind::Quantum) {
        run.reference = schrodinger_final(start, ref_cfg, t);
    } else {
        ref_cfg.hbar = 1.0;
        ref_cfg.mass = 1.0;
        run.reference = heat_terminal_final(start, ref_cfg, 0.0, t);
    }
    run.l2_error = l2_distance(run.result, run.reference);
    return run;
}

std::vector<TrotterRun> trotter_scan(const ComplexField& start, const PhysConfig& cfg,
                                     double t, const std::vector<int>& ls, TrotterKind kind,
                                     PotentialOrdering ord) {
    std::vector<TrotterRun> runs;
    runs.reserve(ls.size());
    for (int l : ls) runs.push_back(trotter_evolve(start, cfg, t, l, kind, ord));
    return runs;
}

ResidualReport kernel_collapse_check(const EvolutionRecord& h_rec) {
    h_rec.validate();
    if (h_rec.kind != RecordKind::Heat)
        throw std::invalid_argument("kernel_collapse_check: needs a heat record");
    if (!h_rec.config.potential.is_free())
        throw std::invalid_argument("kernel_collapse_check: record potential must be zero");

    const GridSpec& g = h_rec.grid;
    const int n = g.n_points;
    const double dx = g.dx();
    const double dt = h_rec.dt();
    const double t0 = h_rec.t0;
    const double t1 = h_rec.t1();
    DriftTable drifts(h_rec);

    // forward Kolmogorov march of q(t0,x0 -> t,y):
    //   dq/dt = (1/2) q_yy - d(b q)/dy, Crank-Nicolson with central advection
    auto fp_solve = [&](double x0) {
        std::vector<double> q(n, 0.0);
        const double w0 = 3.0 * dx;
        double mass = 0.0;
        for (int j = 0; j < n; ++j) {
            const double d = g.node(j) - x0;
            q[j] = std::exp(-d * d / (2.0 * w0 * w0));
            mass += q[j] * dx;
        }
        for (auto& v : q) v /= mass;

        const int m = h_rec.n_times() - 1;
        std::vector<double> lo(n), di(n), hi(n), rhs(n), work(n), cprime(n);
        for (int step = 0; step < m; ++step) {
            const double r = 0.5 / (dx * dx);
            const auto& bfield_now = drifts.at(step).b_plus;
            const auto& bfield_next = drifts.at(step + 1).b_plus;
            // assemble A q = -(1/2 dy^2)[..] + central drift divergence; CN halves
            auto assemble = [&](const std::vector<double>& b, double sgn) {
                // sgn=+1: implicit side (I - dt/2 A), sgn=-1: explicit rhs factor
                for (int j = 0; j < n; ++j) {
                    const double adv_m = j > 0 ? b[j - 1] / (2.0 * dx) : 0.0;
                    const double adv_p = j < n - 1 ? b[j + 1] / (2.0 * dx) : 0.0;
                    lo[j] = -sgn * 0.5 * dt * (r + adv_m);
                    di[j] = 1.0 + sgn * 0.5 * dt * (2.0 * r);
                    hi[j] = -sgn * 0.5 * dt * (r - adv_p);
                }
                lo[0] = hi[n - 1] = 0.0;
                di[0] = di[n - 1] = 1.0;
                hi[0] = lo[n - 1] = 0.0;
            };
            assemble(bfield_now, -1.0);
            for (int j = 0; j < n; ++j) {
                const double qm = j > 0 ? q[j - 1] : 0.0;
                const double qp = j < n - 1 ? q[j + 1] : 0.0;
                rhs[j] = lo[j] * qm + di[j] * q[j] + hi[j] * qp;
            }
            rhs[0] = rhs[n - 1] = 0.0;
            assemble(bfield_next, +1.0);
            // Thomas
            cprime[0] = hi[0] / di[0];
            work[0] = rhs[0] / di[0];
            for (int j = 1; j < n; ++j) {
                const double mlt = di[j] - lo[j] * cprime[j - 1];
                cprime[j] = hi[j] / mlt;
                work[j] = (rhs[j] - lo[j] * work[j - 1]) / mlt;
            }
            q[n - 1] = work[n - 1];
            for (int j = n - 2; j >= 0; --j) q[j] = work[j] - cprime[j] * q[j + 1];
        }
        return q;
    };

    const ComplexField& h_at_t0 = h_rec.at(0);
    const ComplexField& h_at_t1 = h_rec.at(h_rec.n_times() - 1);
    double worst = 0.0;
    for (double x0 : {-1.0, 0.0, 1.0}) {
        const auto q = fp_solve(x0);
        const double hx = interp(h_at_t0, x0).real();
        for (int j = 0; j < n; ++j) {
            const double y = g.node(j);
            if (std::abs(y) > 6.0) continue;
            const double lhs = hx / h_at_t1.values[j].real() * q[j];
            const double rhs = kernel_p(t0, x0, t1, y);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return ResidualReport{"kernel-collapse", worst, 5e-2, worst <= 5e-2,
                          n, g.half_width, dt};
}

}  // namespace smlab
