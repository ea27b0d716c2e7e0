#include "smlab/evolve.hpp"

#include <cmath>
#include <stdexcept>

namespace smlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Thomas algorithm for a tridiagonal system with constant off-diagonals
// except identity first/last rows (Dirichlet).  diag/rhs are overwritten.
void solve_tridiag_dirichlet(std::vector<cplx>& diag, cplx off,
                             std::vector<cplx>& rhs, std::vector<cplx>& out,
                             std::vector<cplx>& scratch) {
    const int n = static_cast<int>(diag.size());
    scratch.resize(n);
    // forward sweep
    scratch[0] = 0.0;  // row 0 is identity
    cplx beta = diag[0];
    rhs[0] /= beta;
    for (int j = 1; j < n; ++j) {
        const cplx lo = (j == n - 1) ? cplx{0.0, 0.0} : off;
        const cplx hi_prev = (j - 1 == 0) ? cplx{0.0, 0.0} : off;
        scratch[j] = hi_prev / beta;
        beta = diag[j] - lo * scratch[j];
        rhs[j] = (rhs[j] - lo * rhs[j - 1]) / beta;
    }
    out.resize(n);
    out[n - 1] = rhs[n - 1];
    for (int j = n - 2; j >= 0; --j) out[j] = rhs[j] - scratch[j + 1] * out[j + 1];
}

std::vector<double> sample_potential(const GridSpec& g, const Potential& V) {
    std::vector<double> v(g.n_points);
    for (int j = 0; j < g.n_points; ++j) {
        v[j] = V(g.node(j));
        if (!std::isfinite(v[j]))
            throw std::invalid_argument("potential is not finite on the grid");
    }
    return v;
}

double norm_sq(const ComplexField& f) {
    const int n = f.size();
    double s = 0.5 * (std::norm(f.values[0]) + std::norm(f.values[n - 1]));
    for (int j = 1; j < n - 1; ++j) s += std::norm(f.values[j]);
    return s * f.grid.dx();
}

int step_count(double t0, double t1, double dt) {
    if (!(t1 > t0)) throw std::invalid_argument("evolve: need t1 > t0");
    const int m = static_cast<int>(std::llround((t1 - t0) / dt));
    if (m < 1 || std::abs(t0 + m * dt - t1) > 0.25 * dt)
        throw std::invalid_argument("evolve: t1 - t0 must be a multiple of dt");
    return m;
}

// One Crank-Nicolson engine shared by both equations:
//   d(f)/dt = a Lap f + c(x) f
// with Dirichlet-zero boundary rows.
class CnStepper {
  public:
    CnStepper(const GridSpec& g, cplx a, const std::vector<cplx>& c, double dt)
        : n_(g.n_points) {
        const double dx2 = g.dx() * g.dx();
        const cplx r = a / dx2;
        off_l_ = -0.5 * dt * r;
        off_r_ = 0.5 * dt * r;
        diag_l_.resize(n_);
        diag_r_.resize(n_);
        for (int j = 0; j < n_; ++j) {
            const cplx aj = -2.0 * r + c[j];
            diag_l_[j] = 1.0 - 0.5 * dt * aj;
            diag_r_[j] = 1.0 + 0.5 * dt * aj;
        }
        diag_l_[0] = diag_l_[n_ - 1] = 1.0;
        diag_r_[0] = diag_r_[n_ - 1] = 1.0;
    }

    void step(std::vector<cplx>& f) {
        rhs_.resize(n_);
        rhs_[0] = 0.0;
        rhs_[n_ - 1] = 0.0;
        for (int j = 1; j < n_ - 1; ++j)
            rhs_[j] = diag_r_[j] * f[j] + off_r_ * (f[j - 1] + f[j + 1]);
        diag_work_ = diag_l_;
        solve_tridiag_dirichlet(diag_work_, off_l_, rhs_, f, scratch_);
    }

  private:
    int n_;
    cplx off_l_, off_r_;
    std::vector<cplx> diag_l_, diag_r_, diag_work_, rhs_, scratch_;
};

}  // namespace

int EvolutionRecord::nearest_index(double t) const {
    const int i = static_cast<int>(std::llround((t - t0) / config.dt));
    return std::max(0, std::min(n_times() - 1, i));
}

int EvolutionRecord::index_of(double t) const {
    const int i = nearest_index(t);
    if (std::abs(time(i) - t) > 0.25 * config.dt)
        throw std::invalid_argument("record does not contain requested time");
    return i;
}

void EvolutionRecord::validate() const {
    config.validate();
    grid.validate();
    if (fields.empty()) throw std::invalid_argument("record has no fields");
    for (const auto& f : fields) {
        f.validate();
        if (!f.grid.same_lattice(grid))
            throw std::invalid_argument("record field on a different grid");
    }
}

EvolutionRecord schrodinger_evolve(const ComplexField& psi0, const PhysConfig& cfg, double t1) {
    psi0.validate();
    cfg.validate();
    const double n0 = norm_sq(psi0);
    if (std::abs(n0 - 1.0) > 1e-6)
        throw std::invalid_argument("schrodinger_evolve: psi0 is not normalized");
    const int m = step_count(0.0, t1, cfg.dt);

    const auto V = sample_potential(psi0.grid, cfg.potential);
    std::vector<cplx> c(psi0.grid.n_points);
    for (int j = 0; j < psi0.grid.n_points; ++j) c[j] = cplx{0.0, -V[j] / cfg.hbar};
    const cplx a{0.0, cfg.hbar / (2.0 * cfg.mass)};
    CnStepper stepper(psi0.grid, a, c, cfg.dt);

    EvolutionRecord rec{cfg, psi0.grid, RecordKind::Schrodinger, 0.0, {}};
    rec.fields.reserve(m + 1);
    rec.fields.push_back(psi0);
    rec.fields[0].time_tag = 0.0;

    std::vector<cplx> f = psi0.values;
    for (int k = 1; k <= m; ++k) {
        stepper.step(f);
        ComplexField fld(psi0.grid, k * cfg.dt);
        fld.values = f;
        rec.fields.push_back(std::move(fld));
    }
    const double drift = std::abs(norm_sq(rec.fields.back()) - n0);
    if (drift > 1e-8 * std::max(1.0, t1))
        throw std::runtime_error("schrodinger_evolve: norm drift exceeds tolerance");
    return rec;
}

ComplexField schrodinger_final(const ComplexField& psi0, const PhysConfig& cfg, double t1) {
    psi0.validate();
    cfg.validate();
    const int m = step_count(0.0, t1, cfg.dt);
    const auto V = sample_potential(psi0.grid, cfg.potential);
    std::vector<cplx> c(psi0.grid.n_points);
    for (int j = 0; j < psi0.grid.n_points; ++j) c[j] = cplx{0.0, -V[j] / cfg.hbar};
    const cplx a{0.0, cfg.hbar / (2.0 * cfg.mass)};
    CnStepper stepper(psi0.grid, a, c, cfg.dt);
    ComplexField out = psi0;
    for (int k = 0; k < m; ++k) stepper.step(out.values);
    out.time_tag = t1;
    return out;
}

namespace {

EvolutionRecord heat_solve_impl(const ComplexField& h1, const PhysConfig& cfg,
                                double t0, double t1, bool keep_all) {
    h1.validate();
    cfg.validate();
    for (const auto& v : h1.values)
        if (!(v.real() > 0.0) || v.imag() != 0.0)
            throw std::invalid_argument("heat_terminal_solve: terminal data must be real and > 0");
    const int m = step_count(t0, t1, cfg.dt);
    const auto V = sample_potential(h1.grid, cfg.potential);
    for (double v : V)
        if (v < 0.0) throw std::invalid_argument("heat_terminal_solve: V must be >= 0");

    // In tau = t1 - t the problem marches forward: dh/dtau = (1/2) Lap h - V h.
    std::vector<cplx> c(h1.grid.n_points);
    for (int j = 0; j < h1.grid.n_points; ++j) c[j] = cplx{-V[j], 0.0};
    CnStepper stepper(h1.grid, cplx{0.5, 0.0}, c, cfg.dt);

    PhysConfig unit = cfg;
    unit.hbar = 1.0;
    unit.mass = 1.0;  // unit diffusion on this branch
    EvolutionRecord rec{unit, h1.grid, RecordKind::Heat, t0, {}};
    rec.fields.resize(keep_all ? m + 1 : 1, ComplexField(h1.grid));

    std::vector<cplx> f = h1.values;
    auto store = [&](int time_index, const std::vector<cplx>& vals) {
        if (!keep_all && time_index != 0) return;
        ComplexField fld(h1.grid, t0 + time_index * cfg.dt);
        fld.values = vals;
        rec.fields[time_index] = std::move(fld);
    };
    store(m, f);
    for (int k = 1; k <= m; ++k) {
        stepper.step(f);
        // interior positivity; the Dirichlet boundary rows stay at their data
        for (int j = 1; j < h1.grid.n_points - 1; ++j)
            if (!(f[j].real() > 0.0))
                throw std::runtime_error("heat_terminal_solve: positivity lost (grid/step too coarse)");
        store(m - k, f);
    }
    return rec;
}

}  // namespace

EvolutionRecord heat_terminal_solve(const ComplexField& h1, const PhysConfig& cfg,
                                    double t0, double t1) {
    return heat_solve_impl(h1, cfg, t0, t1, true);
}

ComplexField heat_terminal_final(const ComplexField& h1, const PhysConfig& cfg,
                                 double t0, double t1) {
    auto rec = heat_solve_impl(h1, cfg, t0, t1, false);
    return rec.fields[0];
}

cplx kernel_K(double s, double y, double t, double x, const PhysConfig& cfg) {
    if (!(t > s)) throw std::invalid_argument("kernel_K: need t > s");
    const double tau = t - s;
    const cplx denom = cplx{0.0, 2.0 * kPi * cfg.hbar * tau / cfg.mass};
    const double d = x - y;
    return 1.0 / std::sqrt(denom) *
           std::exp(cplx{0.0, cfg.mass * d * d / (2.0 * cfg.hbar * tau)});
}

double kernel_p(double s, double y, double t, double x) {
    if (!(t > s)) throw std::invalid_argument("kernel_p: need t > s");
    const double tau = t - s;
    const double d = x - y;
    return std::exp(-d * d / (2.0 * tau)) / std::sqrt(2.0 * kPi * tau);
}

cplx kernel_pq(double t0, double y, double t, double x, const EvolutionRecord& rec) {
    if (!(t > t0)) throw std::invalid_argument("kernel_pq: need t > t0");
    if (rec.kind != RecordKind::Schrodinger)
        throw std::invalid_argument("kernel_pq: record must be a Schrodinger record");
    const ComplexField& psi0 = rec.at(rec.index_of(t0));
    const ComplexField& psit = rec.at(rec.index_of(t));
    const cplx pt = interp(psit, x);
    if (std::abs(pt) < 1e-12 * psit.max_abs())
        throw std::runtime_error("kernel_pq: psi(t,x) below vanishing threshold");
    return kernel_K(t0, y, t, x, rec.config) * interp(psi0, y) / pt;
}

cplx free_packet_value(double x, double t, double x0, double s0, double k0,
                       const PhysConfig& cfg) {
    const cplx alpha{1.0, cfg.hbar * t / (cfg.mass * s0 * s0)};
    const double d = x - x0;
    const cplx expo = (cplx{-d * d / (2.0 * s0 * s0), 0.0} + cplx{0.0, k0 * d} +
                       cplx{0.0, -cfg.hbar * k0 * k0 * t / (2.0 * cfg.mass)}) /
                      alpha;
    return std::pow(kPi * s0 * s0, -0.25) / std::sqrt(alpha) * std::exp(expo);
}

ComplexField free_packet(const GridSpec& g, const PhysConfig& cfg, double t,
                         double x0, double s0, double k0) {
    return make_field(g, [&](double x) { return free_packet_value(x, t, x0, s0, k0, cfg); }, t);
}

cplx harmonic_ground_value(double x, double t) {
    return std::pow(kPi, -0.25) * std::exp(cplx{-x * x / 2.0, -t / 2.0});
}

cplx coherent_value(double x, double t, double q0, double p0) {
    const double q = q0 * std::cos(t) + p0 * std::sin(t);
    const double p = p0 * std::cos(t) - q0 * std::sin(t);
    const double phase = -t / 2.0 + (q * p - q0 * p0) / 2.0;
    return std::pow(kPi, -0.25) *
           std::exp(cplx{-(x - q) * (x - q) / 2.0, p * (x - q) + phase});
}

ComplexField harmonic_ground(const GridSpec& g, double t) {
    return make_field(g, [&](double x) { return harmonic_ground_value(x, t); }, t);
}

ComplexField coherent_state(const GridSpec& g, double t, double q0, double p0) {
    return make_field(g, [&](double x) { return coherent_value(x, t, q0, p0); }, t);
}

double ou_eigen_h_value(double x, double t, double t1) {
    return std::exp(-(t1 - t) / 2.0) * std::exp(-x * x / 2.0);
}

EvolutionRecord make_record(const std::function<cplx(double, double)>& f_xt,
                            const GridSpec& g, const PhysConfig& cfg,
                            RecordKind kind, double t0, double t1) {
    cfg.validate();
    const int m = step_count(t0, t1, cfg.dt);
    EvolutionRecord rec{cfg, g, kind, t0, {}};
    rec.fields.reserve(m + 1);
    for (int k = 0; k <= m; ++k) {
        const double t = t0 + k * cfg.dt;
        rec.fields.push_back(make_field(g, [&](double x) { return f_xt(x, t); }, t));
    }
    return rec;
}

double mean_position(const ComplexField& psi) {
    ComplexField xr(psi.grid, psi.time_tag);
    for (int j = 0; j < psi.size(); ++j)
        xr.values[j] = psi.grid.node(j) * std::norm(psi.values[j]);
    return quad(xr).real();
}

}  // namespace smlab
