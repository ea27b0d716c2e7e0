#include "smlab/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace smlab {

OperatorHandle OperatorHandle::lplus(const DriftFields& df, const PhysConfig& c) {
    return OperatorHandle{Kind::Lplus, c, df, true};
}
OperatorHandle OperatorHandle::lminus(const DriftFields& df, const PhysConfig& c) {
    return OperatorHandle{Kind::Lminus, c, df, true};
}
OperatorHandle OperatorHandle::lb(const DriftFields& df, const PhysConfig& c) {
    return OperatorHandle{Kind::Lb, c, df, true};
}
OperatorHandle OperatorHandle::hamiltonian(const PhysConfig& c) {
    return OperatorHandle{Kind::Hamiltonian, c, {}, false};
}

namespace {

void check_support(const ComplexField& f) {
    const double lim = f.grid.half_width - 2.0;
    const double thresh = 1e-12 * f.max_abs();
    for (int j = 0; j < f.size(); ++j) {
        const double x = f.grid.node(j);
        if (std::abs(x) > lim && std::abs(f.values[j]) > thresh)
            throw std::invalid_argument("apply: field not compactly supported in the interior");
    }
}

ComplexField spatial_apply(const OperatorHandle& op, const ComplexField& f) {
    const ComplexField df = gradient(f);
    const ComplexField lf = laplacian(f);
    ComplexField out(f.grid, f.time_tag);
    const double s2 = op.cfg.sigma2();
    switch (op.kind) {
        case OperatorHandle::Kind::Lplus:
            for (int j = 0; j < f.size(); ++j)
                out.values[j] = op.drifts.b_plus[j] * df.values[j] + 0.5 * s2 * lf.values[j];
            break;
        case OperatorHandle::Kind::Lminus:
            for (int j = 0; j < f.size(); ++j)
                out.values[j] = op.drifts.b_minus[j] * df.values[j] - 0.5 * s2 * lf.values[j];
            break;
        case OperatorHandle::Kind::Lb:
        case OperatorHandle::Kind::DdtPlusLb:
            for (int j = 0; j < f.size(); ++j)
                out.values[j] = op.drifts.v_q[j] * df.values[j] -
                                cplx{0.0, 0.5 * s2} * lf.values[j];
            break;
        case OperatorHandle::Kind::Hamiltonian:
        case OperatorHandle::Kind::DdtPlusIHOverHbar: {
            const double kin = op.cfg.hbar * op.cfg.hbar / (2.0 * op.cfg.mass);
            for (int j = 0; j < f.size(); ++j)
                out.values[j] = -kin * lf.values[j] +
                                op.cfg.potential(f.grid.node(j)) * f.values[j];
            if (op.kind == OperatorHandle::Kind::DdtPlusIHOverHbar)
                for (auto& v : out.values) v *= cplx{0.0, 1.0 / op.cfg.hbar};
            break;
        }
    }
    return out;
}

}  // namespace

ComplexField apply(const OperatorHandle& op, const ComplexField& f) {
    f.validate();
    if (op.kind == OperatorHandle::Kind::DdtPlusLb ||
        op.kind == OperatorHandle::Kind::DdtPlusIHOverHbar)
        throw std::invalid_argument("apply: time-extended kinds need apply_series");
    if (op.has_drifts && !op.drifts.grid.same_lattice(f.grid))
        throw std::invalid_argument("apply: operator and field grids differ");
    check_support(f);
    return spatial_apply(op, f);
}

ComplexField apply_series(const OperatorHandle& op, const ComplexField& f_prev,
                          const ComplexField& f_now, const ComplexField& f_next,
                          double dt) {
    require_same_grid(f_prev, f_now);
    require_same_grid(f_now, f_next);
    ComplexField out = spatial_apply(op, f_now);
    if (op.kind == OperatorHandle::Kind::DdtPlusLb ||
        op.kind == OperatorHandle::Kind::DdtPlusIHOverHbar) {
        for (int j = 0; j < f_now.size(); ++j)
            out.values[j] += (f_next.values[j] - f_prev.values[j]) / (2.0 * dt);
    }
    return out;
}

namespace {

// Never-vanishing premise: the region above the amplitude floor must be one
// contiguous block (Dirichlet boundary zeros are outside it and harmless).
void require_never_vanishing(const ComplexField& f, const char* who) {
    const double floor = 1e-4 * f.max_abs();
    const double tiny = 1e-12 * f.max_abs();
    int first = -1, last = -1;
    for (int j = 0; j < f.size(); ++j)
        if (std::abs(f.values[j]) >= floor) {
            if (first < 0) first = j;
            last = j;
        }
    for (int j = first; j <= last; ++j)
        if (std::abs(f.values[j]) < tiny)
            throw std::invalid_argument(std::string(who) + ": field vanishes inside its support");
}

// Guard mask: both fields above their 1e-8 density floor, a few nodes of
// margin from the boundary stencils.
std::vector<bool> guard_mask(const ComplexField& a, const ComplexField& b) {
    const int n = a.size();
    std::vector<bool> mask(n, false);
    const double fa = 1e-4 * a.max_abs();  // |field| floor = sqrt(1e-8 * max rho)
    const double fb = 1e-4 * b.max_abs();
    for (int j = 4; j < n - 4; ++j)
        mask[j] = std::abs(a.values[j]) >= fa && std::abs(b.values[j]) >= fb;
    return mask;
}

double normalized_max(const std::vector<cplx>& resid, const std::vector<cplx>& field,
                      const std::vector<bool>& mask) {
    double worst = 0.0;
    for (std::size_t j = 0; j < resid.size(); ++j)
        if (mask[j])
            worst = std::max(worst, std::abs(resid[j]) / (1.0 + std::abs(field[j])));
    return worst;
}

// grad(log f) assembled from the log-modulus stencil (exact for Gaussian
// envelopes) and the phase part of grad(f)/f; no branch cuts either way
std::vector<cplx> grad_log(const ComplexField& f) {
    const int n = f.size();
    ComplexField logmod(f.grid);
    for (int j = 0; j < n; ++j)
        logmod.values[j] = std::log(std::max(std::abs(f.values[j]), 5e-324));
    const ComplexField dmod = gradient(logmod);
    const ComplexField df = gradient(f);
    std::vector<cplx> out(n);
    for (int j = 0; j < n; ++j) {
        const double phase = f.values[j] == cplx{0.0, 0.0}
                                 ? 0.0
                                 : (df.values[j] / f.values[j]).imag();
        out[j] = cplx{dmod.values[j].real(), phase};
    }
    return out;
}

// residual of  df/dt - a Lap f - b V f  at record index i (central in time)
std::vector<cplx> pd1_residual(const EvolutionRecord& rec, int i, cplx a, cplx b) {
    const ComplexField& fm = rec.at(i - 1);
    const ComplexField& f0 = rec.at(i);
    const ComplexField& fp = rec.at(i + 1);
    const ComplexField lap = laplacian(f0);
    const int n = f0.size();
    std::vector<cplx> r(n);
    for (int j = 0; j < n; ++j) {
        const cplx dfdt = (fp.values[j] - fm.values[j]) / (2.0 * rec.dt());
        const double V = rec.config.potential(f0.grid.node(j));
        r[j] = dfdt - a * lap.values[j] - b * V * f0.values[j];
    }
    return r;
}

}  // namespace

ResidualReport product_solution_check(const EvolutionRecord& u_rec, const EvolutionRecord& theta_rec,
                            cplx a, cplx b) {
    u_rec.validate();
    theta_rec.validate();
    if (!u_rec.grid.same_lattice(theta_rec.grid) || u_rec.n_times() != theta_rec.n_times())
        throw std::invalid_argument("product_solution_check: records are not aligned");
    const int n = u_rec.grid.n_points;
    const double tol = 1e-3;
    const double tol_in = 1e-3;

    double worst = 0.0;       // product-equation residual of phi = theta/u
    double worst_conv = 0.0;  // original-equation residual of u phi = theta
    const int stride = std::max(1, (u_rec.n_times() - 2) / 64);
    for (int i = 1; i + 1 < u_rec.n_times(); i += stride) {
        const ComplexField& u0 = u_rec.at(i);
        const ComplexField& th0 = theta_rec.at(i);
        require_never_vanishing(u0, "product_solution_check");
        const auto mask = guard_mask(u0, th0);

        // u must satisfy the original equation to begin with
        const auto ru = pd1_residual(u_rec, i, a, b);
        if (normalized_max(ru, u0.values, mask) > tol_in)
            throw std::invalid_argument("product_solution_check: u_rec does not solve the equation");
        const auto rt = pd1_residual(theta_rec, i, a, b);
        worst_conv = std::max(worst_conv, normalized_max(rt, th0.values, mask));

        // phi = theta / u at i-1, i, i+1; exact boundary zeros fall outside
        // the guard mask and are replaced by 1 to keep stencils finite
        auto ratio = [&](int ii) {
            ComplexField r(u_rec.grid, u_rec.time(ii));
            for (int j = 0; j < n; ++j) {
                const cplx d = u_rec.at(ii).values[j];
                r.values[j] = (d == cplx{0.0, 0.0})
                                  ? cplx{1.0, 0.0}
                                  : theta_rec.at(ii).values[j] / d;
            }
            return r;
        };
        const ComplexField phim = ratio(i - 1), phi0 = ratio(i), phip = ratio(i + 1);
        const ComplexField dphi = gradient(phi0);
        const ComplexField lphi = laplacian(phi0);
        const auto dlogu = grad_log(u0);
        std::vector<cplx> r2(n);
        for (int j = 0; j < n; ++j) {
            const cplx dphidt = (phip.values[j] - phim.values[j]) / (2.0 * u_rec.dt());
            r2[j] = dphidt - 2.0 * a * dlogu[j] * dphi.values[j] - a * lphi.values[j];
        }
        worst = std::max(worst, normalized_max(r2, phi0.values, mask));
    }
    return ResidualReport{"product-solution", worst, tol,
                          worst <= tol && worst_conv <= tol,
                          n, u_rec.grid.half_width, u_rec.dt()};
}

cplx TestFunction::operator()(double x, double t) const {
    const double env = std::exp(-x * x / (2.0 * width * width));
    double poly = 1.0;
    if (poly_degree == 1) poly = x;
    if (poly_degree == 2) poly = x * x - 1.0;
    return env * poly * std::exp(cplx{0.0, omega * t});
}

ComplexField TestFunction::sample(const GridSpec& g, double t) const {
    return make_field(g, [&](double x) { return (*this)(x, t); }, t);
}

ResidualReport conjugation_check(const EvolutionRecord& rec, const TestFunction& f,
                                          double t) {
    rec.validate();
    const int i = rec.index_of(t);
    if (i == 0 || i == rec.n_times() - 1)
        throw std::invalid_argument("conjugation_check: t at record boundary");
    const ComplexField& psi = rec.at(i);
    require_never_vanishing(psi, "conjugation_check");

    const PhysConfig& cfg = rec.config;
    const DriftFields df = fields_from_psi(psi, cfg);
    const double dt = rec.dt();
    const ComplexField fm = f.sample(rec.grid, rec.time(i - 1));
    const ComplexField f0 = f.sample(rec.grid, t);
    const ComplexField fp = f.sample(rec.grid, rec.time(i + 1));

    OperatorHandle lhs_op{OperatorHandle::Kind::DdtPlusLb, cfg, df, true};
    const ComplexField lhs = apply_series(lhs_op, fm, f0, fp, dt);

    auto times_psi = [&](const ComplexField& g, int ii) {
        ComplexField r(rec.grid, rec.time(ii));
        for (int j = 0; j < g.size(); ++j)
            r.values[j] = rec.at(ii).values[j] * g.values[j];
        return r;
    };
    OperatorHandle rhs_op{OperatorHandle::Kind::DdtPlusIHOverHbar, cfg, {}, false};
    const ComplexField rhs_raw = apply_series(rhs_op, times_psi(fm, i - 1),
                                              times_psi(f0, i), times_psi(fp, i + 1), dt);

    const int n = rec.grid.n_points;
    std::vector<cplx> resid(n);
    for (int j = 0; j < n; ++j)
        resid[j] = lhs.values[j] - rhs_raw.values[j] / psi.values[j];
    const auto mask = guard_mask(psi, psi);
    const double worst = normalized_max(resid, f0.values, mask);
    return ResidualReport{"generator-conjugation", worst, 1e-3, worst <= 1e-3,
                          n, rec.grid.half_width, dt};
}

ResidualReport ground_state_transform_check(const ComplexField& psi0, const PhysConfig& cfg,
                                            const TestFunction& f) {
    psi0.validate();
    const OperatorHandle H = OperatorHandle::hamiltonian(cfg);
    const ComplexField Hpsi = spatial_apply(H, psi0);

    // Rayleigh quotient and energy variance of psi0
    const int n = psi0.size();
    ComplexField num(psi0.grid), den(psi0.grid);
    for (int j = 0; j < n; ++j) {
        num.values[j] = std::conj(psi0.values[j]) * Hpsi.values[j];
        den.values[j] = std::norm(psi0.values[j]);
    }
    const double nrm = quad(den).real();
    const double e0 = quad(num).real() / nrm;
    ComplexField dev(psi0.grid);
    for (int j = 0; j < n; ++j)
        dev.values[j] = std::norm(Hpsi.values[j] - e0 * psi0.values[j]);
    const double variance = quad(dev).real() / nrm;
    if (variance > 1e-6)
        throw std::invalid_argument("ground_state_transform_check: psi0 is not an eigenstate");

    const ComplexField f0 = f.sample(psi0.grid, 0.0);
    const ComplexField dfl = gradient(f0);
    const ComplexField lfl = laplacian(f0);
    const ComplexField dpsi = gradient(psi0);

    ComplexField psif(psi0.grid);
    for (int j = 0; j < n; ++j) psif.values[j] = psi0.values[j] * f0.values[j];
    const ComplexField Hpsif = spatial_apply(H, psif);

    const double kin = cfg.hbar * cfg.hbar / cfg.mass;
    std::vector<cplx> resid(n);
    for (int j = 0; j < n; ++j) {
        const cplx dlog = dpsi.values[j] / psi0.values[j];
        const cplx lhs = -kin * (dlog * dfl.values[j] + 0.5 * lfl.values[j]);
        // shifted Hamiltonian: subtract e0 * (psi0 f) before dividing out psi0
        const cplx rhs = (Hpsif.values[j] - e0 * psif.values[j]) / psi0.values[j];
        resid[j] = lhs - rhs;
    }
    const auto mask = guard_mask(psi0, psi0);
    const double worst = normalized_max(resid, f0.values, mask);
    return ResidualReport{"ground-state-transform", worst, 1e-3, worst <= 1e-3,
                          n, psi0.grid.half_width, 0.0};
}

ResidualReport hj_theta_check(const EvolutionRecord& rec1, const EvolutionRecord& rec2,
                              double t) {
    rec1.validate();
    rec2.validate();
    if (!rec1.grid.same_lattice(rec2.grid))
        throw std::invalid_argument("hj_theta_check: grid mismatch");
    const int i = rec1.index_of(t);
    if (i == 0 || i == rec1.n_times() - 1)
        throw std::invalid_argument("hj_theta_check: t at record boundary");
    const int n = rec1.grid.n_points;
    const double dt = rec1.dt();
    const PhysConfig& cfg = rec1.config;

    require_never_vanishing(rec1.at(i), "hj_theta_check");
    auto ratio = [&](int ii) {
        ComplexField r(rec1.grid, rec1.time(ii));
        for (int j = 0; j < n; ++j) {
            const cplx d = rec1.at(ii).values[j];
            r.values[j] = (d == cplx{0.0, 0.0}) ? cplx{1.0, 0.0}
                                                : rec2.at(ii).values[j] / d;
        }
        return r;
    };
    const ComplexField rm = ratio(i - 1), r0 = ratio(i), rp = ratio(i + 1);
    const DriftFields df = fields_from_psi(rec1.at(i), cfg);

    const ComplexField dr = gradient(r0);
    const ComplexField lr = laplacian(r0);
    const cplx ia{0.0, cfg.hbar / (2.0 * cfg.mass)};

    // theta derivatives through the ratio field (no branch cuts):
    //   dtheta = dr/r0,  ddtheta = grad(dr/r0),  dtheta_dt = (dr0/dt)/r0
    ComplexField dtheta(rec1.grid);
    for (int j = 0; j < n; ++j) dtheta.values[j] = dr.values[j] / r0.values[j];
    const ComplexField ddtheta = gradient(dtheta);

    std::vector<cplx> resid_hj(n), resid_lin(n);
    for (int j = 0; j < n; ++j) {
        const cplx th_t = (rp.values[j] - rm.values[j]) / (2.0 * dt) / r0.values[j];
        const cplx th_x = dtheta.values[j];
        const cplx vq = df.v_q[j];
        resid_hj[j] = th_t + vq * th_x - ia * (ddtheta.values[j] + th_x * th_x);
        const cplx r_t = (rp.values[j] - rm.values[j]) / (2.0 * dt);
        resid_lin[j] = r_t + vq * dr.values[j] - ia * lr.values[j];
    }
    const auto mask = guard_mask(rec1.at(i), rec2.at(i));
    std::vector<cplx> theta_scale(n);
    for (int j = 0; j < n; ++j) theta_scale[j] = std::log(std::abs(r0.values[j]) + 1e-300);
    double worst = normalized_max(resid_hj, theta_scale, mask);
    worst = std::max(worst, normalized_max(resid_lin, r0.values, mask));
    return ResidualReport{"hj-log-ratio", worst, 1e-3, worst <= 1e-3,
                          n, rec1.grid.half_width, dt};
}

}  // namespace smlab
