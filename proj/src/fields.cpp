#include "smlab/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace smlab {

double DriftFields::density_floor() const {
    double m = 0.0;
    for (double r : rho) m = std::max(m, r);
    return 1e-8 * m;
}

DriftFields fields_from_psi(const ComplexField& psi, const PhysConfig& cfg) {
    psi.validate();
    cfg.validate();
    const int n = psi.size();
    const double s2 = cfg.sigma2();

    DriftFields df;
    df.grid = psi.grid;
    df.time_tag = psi.time_tag;
    df.sigma2 = s2;
    df.rho.resize(n);
    double max_rho = 0.0, total = 0.0;
    for (int j = 0; j < n; ++j) {
        df.rho[j] = std::norm(psi.values[j]);
        max_rho = std::max(max_rho, df.rho[j]);
    }
    {
        ComplexField r(psi.grid);
        for (int j = 0; j < n; ++j) r.values[j] = df.rho[j];
        total = quad(r).real();
    }
    if (std::abs(total - 1.0) > 1e-6)
        throw std::invalid_argument("fields_from_psi: psi is not normalized");

    // vanishing guard: the region above the density floor must be contiguous,
    // and the phase may not jump by more than pi/2 between adjacent nodes --
    // a node crossing between lattice points shows up as such a jump
    const double floor = 1e-8 * max_rho;
    int first = -1, last = -1;
    for (int j = 0; j < n; ++j)
        if (df.rho[j] >= floor) {
            if (first < 0) first = j;
            last = j;
        }
    for (int j = first; j <= last; ++j) {
        if (df.rho[j] < floor || std::abs(psi.values[j]) < 1e-12 * std::sqrt(max_rho))
            throw std::invalid_argument("fields_from_psi: psi vanishes inside its support");
        if (j < last && (std::conj(psi.values[j]) * psi.values[j + 1]).real() < 0.0)
            throw std::invalid_argument(
                "fields_from_psi: psi vanishes (or is unresolved) inside its support");
    }

    // u from the log-density stencil, v from the phase part of grad(psi)/psi
    ComplexField logrho(psi.grid);
    for (int j = 0; j < n; ++j)
        logrho.values[j] = std::log(std::max(df.rho[j], 5e-324));
    const ComplexField dlogrho = gradient(logrho);
    const ComplexField dpsi = gradient(psi);

    df.u.resize(n);
    df.v.resize(n);
    df.b_plus.resize(n);
    df.b_minus.resize(n);
    df.v_q.resize(n);
    for (int j = 0; j < n; ++j) {
        df.u[j] = 0.5 * s2 * dlogrho.values[j].real();
        df.v[j] = psi.values[j] == cplx{0.0, 0.0}
                      ? 0.0
                      : s2 * (dpsi.values[j] / psi.values[j]).imag();
        df.b_plus[j] = df.v[j] + df.u[j];
        df.b_minus[j] = df.v[j] - df.u[j];
        df.v_q[j] = cplx{df.v[j], -df.u[j]};
    }
    // Dirichlet solves pin the two outermost nodes to exact zero; their drift
    // values (and those of stencils touching them) are artifacts of the
    // boundary, so copy in the first interior value instead.
    auto patch = [&](int bad, int good) {
        df.u[bad] = df.u[good];
        df.v[bad] = df.v[good];
        df.b_plus[bad] = df.b_plus[good];
        df.b_minus[bad] = df.b_minus[good];
        df.v_q[bad] = df.v_q[good];
    };
    if (df.rho[0] == 0.0) { patch(1, 2); patch(0, 2); }
    if (df.rho[n - 1] == 0.0) { patch(n - 2, n - 3); patch(n - 1, n - 3); }
    return df;
}

DriftFields drift_from_h(const ComplexField& h) {
    h.validate();
    const int n = h.size();
    DriftFields df;
    df.grid = h.grid;
    df.time_tag = h.time_tag;
    df.sigma2 = 1.0;
    df.complete = false;
    for (int j = 1; j < n - 1; ++j)
        if (!(h.values[j].real() > 0.0) || h.values[j].imag() != 0.0)
            throw std::invalid_argument("drift_from_h: h must be real and > 0");
    ComplexField logh(h.grid);
    const bool zero_edges = !(h.values[0].real() > 0.0) || !(h.values[n - 1].real() > 0.0);
    for (int j = 0; j < n; ++j) {
        const double hv = (zero_edges && (j == 0 || j == n - 1))
                              ? h.values[j == 0 ? 1 : n - 2].real()
                              : h.values[j].real();
        if (!(hv > 0.0)) throw std::invalid_argument("drift_from_h: h must be > 0");
        logh.values[j] = std::log(hv);
    }
    const ComplexField g = gradient(logh);
    df.b_plus.resize(n);
    for (int j = 0; j < n; ++j) df.b_plus[j] = g.values[j].real();
    if (zero_edges) {
        df.b_plus[0] = df.b_plus[1];
        df.b_plus[n - 1] = df.b_plus[n - 2];
    }
    // normalized h^2 doubles as the initial density for h-process sampling
    ComplexField h2(h.grid);
    for (int j = 0; j < n; ++j) h2.values[j] = std::norm(h.values[j]);
    const double total = quad(h2).real();
    df.rho.resize(n);
    for (int j = 0; j < n; ++j) df.rho[j] = h2.values[j].real() / total;
    return df;
}

ResidualReport check_nelson_relation(const DriftFields& df, const PhysConfig& cfg) {
    if (!df.complete) throw std::invalid_argument("check_nelson_relation: incomplete fields");
    const int n = static_cast<int>(df.rho.size());
    ComplexField logrho(df.grid);
    for (int j = 0; j < n; ++j)
        logrho.values[j] = std::log(std::max(df.rho[j], 5e-324));
    const ComplexField dlogrho = gradient(logrho);
    const double floor = df.density_floor();
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        if (df.rho[j] < floor) continue;
        const double r = std::abs(df.b_plus[j] - df.b_minus[j] -
                                  cfg.sigma2() * dlogrho.values[j].real());
        worst = std::max(worst, r);
    }
    ResidualReport rep{"nelson-relation", worst, 1e-6, worst <= 1e-6,
                       df.grid.n_points, df.grid.half_width, 0.0};
    return rep;
}

ResidualReport check_continuity(const EvolutionRecord& rec, double t) {
    rec.validate();
    const int i = rec.index_of(t);
    if (i == 0 || i == rec.n_times() - 1)
        throw std::invalid_argument("check_continuity: t at record boundary");
    const auto prev = fields_from_psi(rec.at(i - 1), rec.config);
    const auto cur = fields_from_psi(rec.at(i), rec.config);
    const auto next = fields_from_psi(rec.at(i + 1), rec.config);

    const int n = rec.grid.n_points;
    ComplexField flux(rec.grid);
    for (int j = 0; j < n; ++j) flux.values[j] = cur.v[j] * cur.rho[j];
    const ComplexField dflux = gradient(flux);
    const double floor = cur.density_floor();
    const double dt = rec.dt();
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        if (cur.rho[j] < floor) continue;
        const double drho_dt = (next.rho[j] - prev.rho[j]) / (2.0 * dt);
        worst = std::max(worst, std::abs(drho_dt + dflux.values[j].real()));
    }
    return ResidualReport{"continuity", worst, 5e-3, worst <= 5e-3,
                          rec.grid.n_points, rec.grid.half_width, dt};
}

DriftTable::DriftTable(const EvolutionRecord& rec) : rec_(&rec) {
    rec.validate();
    table_.reserve(rec.n_times());
    if (rec.kind == RecordKind::Schrodinger) {
        for (int i = 0; i < rec.n_times(); ++i)
            table_.push_back(fields_from_psi(rec.at(i), rec.config));
    } else {
        for (int i = 0; i < rec.n_times(); ++i)
            table_.push_back(drift_from_h(rec.at(i)));
    }
}

double DriftTable::bplus(int i, double x) const {
    return interp_real(table_[i].b_plus, table_[i].grid, x);
}

double DriftTable::bminus(int i, double x) const {
    return interp_real(table_[i].b_minus, table_[i].grid, x);
}

double DriftTable::u_at(int i, double x) const {
    return interp_real(table_[i].u, table_[i].grid, x);
}

}  // namespace smlab
