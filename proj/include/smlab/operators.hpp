#pragma once

#include <functional>

#include "smlab/evolve.hpp"
#include "smlab/fields.hpp"
#include "smlab/report.hpp"

namespace smlab {

// Discrete differential operators built from drift/potential data.
//   Lplus  = b+ d/dx + (sigma^2/2) Lap
//   Lminus = b- d/dx - (sigma^2/2) Lap
//   Lb     = v_q d/dx - (i sigma^2/2) Lap
//   Hamiltonian = -(hbar^2/2m) Lap + V
// The time-extended kinds pair the spatial part with a central time stencil
// through apply_series.
struct OperatorHandle {
    enum class Kind { Lplus, Lminus, Lb, Hamiltonian, DdtPlusLb, DdtPlusIHOverHbar };
    Kind kind = Kind::Hamiltonian;
    PhysConfig cfg;
    DriftFields drifts;   // used by Lplus/Lminus/Lb
    bool has_drifts = false;

    static OperatorHandle lplus(const DriftFields& df, const PhysConfig& c);
    static OperatorHandle lminus(const DriftFields& df, const PhysConfig& c);
    static OperatorHandle lb(const DriftFields& df, const PhysConfig& c);
    static OperatorHandle hamiltonian(const PhysConfig& c);
};

// Spatial application.  f must be numerically compactly supported:
// |f| < 1e-12 * max|f| wherever |x| > L - 2.
ComplexField apply(const OperatorHandle& op, const ComplexField& f);

// (f_next - f_prev)/(2 dt) + spatial part at f_now, for the Ddt* kinds.
ComplexField apply_series(const OperatorHandle& op, const ComplexField& f_prev,
                          const ComplexField& f_now, const ComplexField& f_next,
                          double dt);

// Product-solution identity for  du/dt = a Lap u + b V u : given two solution
// records u and theta of the same equation, phi = theta/u must satisfy
//   d(phi)/dt = 2a grad(log u) . grad(phi) + a Lap(phi).
// Reports the worst node-normalized stencil residual of that equation and of
// the original equation on both inputs.  Residuals are normalized pointwise
// by 1 + |field| and taken over nodes where both records sit above their
// density floors.
ResidualReport product_solution_check(const EvolutionRecord& u_rec, const EvolutionRecord& theta_rec,
                            cplx a, cplx b);

// Analytic test family env(x) * poly(x) * exp(i omega t) used by the
// conjugation checks; env is a sharply decaying Gaussian so tails are below
// 1e-12 beyond |x| > L - 2.
struct TestFunction {
    double width = 1.2;
    int poly_degree = 0;  // 0: 1, 1: x, 2: x^2 - 1
    double omega = 0.7;
    cplx operator()(double x, double t) const;
    ComplexField sample(const GridSpec& g, double t) const;
};

// Conjugation identity between the bi-directional generator and the
// Hamiltonian:  (d/dt + Lb) f  =  psi^{-1} (d/dt + (i/hbar) H)(psi f).
ResidualReport conjugation_check(const EvolutionRecord& rec, const TestFunction& f,
                                          double t);

// Stationary version through the ground state (V shifted by the Rayleigh
// quotient so H psi0 = 0):
//   -(hbar^2/m)(grad log psi0 . grad f + Lap f / 2) = psi0^{-1} H (psi0 f).
// Throws if psi0 is not an eigenstate (energy variance > 1e-6).
ResidualReport ground_state_transform_check(const ComplexField& psi0, const PhysConfig& cfg,
                                            const TestFunction& f);

// theta = log(psi2/psi1) must satisfy
//   d(theta)/dt + v_q grad(theta) - (i hbar/2m)(Lap theta + (grad theta)^2) = 0,
// and the ratio itself the linear form of the same equation.  Derivatives of
// theta are computed through ratios of the ratio field, never through the
// principal log.
ResidualReport hj_theta_check(const EvolutionRecord& rec1, const EvolutionRecord& rec2,
                              double t);

}  // namespace smlab
