#pragma once

#include <vector>

#include "smlab/evolve.hpp"
#include "smlab/report.hpp"

namespace smlab {

enum class TrotterKind { Quantum, Heat };

// Which endpoint of a slice the potential factor is evaluated at.  PostStep
// multiplies after the kernel quadrature (at the new point); PreStep is the
// O(dt)-different alternative kept for the convergence study.
enum class PotentialOrdering { PostStep, PreStep };

struct TrotterRun {
    int l = 1;
    TrotterKind kind = TrotterKind::Quantum;
    ComplexField result;
    ComplexField reference;
    double l2_error = 0.0;
    bool undersampled = false;  // dt_slice below dx^2 m/(pi hbar)
    bool aliased = false;       // oscillation wrap reaches back into the domain
    double norm_change = 0.0;   // |result| L2 vs input L2
    long negative_clips = 0;    // heat kind: quadrature negativity clipped
};

// One quantum slice: free-kernel quadrature over the grid, then pointwise
// multiplication by exp(-(i/hbar) V dt_slice).
ComplexField trotter_step_quantum(const ComplexField& psi, double dt_slice,
                                  const PhysConfig& cfg,
                                  PotentialOrdering ord = PotentialOrdering::PostStep);

// One heat slice: Wiener-kernel quadrature, then exp(-V dt_slice) damping.
ComplexField trotter_step_heat(const ComplexField& h, double dt_slice,
                               const PhysConfig& cfg,
                               PotentialOrdering ord = PotentialOrdering::PostStep,
                               long* negative_clips = nullptr);

// l slice applications with the matching PDE reference (Crank-Nicolson for
// quantum, terminal-value solve marched over the same span for heat).
TrotterRun trotter_evolve(const ComplexField& start, const PhysConfig& cfg, double t,
                          int l, TrotterKind kind,
                          PotentialOrdering ord = PotentialOrdering::PostStep);

std::vector<TrotterRun> trotter_scan(const ComplexField& start, const PhysConfig& cfg,
                                     double t, const std::vector<int>& ls, TrotterKind kind,
                                     PotentialOrdering ord = PotentialOrdering::PostStep);

// Kernel-collapse check for drift-free heat records: the transition density q
// of dx = grad(log h) dt + dw, started as a narrow Gaussian (width 3 dx) at a
// few points, must satisfy h(x,t)/h1(y) q(t,x,t1,y) = p(t,x,t1,y) within 5e-2.
ResidualReport kernel_collapse_check(const EvolutionRecord& h_rec);

}  // namespace smlab
