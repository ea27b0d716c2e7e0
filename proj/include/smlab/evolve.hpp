#pragma once

#include <functional>
#include <vector>

#include "smlab/config.hpp"
#include "smlab/grid.hpp"

namespace smlab {

enum class RecordKind { Schrodinger, Heat };

// A time-ordered stack of fields at uniform step cfg.dt starting at t0.
struct EvolutionRecord {
    PhysConfig config;
    GridSpec grid;
    RecordKind kind = RecordKind::Schrodinger;
    double t0 = 0.0;
    std::vector<ComplexField> fields;

    int n_times() const { return static_cast<int>(fields.size()); }
    double dt() const { return config.dt; }
    double time(int i) const { return t0 + i * config.dt; }
    double t1() const { return time(n_times() - 1); }
    int nearest_index(double t) const;
    int index_of(double t) const;  // like nearest_index but throws if off by > dt/4
    const ComplexField& at(int i) const { return fields.at(i); }
    void validate() const;
};

// Crank-Nicolson integration of
//   d(psi)/dt = (i hbar / 2m) Lap psi - (i/hbar) V psi
// on a Dirichlet-zero lattice.  Requires |quad(|psi0|^2) - 1| <= 1e-6.
// The record holds every step; the L2 norm is preserved to 1e-8 per unit time.
EvolutionRecord schrodinger_evolve(const ComplexField& psi0, const PhysConfig& cfg, double t1);

// As above but only the final state is kept (used for reference solves).
ComplexField schrodinger_final(const ComplexField& psi0, const PhysConfig& cfg, double t1);

// Terminal-value problem  dh/dt + (1/2) Lap h = V h  integrated backward from
// t1 to t0, unit diffusion (hbar/mass forced to 1 on this branch).  h1 must be
// strictly positive and V >= 0 on the grid; positivity is enforced every step.
EvolutionRecord heat_terminal_solve(const ComplexField& h1, const PhysConfig& cfg,
                                    double t0, double t1);
ComplexField heat_terminal_final(const ComplexField& h1, const PhysConfig& cfg,
                                 double t0, double t1);

// Free propagator [2 pi hbar i (t-s)/m]^{-1/2} exp[i m (x-y)^2 / (2 hbar (t-s))],
// principal branch.  Requires t > s.
cplx kernel_K(double s, double y, double t, double x, const PhysConfig& cfg);

// Standard Wiener transition density [2 pi (t-s)]^{-1/2} exp[-(x-y)^2/(2(t-s))].
double kernel_p(double s, double y, double t, double x);

// Transition kernel of the bi-directional generator equation for the record's
// state:  p_q(t0,y,t,x) = K(t0,y,t,x) psi(t0,y) / psi(t,x).
// Throws when |psi(t,x)| < 1e-12 * max|psi(t,.)|.
cplx kernel_pq(double t0, double y, double t, double x, const EvolutionRecord& rec);

// ---- closed-form reference states -----------------------------------------

// Spreading Gaussian packet: exact free-V solution for any (hbar, mass).
cplx free_packet_value(double x, double t, double x0, double s0, double k0,
                       const PhysConfig& cfg);
ComplexField free_packet(const GridSpec& g, const PhysConfig& cfg, double t,
                         double x0 = 0.0, double s0 = 1.0, double k0 = 1.0);

// Harmonic-oscillator states in natural units hbar = m = omega = 1.
cplx harmonic_ground_value(double x, double t);      // pi^{-1/4} e^{-x^2/2} e^{-it/2}
cplx coherent_value(double x, double t, double q0, double p0 = 0.0);
ComplexField harmonic_ground(const GridSpec& g, double t = 0.0);
ComplexField coherent_state(const GridSpec& g, double t, double q0, double p0 = 0.0);

// Separable eigen-solution of the terminal-value heat problem with V = x^2/2:
// h(x,t) = e^{-(t1-t)/2} e^{-x^2/2}.
double ou_eigen_h_value(double x, double t, double t1);

// Build a record by sampling a closed form at every step time.
EvolutionRecord make_record(const std::function<cplx(double, double)>& f_xt,
                            const GridSpec& g, const PhysConfig& cfg,
                            RecordKind kind, double t0, double t1);

// Mean position quad(x |psi|^2) of a record field.
double mean_position(const ComplexField& psi);

}  // namespace smlab
